use approx::assert_abs_diff_eq;
use itertools::Itertools;
use mixcurv::corpus;
use mixcurv::mixed::{check_orders, mixed_curvature_measure, mixed_volume_via_measures, oracle_mixed_volume, MixedQuery};
use mixcurv::montecarlo::McConfig;
use mixcurv::polytope::{Polytope, Region};
use mixcurv::spherical::SphericalRegion;
use mixcurv::{vector, Error, Vector};
use proptest::prelude::*;
use rand::Rng;

fn total(polys: &[&Polytope], orders: &[usize]) -> f64 {
    mixed_curvature_measure(polys, &MixedQuery::total(orders), &McConfig::default()).unwrap().value
}

#[test]
fn squares_and_cubes() {
    let sq = corpus::unit_square();
    let r = mixed_curvature_measure(&[&sq, &sq], &MixedQuery::total(&[1, 1]), &McConfig::default()).unwrap();
    assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
    assert_eq!(r.contributions.len(), 8);
    for c in &r.contributions {
        assert_abs_diff_eq!(c.gamma, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(c.bracket, 1.0, epsilon = 1e-12);
    }
    let sum: f64 = r.contributions.iter().map(|c| c.product).sum();
    assert_abs_diff_eq!(sum, r.value, epsilon = 1e-12);
    assert_abs_diff_eq!(total(&[&sq, &sq], &[2, 1]), 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(total(&[&sq, &sq], &[0, 2]), 1.0, epsilon = 1e-12);
    let c = corpus::unit_cube();
    let r = mixed_curvature_measure(&[&c, &c, &c], &MixedQuery::total(&[2, 2, 2]), &McConfig::default()).unwrap();
    assert_abs_diff_eq!(r.value, 6.0, epsilon = 1e-12);
    assert_eq!(r.contributions.len(), 48);
}

#[test]
fn mixed_volumes_of_boxes() {
    let sq = corpus::unit_square();
    let rect = corpus::cuboid(&[0.0, 0.0], &[2.0, 1.0]);
    assert_abs_diff_eq!(mixed_volume_via_measures(&sq, &sq, 1, &McConfig::default()).unwrap().value, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(mixed_volume_via_measures(&sq, &rect, 1, &McConfig::default()).unwrap().value, 1.5, epsilon = 1e-12);
    assert_abs_diff_eq!(oracle_mixed_volume(&sq, &rect, 1).unwrap(), 1.5, epsilon = 1e-12);
}

#[test]
fn order_validation() {
    let sq = corpus::unit_square();
    let err = mixed_curvature_measure(&[&sq, &sq], &MixedQuery::total(&[0, 1]), &McConfig::default());
    assert!(matches!(err, Err(Error::Validation(_))));
    assert!(check_orders(2, &[2, 2]).is_err());
    assert_eq!(check_orders(3, &[2, 2, 2]).unwrap(), 0);
}

#[test]
fn csv_has_one_row_per_tuple() {
    let sq = corpus::unit_square();
    let r = mixed_curvature_measure(&[&sq, &sq], &MixedQuery::total(&[1, 1]), &McConfig::default()).unwrap();
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 1 + r.contributions.len());
    assert!(csv.starts_with("face1,face2,bracket,gamma"));
}

fn random_polys(seed: u64, q: usize) -> Vec<Polytope> {
    let mut rng = corpus::rng(seed);
    (0..q).map(|_| corpus::random_polygon(&mut rng, 7)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symmetric_under_relabeling(seed in any::<u64>(), a in 0usize..3, b in 0usize..3, c in 0usize..3) {
        let orders = [a, b, c];
        prop_assume!(orders.iter().sum::<usize>() >= 4 && orders.iter().sum::<usize>() <= 5);
        let polys = random_polys(seed, 3);
        let base = total(&polys.iter().collect::<Vec<_>>(), &orders);
        prop_assert!(base >= 0.0);
        for perm in (0..3).permutations(3) {
            let p: Vec<&Polytope> = perm.iter().map(|&i| &polys[i]).collect();
            let r: Vec<usize> = perm.iter().map(|&i| orders[i]).collect();
            let v = total(&p, &r);
            prop_assert!((v - base).abs() <= 1e-10 * base.max(1.0));
        }
    }

    #[test]
    fn homogeneous_and_translation_covariant(seed in any::<u64>(), lambda in 0.3f64..3.0, pick in 0usize..5) {
        let polys = random_polys(seed, 2);
        let orders = [[1, 1], [0, 2], [2, 0], [1, 2], [2, 1]][pick];
        let mut rng = corpus::rng(seed ^ 3);
        let region = Region::boxed(&[-0.5, -0.5], &[rng.random_range(0.0..1.0), 1.5]);
        let query = MixedQuery { orders: orders.to_vec(), regions: vec![region.clone(), Region::All], directions: SphericalRegion::All };
        let cfg = McConfig::default();
        let base = mixed_curvature_measure(&[&polys[0], &polys[1]], &query, &cfg).unwrap().value;
        let mut scaled = query.clone();
        scaled.regions[0] = region.scale(lambda);
        let big = polys[0].scale(lambda).unwrap();
        let v = mixed_curvature_measure(&[&big, &polys[1]], &scaled, &cfg).unwrap().value;
        let want = base * lambda.powi(orders[0] as i32);
        prop_assert!((v - want).abs() <= 1e-9 * want.max(1.0));
        let z: Vector = vector(&[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
        let mut moved = query.clone();
        moved.regions[0] = region.translate(&z);
        let shifted = polys[0].translate(&z).unwrap();
        let v = mixed_curvature_measure(&[&shifted, &polys[1]], &moved, &cfg).unwrap().value;
        prop_assert!((v - base).abs() <= 1e-10 * base.max(1.0));
    }

    #[test]
    fn mixed_volume_matches_oracle(seed in any::<u64>()) {
        let polys = random_polys(seed, 2);
        let via = mixed_volume_via_measures(&polys[0], &polys[1], 1, &McConfig::default()).unwrap().value;
        let oracle = oracle_mixed_volume(&polys[0], &polys[1], 1).unwrap();
        prop_assert!((via - oracle).abs() <= 1e-8 * oracle);
        let own = mixed_volume_via_measures(&polys[0], &polys[0], 1, &McConfig::default()).unwrap().value;
        prop_assert!((own - polys[0].volume()).abs() <= 1e-9 * own);
    }
}
