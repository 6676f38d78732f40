use approx::assert_abs_diff_eq;
use mixcurv::corpus;
use mixcurv::multilinear::{bracket, gram_volume, p_product, sign_parities, SignCalc, SimpleMultivector, Subspace};
use mixcurv::Vector;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn vectors(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Vector> {
    (0..n).map(|_| gaussian(rng, d)).collect()
}

#[test]
fn sign_constants_for_two_edges_in_the_plane() {
    let p = sign_parities(2, &[1, 1]).unwrap();
    assert_eq!(p.c1, 11);
    assert_eq!((p.c1_parity, p.c2_parity, p.c3_parity), (1, 0, 0));
    assert_eq!(p.c1 + p.c2 + p.c3 + 1, 12);
    assert_eq!(p.closing_parity(2, 2), 0);
}

#[test]
fn single_set_has_no_shuffle_sign() {
    for d in 1..6 {
        for r in 0..=d {
            let calc = SignCalc::new(d, vec![r]).unwrap();
            assert_eq!(calc.c3(), 0);
            assert_eq!(calc.c1(), 2 * (d * r) as i64);
        }
    }
}

#[test]
fn invalid_sign_arguments() {
    assert!(SignCalc::new(3, vec![4]).is_err());
    assert!(SignCalc::new(3, vec![]).is_err());
}

#[test]
fn gram_volume_of_a_parallelogram() {
    let v = [Vector::from_vec(vec![2.0, 0.0, 0.0]), Vector::from_vec(vec![1.0, 3.0, 0.0])];
    assert_abs_diff_eq!(gram_volume(&v).unwrap(), 6.0, epsilon = 1e-13);
}

#[test]
fn bracket_of_orthogonal_and_dependent_complements() {
    let e = |i: usize| Vector::from_fn(3, |j, _| if i == j { 1.0 } else { 0.0 });
    let xy = Subspace::span(3, &[e(0), e(1)]).unwrap();
    let yz = Subspace::span(3, &[e(1), e(2)]).unwrap();
    let xz = Subspace::span(3, &[e(0), e(2)]).unwrap();
    assert_abs_diff_eq!(bracket(&[xy.clone(), yz.clone(), xz], 3).unwrap(), 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(bracket(&[xy.clone(), xy.clone()], 3).unwrap(), 0.0, epsilon = 1e-14);
    assert!(bracket(&[Subspace::zero(3), xy], 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_volume_matches_determinant(seed in any::<u64>(), d in 1usize..7, extra in 0usize..3) {
        let mut rng = corpus::rng(seed);
        let n = d.saturating_sub(extra).max(1);
        let v = vectors(&mut rng, d, n);
        let m = DMatrix::from_columns(&v);
        let det = (m.transpose() * &m).determinant();
        prop_assert!((gram_volume(&v).unwrap() - det.max(0.0).sqrt()).abs() <= 1e-9 * det.sqrt().max(1.0));
    }

    #[test]
    fn hodge_star_complements_and_normalizes(seed in any::<u64>(), d in 1usize..7, g in 0usize..7) {
        let g = g.min(d);
        let mut rng = corpus::rng(seed);
        let alpha = SimpleMultivector::new(d, vectors(&mut rng, d, g)).unwrap();
        let star = alpha.hodge_star();
        prop_assert_eq!(star.grade(), d - g);
        let pairing = alpha.wedge(&star).unwrap().volume_pairing().unwrap();
        let n2 = alpha.norm().powi(2);
        prop_assert!((pairing - n2).abs() <= 1e-9 * n2.max(1.0));
        for a in alpha.vectors() {
            for b in star.vectors() {
                prop_assert!(a.dot(b).abs() <= 1e-9 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn p_product_magnitude_is_the_bracket(seed in any::<u64>(), d in 2usize..7, p in 2usize..5) {
        let mut rng = corpus::rng(seed);
        let mut codims = vec![0usize; p];
        for _ in 0..d {
            codims[rng.random_range(0..p)] += 1;
        }
        let spans: Vec<Vec<Vector>> = codims.iter().map(|&c| vectors(&mut rng, d, d - c)).collect();
        let units: Vec<SimpleMultivector> = spans
            .iter()
            .map(|s| SimpleMultivector::with_coeff(d, 1.0 / gram_volume(s).unwrap(), s.clone()).unwrap())
            .collect();
        let subspaces: Vec<Subspace> = spans.iter().map(|s| Subspace::span(d, s).unwrap()).collect();
        let b = bracket(&subspaces, d).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&b));
        prop_assert!((p_product(&units).unwrap().abs() - b).abs() <= 1e-10);
    }

    #[test]
    fn bracket_ignores_the_order_of_arguments(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = corpus::rng(seed);
        let a = Subspace::span(d, &vectors(&mut rng, d, d - 1)).unwrap();
        let b = Subspace::span(d, &vectors(&mut rng, d, d - 1)).unwrap();
        let ab = bracket(&[a.clone(), b.clone()], d).unwrap();
        let ba = bracket(&[b, a], d).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
    }

    #[test]
    fn complement_is_orthogonal_and_complementary(seed in any::<u64>(), d in 1usize..7, n in 0usize..7) {
        let mut rng = corpus::rng(seed);
        let l = Subspace::span(d, &vectors(&mut rng, d, n.min(d))).unwrap();
        let c = l.complement();
        prop_assert_eq!(l.dim() + c.dim(), d);
        let x = gaussian(&mut rng, d);
        let back = l.project(&x) + c.project(&x);
        prop_assert!((back - x).amax() <= 1e-10);
    }
}
