use approx::assert_abs_diff_eq;
use mixcurv::corpus;
use mixcurv::polytope::{face_measure, HalfSpace, Intersection, Polytope, Region};
use mixcurv::{vector, Error};
use proptest::prelude::*;
use rand::Rng;

fn random_body(seed: u64, three: bool) -> Polytope {
    let mut rng = corpus::rng(seed);
    if three {
        corpus::random_polytope3(&mut rng, 10)
    } else {
        corpus::random_polygon(&mut rng, 8)
    }
}

#[test]
fn cube_lattice() {
    let c = corpus::unit_cube();
    assert_eq!(c.f_vector(), vec![8, 12, 6, 1]);
    assert_abs_diff_eq!(c.volume(), 1.0, epsilon = 1e-14);
    for f in c.faces(2) {
        assert_abs_diff_eq!(f.volume, 1.0, epsilon = 1e-14);
    }
}

#[test]
fn four_cube_lattice() {
    let c = corpus::hypercube(4);
    assert_eq!(c.f_vector(), vec![16, 32, 24, 8, 1]);
    assert_abs_diff_eq!(c.volume(), 1.0, epsilon = 1e-13);
}

#[test]
fn simplex_volume() {
    assert_abs_diff_eq!(corpus::standard_simplex(3).volume(), 1.0 / 6.0, epsilon = 1e-14);
}

#[test]
fn halfspace_intersections() {
    let sq = corpus::unit_square();
    let moved = sq.translate(&vector(&[0.5, 0.5])).unwrap();
    let i = sq.intersect(&moved).unwrap().polytope().unwrap();
    assert_abs_diff_eq!(i.volume(), 0.25, epsilon = 1e-14);
    let far = sq.translate(&vector(&[3.0, 0.0])).unwrap();
    assert!(matches!(sq.intersect(&far).unwrap(), Intersection::Empty));
    let touching = sq.translate(&vector(&[1.0, 0.0])).unwrap();
    assert!(matches!(sq.intersect(&touching).unwrap(), Intersection::Degenerate(1)));
}

#[test]
fn unbounded_and_malformed_input() {
    let hs = vec![HalfSpace::new(vector(&[1.0, 0.0]), 1.0).unwrap()];
    assert!(matches!(Polytope::from_halfspaces(2, &hs), Err(Error::Validation(_))));
    let wedge = vec![
        HalfSpace::new(vector(&[-1.0, 0.0]), 0.0).unwrap(),
        HalfSpace::new(vector(&[0.0, -1.0]), 0.0).unwrap(),
    ];
    assert!(matches!(Polytope::from_halfspaces(2, &wedge), Err(Error::Validation(_))));
    let mut triangle = wedge.clone();
    triangle.push(HalfSpace::new(vector(&[1.0, 1.0]), 1.0).unwrap());
    let t = Polytope::from_halfspaces(2, &triangle).unwrap().polytope().unwrap();
    assert_abs_diff_eq!(t.volume(), 0.5, epsilon = 1e-14);
    triangle.push(HalfSpace::new(vector(&[1.0, 1.0]), -1.0).unwrap());
    assert!(matches!(Polytope::from_halfspaces(2, &triangle).unwrap(), Intersection::Empty));
    assert!(matches!(Polytope::from_json("{\"dim\": 2"), Err(Error::Json(_))));
    let flat = "{\"dim\": 2, \"vertices\": [[0,0],[1,0],[2,0]]}";
    assert!(Polytope::from_json(flat).is_err());
}

#[test]
fn face_measure_in_a_box() {
    let c = corpus::unit_cube();
    let b = Region::boxed(&[0.5, -1.0, -1.0], &[2.0, 2.0, 2.0]);
    let total: f64 = c.faces(1).iter().map(|e| face_measure(&c, e, &b)).sum();
    // four edges parallel to x are halved, the four x = 1 edges of the other directions stay whole
    assert_abs_diff_eq!(total, 4.0 * 0.5 + 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(face_measure(&c, &c.faces(3)[0], &b), 0.5, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_relation(seed in any::<u64>(), three in any::<bool>()) {
        let p = random_body(seed, three);
        let chi: i64 = p.f_vector().iter().enumerate().map(|(j, &f)| if j % 2 == 0 { f as i64 } else { -(f as i64) }).sum();
        prop_assert_eq!(chi, 1);
    }

    #[test]
    fn normal_cone_dimension_complements_face(seed in any::<u64>(), three in any::<bool>()) {
        let p = random_body(seed, three);
        for j in 0..=p.dim() {
            for f in p.faces(j) {
                prop_assert_eq!(p.normal_cone(f).linear_hull().dim() + f.dim, p.dim());
            }
        }
    }

    #[test]
    fn intersection_volume_bounds(seed in any::<u64>(), three in any::<bool>()) {
        let p = random_body(seed, three);
        let q = random_body(seed.wrapping_add(1), three);
        let (vp, vq) = (p.volume(), q.volume());
        match p.intersect(&q).unwrap() {
            Intersection::Polytope(i) => {
                prop_assert!(i.volume() <= vp.min(vq) * (1.0 + 1e-9));
                let again = i.intersect(&i).unwrap().polytope().unwrap();
                prop_assert!((again.volume() - i.volume()).abs() <= 1e-10 * i.volume().max(1.0));
            }
            _ => {}
        }
        let same = p.intersect(&p).unwrap().polytope().unwrap();
        prop_assert_eq!(same.f_vector(), p.f_vector());
        prop_assert!((same.volume() - vp).abs() <= 1e-10 * vp.max(1.0));
    }

    #[test]
    fn rigid_motions_preserve_volume_and_lattice(seed in any::<u64>(), three in any::<bool>()) {
        let p = random_body(seed, three);
        let mut rng = corpus::rng(seed ^ 1);
        let rot = corpus::random_rotation(&mut rng, p.dim());
        let z = mixcurv::Vector::from_fn(p.dim(), |_, _| rng.random_range(-3.0..3.0));
        let moved = p.rotate(&rot).unwrap().translate(&z).unwrap();
        prop_assert_eq!(moved.f_vector(), p.f_vector());
        prop_assert!((moved.volume() - p.volume()).abs() <= 1e-10 * p.volume().max(1.0));
        let lambda = rng.random_range(0.2..3.0);
        let scaled = p.scale(lambda).unwrap();
        prop_assert!((scaled.volume() - lambda.powi(p.dim() as i32) * p.volume()).abs() <= 1e-9 * scaled.volume().max(1.0));
    }

    #[test]
    fn minkowski_sum_contains_both_shifts(seed in any::<u64>()) {
        let p = random_body(seed, false);
        let q = random_body(seed ^ 7, false);
        let s = p.minkowski_sum(&q).unwrap();
        prop_assert!(s.volume() >= p.volume() + q.volume());
        for a in p.vertices() {
            for b in q.vertices() {
                prop_assert!(s.contains(&(a + b)));
            }
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), three in any::<bool>()) {
        let p = random_body(seed, three);
        let back = Polytope::from_json(&p.to_json()).unwrap();
        prop_assert_eq!(back.f_vector(), p.f_vector());
        prop_assert!((back.volume() - p.volume()).abs() <= 1e-12 * p.volume().max(1.0));
    }

    #[test]
    fn face_measure_is_additive_over_a_split(seed in any::<u64>(), three in any::<bool>(), t in 0.1f64..0.9) {
        let p = random_body(seed, three);
        let (lo, hi) = p.bounding_box();
        let d = p.dim();
        let cut = lo[0] + t * (hi[0] - lo[0]);
        let mut upper_a: Vec<f64> = hi.iter().map(|x| x + 1.0).collect();
        upper_a[0] = cut;
        let mut lower_b: Vec<f64> = lo.iter().map(|x| x - 1.0).collect();
        lower_b[0] = cut;
        let a = Region::boxed(&lo.iter().map(|x| x - 1.0).collect::<Vec<_>>(), &upper_a);
        let b = Region::boxed(&lower_b, &hi.iter().map(|x| x + 1.0).collect::<Vec<_>>());
        for j in 1..=d {
            for f in p.faces(j) {
                let whole = face_measure(&p, f, &Region::All);
                let parts = face_measure(&p, f, &a) + face_measure(&p, f, &b);
                prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0));
                prop_assert!((whole - f.volume).abs() <= 1e-9 * whole.max(1.0));
            }
        }
    }
}
