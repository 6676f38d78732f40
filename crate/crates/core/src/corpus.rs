//! Standard and random test bodies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::montecarlo::gaussian_vector;
use crate::polytope::{HalfSpace, Polytope};
use crate::{Matrix, Vector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Axis-parallel box `[lower, upper]` for any dimension.
pub fn cuboid(lower: &[f64], upper: &[f64]) -> Polytope {
    let d = lower.len();
    assert_eq!(d, upper.len());
    let vertices: Vec<Vector> = (0..1usize << d)
        .map(|mask| {
            Vector::from_fn(d, |i, _| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
        })
        .collect();
    let mut facets = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut n = Vector::zeros(d);
        n[i] = 1.0;
        facets.push(HalfSpace {
            normal: n.clone(),
            offset: upper[i],
        });
        facets.push(HalfSpace {
            normal: -n,
            offset: -lower[i],
        });
    }
    Polytope::from_combinatorial(d, vertices, facets, None).expect("boxes are valid")
}

pub fn hypercube(d: usize) -> Polytope {
    cuboid(&vec![0.0; d], &vec![1.0; d])
}

pub fn unit_square() -> Polytope {
    hypercube(2)
}

pub fn unit_cube() -> Polytope {
    hypercube(3)
}

/// `conv{0, e_1, ..., e_d}`.
pub fn standard_simplex(d: usize) -> Polytope {
    let mut vertices = vec![Vector::zeros(d)];
    let mut facets = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut e = Vector::zeros(d);
        e[i] = 1.0;
        vertices.push(e.clone());
        facets.push(HalfSpace {
            normal: -e,
            offset: 0.0,
        });
    }
    facets.push(HalfSpace::new(Vector::from_element(d, 1.0), 1.0).expect("nonzero normal"));
    Polytope::from_combinatorial(d, vertices, facets, None).expect("simplex is valid")
}

/// Convex polygon with between 3 and `max_vertices` vertices, all on a
/// circle of random radius around a random center.
pub fn random_polygon<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> Polytope {
    let max_vertices = max_vertices.max(3);
    loop {
        let n = rng.random_range(3..=max_vertices);
        let radius = rng.random_range(0.5..1.5);
        let center = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let pts: Vec<Vector> = angles
            .iter()
            .map(|a| Vector::from_column_slice(&[center[0] + radius * a.cos(), center[1] + radius * a.sin()]))
            .collect();
        if let Ok(p) = Polytope::from_vertices(&pts) {
            if p.volume() > 0.05 * radius * radius && min_edge(&p) > 1e-3 {
                return p;
            }
        }
    }
}

/// Hexagon with jittered vertex angles on the unit circle.
pub fn random_hexagon<R: Rng + ?Sized>(rng: &mut R) -> Polytope {
    let step = std::f64::consts::TAU / 6.0;
    let pts: Vec<Vector> = (0..6)
        .map(|i| {
            let a = step * (i as f64 + rng.random_range(-0.3..0.3));
            Vector::from_column_slice(&[a.cos(), a.sin()])
        })
        .collect();
    Polytope::from_vertices(&pts).expect("points in convex position")
}

/// Simplex with Gaussian vertices (rejected until reasonably fat).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Polytope {
    loop {
        let pts: Vec<Vector> = (0..=d).map(|_| gaussian_vector(rng, d)).collect();
        if let Ok(p) = Polytope::from_vertices(&pts) {
            if p.f_vector()[0] == d + 1 && p.volume() > 0.05 {
                return p;
            }
        }
    }
}

/// Polytope in `R^3` spanned by 4 to `max_vertices` random points on a sphere.
pub fn random_polytope3<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize) -> Polytope {
    let max_vertices = max_vertices.max(4);
    loop {
        let n = rng.random_range(4..=max_vertices);
        let radius = rng.random_range(0.6..1.4);
        let pts: Vec<Vector> = (0..n)
            .map(|_| crate::montecarlo::sphere_point(rng, 3) * radius)
            .collect();
        if let Ok(p) = Polytope::from_vertices(&pts) {
            if p.volume() > 0.1 * radius.powi(3) && min_edge(&p) > 1e-2 {
                return p;
            }
        }
    }
}

fn min_edge(p: &Polytope) -> f64 {
    p.faces(1).iter().map(|e| e.volume).fold(f64::INFINITY, f64::min)
}

/// Haar-random rotation (determinant +1).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Matrix {
    loop {
        let cols: Vec<Vector> = (0..d).map(|_| gaussian_vector(rng, d)).collect();
        let m = Matrix::from_columns(&cols);
        let qr = m.qr();
        let r = qr.r();
        if (0..d).any(|i| r[(i, i)].abs() < 1e-8) {
            continue;
        }
        let mut q = qr.q();
        for i in 0..d {
            if r[(i, i)] < 0.0 {
                let col = -q.column(i);
                q.set_column(i, &col);
            }
        }
        if q.determinant() < 0.0 {
            let col = -q.column(0);
            q.set_column(0, &col);
        }
        return q;
    }
}
