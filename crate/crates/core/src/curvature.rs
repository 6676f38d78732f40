//! Curvature measures `C_k(P; B × C)` of a single polytope.
//!
//! For `k < d`,
//! `C_k(P; B × C) = Σ_{F ∈ F_k(P)} γ(F, P; C) H^k(F ∩ B)` where the external
//! angle `γ(F, P; C) = H^{d-1-k}(N(P, F) ∩ S^{d-1} ∩ C) / ω_{d-k}`; for
//! `k = d` the measure is `H^d(P ∩ B)` and `C` is ignored. With this
//! normalization `C_k(P; R^d × S^{d-1})` is the intrinsic volume `V_k(P)` and
//! the Steiner polynomial reads `vol(P + r B^d) = Σ_k κ_{d-k} r^{d-k} V_k(P)`.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::montecarlo::{pairwise_sum, run_batches, Estimate, McConfig};
use crate::polytope::{face_measure, Face, Polytope, Region};
use crate::spherical::{cone_spherical_measure, kappa, omega, SphericalRegion};
use crate::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureQuery {
    pub k: usize,
    #[serde(default = "all_region")]
    pub region: Region,
    #[serde(default = "all_directions")]
    pub directions: SphericalRegion,
}

fn all_region() -> Region {
    Region::All
}

fn all_directions() -> SphericalRegion {
    SphericalRegion::All
}

impl CurvatureQuery {
    pub fn total(k: usize) -> Self {
        Self {
            k,
            region: Region::All,
            directions: SphericalRegion::All,
        }
    }
}

/// External angle of `P` at `F`, restricted to directions in `C`.
pub fn external_angle(p: &Polytope, face: &Face, directions: &SphericalRegion, cfg: &McConfig) -> Result<Estimate> {
    let d = p.dim();
    if face.dim >= d {
        return Ok(Estimate::exact(0.0));
    }
    let cone = p.normal_cone(face);
    let m = cone_spherical_measure(&cone, directions, cfg)?;
    let w = omega(d - face.dim);
    Ok(Estimate {
        value: m.value / w,
        std_error: m.std_error / w,
        ..m
    })
}

/// Combines per-term estimates: pairwise sum of values, errors in quadrature.
pub(crate) fn combine(terms: &[(f64, f64)], samples: u64, seed: Option<u64>) -> Estimate {
    let values: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let var: Vec<f64> = terms.iter().map(|t| t.1 * t.1).collect();
    Estimate {
        value: pairwise_sum(&values),
        std_error: pairwise_sum(&var).sqrt(),
        samples,
        seed,
    }
}

/// `C_k(P; B × C)`.
pub fn curvature_measure(p: &Polytope, query: &CurvatureQuery, cfg: &McConfig) -> Result<Estimate> {
    let d = p.dim();
    if query.k > d {
        return validation(format!("order k = {} exceeds the dimension {d}", query.k));
    }
    let region = query.region.clone().validate(d)?;
    let directions = query.directions.clone().validate(d)?;
    if query.k == d {
        return Ok(Estimate::exact(face_measure(p, &p.faces(d)[0], &region)));
    }
    let mut terms = Vec::with_capacity(p.faces(query.k).len());
    let mut samples = 0;
    let mut seed = None;
    for (i, face) in p.faces(query.k).iter().enumerate() {
        let h = face_measure(p, face, &region);
        if h == 0.0 {
            continue;
        }
        let g = external_angle(p, face, &directions, &cfg.derived(i as u64))?;
        samples += g.samples;
        seed = seed.or(g.seed.map(|_| cfg.seed));
        terms.push((g.value * h, g.std_error * h));
    }
    Ok(combine(&terms, samples, seed))
}

/// `V_0(P), ..., V_d(P)`.
pub fn intrinsic_volumes(p: &Polytope, cfg: &McConfig) -> Result<Vec<Estimate>> {
    (0..=p.dim())
        .map(|k| curvature_measure(p, &CurvatureQuery::total(k), cfg))
        .collect()
}

/// Volume of the parallel body `P + r B^d` from the Steiner polynomial.
pub fn steiner_volume(p: &Polytope, r: f64, cfg: &McConfig) -> Result<Estimate> {
    if !(r >= 0.0) || !r.is_finite() {
        return validation("radius must be finite and nonnegative");
    }
    let d = p.dim();
    let terms: Vec<(f64, f64)> = intrinsic_volumes(p, cfg)?
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let c = kappa(d - k) * r.powi((d - k) as i32);
            (c * v.value, c * v.std_error)
        })
        .collect();
    Ok(combine(&terms, 0, None))
}

/// Euclidean distance to a polytope with precomputed face data.
pub struct DistanceOracle {
    dim: usize,
    facets: Vec<(Vec<f64>, f64)>,
    faces: Vec<(Vec<f64>, Vec<Vec<f64>>)>,
    tol: f64,
}

impl DistanceOracle {
    pub fn new(p: &Polytope) -> Self {
        let facets = p
            .halfspaces()
            .map(|h| (h.normal.iter().copied().collect(), h.offset))
            .collect();
        let mut faces = Vec::new();
        for j in (0..p.dim()).rev() {
            for f in p.faces(j) {
                faces.push((
                    f.affine_point.iter().copied().collect(),
                    f.direction.basis().iter().map(|b| b.iter().copied().collect()).collect(),
                ));
            }
        }
        Self {
            dim: p.dim(),
            facets,
            faces,
            tol: p.tolerance(),
        }
    }

    fn inside(&self, x: &[f64]) -> bool {
        self.facets
            .iter()
            .all(|(n, h)| n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= h + self.tol)
    }

    /// `dist(x, P)`; `buf` must have length `d`.
    pub fn distance(&self, x: &[f64], buf: &mut [f64]) -> f64 {
        if self.inside(x) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for (c, basis) in &self.faces {
            // projection onto aff F
            buf.copy_from_slice(c);
            for b in basis {
                let t: f64 = b.iter().zip(x).zip(c).map(|((bi, xi), ci)| bi * (xi - ci)).sum();
                for i in 0..self.dim {
                    buf[i] += t * b[i];
                }
            }
            let dist2: f64 = buf.iter().zip(x).map(|(y, xi)| (y - xi) * (y - xi)).sum();
            if dist2 >= best * best {
                continue;
            }
            if self.inside(buf) {
                best = dist2.sqrt();
            }
        }
        best
    }
}

/// Hit-or-miss estimate of `vol(P + r B^d)` in the bounding box of the
/// parallel body.
pub fn mc_parallel_volume(p: &Polytope, r: f64, cfg: &McConfig) -> Result<Estimate> {
    use rand::Rng;
    if !(r >= 0.0) || !r.is_finite() {
        return validation("radius must be finite and nonnegative");
    }
    cfg.validate()?;
    let d = p.dim();
    let (lo, hi) = p.bounding_box();
    let lo: Vector = lo.add_scalar(-r);
    let hi: Vector = hi.add_scalar(r);
    let box_volume: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
    if !(box_volume > 0.0) {
        return Err(Error::Numerical("empty sampling box".into()));
    }
    let oracle = DistanceOracle::new(p);
    let stats = run_batches(cfg, |rng, count, stats| {
        let mut x = vec![0.0; d];
        let mut buf = vec![0.0; d];
        for _ in 0..count {
            for i in 0..d {
                x[i] = rng.random_range(lo[i]..hi[i]);
            }
            let hit = oracle.distance(&x, &mut buf) <= r;
            stats.push(if hit { 1.0 } else { 0.0 });
        }
    });
    Ok(stats.estimate(box_volume, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::vector;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn total(p: &Polytope, k: usize) -> f64 {
        curvature_measure(p, &CurvatureQuery::total(k), &McConfig::default())
            .unwrap()
            .value
    }

    #[test]
    fn square_and_cube_totals() {
        let sq = corpus::unit_square();
        assert_abs_diff_eq!(total(&sq, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(total(&sq, 1), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(total(&sq, 2), 1.0, epsilon = 1e-14);
        let cube = corpus::unit_cube();
        assert_abs_diff_eq!(total(&cube, 0), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(total(&cube, 1), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(total(&cube, 2), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn steiner_values() {
        let cfg = McConfig::default();
        let sq = corpus::unit_square();
        assert_abs_diff_eq!(steiner_volume(&sq, 1.0, &cfg).unwrap().value, 5.0 + PI, epsilon = 1e-13);
        let cube = corpus::unit_cube();
        let expect = 1.0 + 6.0 * 0.5 + 3.0 * PI * 0.25 + 4.0 * PI / 3.0 * 0.125;
        assert_abs_diff_eq!(steiner_volume(&cube, 0.5, &cfg).unwrap().value, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(steiner_volume(&cube, 0.0, &cfg).unwrap().value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn localized_measures() {
        let sq = corpus::unit_square();
        let cfg = McConfig::default();
        let q = CurvatureQuery {
            k: 1,
            region: Region::boxed(&[-1.0, -1.0], &[0.5, 2.0]),
            directions: SphericalRegion::All,
        };
        // left edge (1/2) + halves of top and bottom edges (1/4 each)
        assert_abs_diff_eq!(curvature_measure(&sq, &q, &cfg).unwrap().value, 1.0, epsilon = 1e-12);
        let q = CurvatureQuery {
            k: 0,
            region: Region::All,
            directions: SphericalRegion::cap(vector(&[1.0, 0.0]), 0.25).unwrap(),
        };
        // two vertices with normal arcs touching e1, each contributing 0.25 / 2π
        assert_abs_diff_eq!(curvature_measure(&sq, &q, &cfg).unwrap().value, 0.5 / (2.0 * PI), epsilon = 1e-13);
    }

    #[test]
    fn distance_oracle() {
        let cube = corpus::unit_cube();
        let o = DistanceOracle::new(&cube);
        let mut buf = vec![0.0; 3];
        assert_eq!(o.distance(&[0.5, 0.5, 0.5], &mut buf), 0.0);
        assert_abs_diff_eq!(o.distance(&[1.5, 0.5, 0.5], &mut buf), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(o.distance(&[2.0, 2.0, 0.5], &mut buf), 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(o.distance(&[2.0, 2.0, 2.0], &mut buf), 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn parallel_volume_monte_carlo() {
        let sq = corpus::unit_square();
        let cfg = McConfig::new(100_000, 1);
        let e = mc_parallel_volume(&sq, 0.5, &cfg).unwrap();
        assert!(e.sigma_distance(1.0 + 2.0 + PI / 4.0) < 4.0, "{e:?}");
    }
}
