use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use super::{omega, SphericalRegion};
use crate::error::{validation, Result};
use crate::montecarlo::{run_batches, Estimate, McConfig};
use crate::multilinear::{gram_volume_unchecked, orthonormalize, Subspace};
use crate::quadrature::integrate;
use crate::{Matrix, Vector};

/// Singular-value cutoff below which a tuple of directions is dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

const QUAD_REL_TOL: f64 = 1e-10;

fn smallest_singular_value(u: &[Vector]) -> f64 {
    let d = u[0].len();
    if u.len() > d {
        return 0.0;
    }
    let m = Matrix::from_columns(u);
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_directions(u: &[Vector], r: &[usize]) -> Result<(usize, usize)> {
    let Some(first) = u.first() else {
        return validation("need at least one direction");
    };
    let d = first.len();
    if u.iter().any(|v| v.len() != d) {
        return validation("directions have different dimensions");
    }
    if r.len() != u.len() {
        return validation("one order per direction is required");
    }
    if r.iter().any(|&ri| ri >= d) {
        return validation(format!("orders must lie in 0..={}", d - 1));
    }
    let q = u.len();
    let total: usize = r.iter().sum();
    if total < (q - 1) * d {
        return validation(format!("order sum {total} is below (q - 1) d = {}", (q - 1) * d));
    }
    Ok((d, total - (q - 1) * d))
}

/// `μ_r(u_1, ..., u_q; C)`, the integral over `S^{q-1}_+` of
/// `1_C(ũ/|ũ|) Π t_i^{d - r_i} |ũ(t)|^{-(d-k)}` divided by `ω_{d-k}`, where
/// `ũ(t) = Σ t_i u_i`. Zero for linearly dependent directions.
///
/// `q = 2` and `q = 3` use adaptive Gauss–Kronrod quadrature in angular
/// coordinates (exact estimate, zero standard error); larger `q` use Monte
/// Carlo on the positive orthant of the sphere.
pub fn mu_weight(u: &[Vector], r: &[usize], region: &SphericalRegion, cfg: &McConfig) -> Result<Estimate> {
    let (d, k) = check_directions(u, r)?;
    let q = u.len();
    if smallest_singular_value(u) < DEPENDENCE_TOL {
        return Ok(Estimate::exact(0.0));
    }
    let m = d - k;
    let norm = omega(m);
    let integrand = |t: &[f64]| -> f64 {
        let mut v = Vector::zeros(d);
        let mut weight = 1.0;
        for ((ui, &ti), &ri) in u.iter().zip(t).zip(r) {
            v.axpy(ti, ui, 1.0);
            weight *= ti.powi((d - ri) as i32);
        }
        let len = v.norm();
        if weight == 0.0 || !region.contains(&(&v / len)) {
            return 0.0;
        }
        weight * len.powi(-(m as i32))
    };
    match q {
        1 => Ok(Estimate::exact(integrand(&[1.0]) / norm)),
        2 => {
            let res = integrate(
                |th: f64| integrand(&[th.cos(), th.sin()]),
                0.0,
                FRAC_PI_2,
                QUAD_REL_TOL,
                1e-300,
                4000,
            );
            Ok(Estimate::exact(res.value / norm))
        }
        3 => {
            let outer = integrate(
                |phi: f64| {
                    let (s, c) = phi.sin_cos();
                    let inner = integrate(
                        |th: f64| integrand(&[s * th.cos(), s * th.sin(), c]),
                        0.0,
                        FRAC_PI_2,
                        QUAD_REL_TOL,
                        1e-300,
                        400,
                    );
                    inner.value * s
                },
                0.0,
                FRAC_PI_2,
                QUAD_REL_TOL,
                1e-300,
                400,
            );
            Ok(Estimate::exact(outer.value / norm))
        }
        _ => {
            cfg.validate()?;
            let patch = omega(q) / 2f64.powi(q as i32);
            let stats = run_batches(cfg, |rng, count, stats| {
                let mut t = vec![0.0; q];
                for _ in 0..count {
                    let mut n = 0.0;
                    for ti in t.iter_mut() {
                        let g: f64 = rng.sample(rand_distr::StandardNormal);
                        *ti = g.abs();
                        n += g * g;
                    }
                    let n = n.sqrt();
                    t.iter_mut().for_each(|ti| *ti /= n);
                    stats.push(integrand(&t));
                }
            });
            Ok(stats.estimate(patch / norm, cfg.seed))
        }
    }
}

/// Orthonormal basis of `lin ∩ u^⊥`, the tangent space at `u` of the
/// spherical section of a cone with linear hull `lin`.
pub fn tangent_frame(lin: &Subspace, u: &Vector) -> Vec<Vector> {
    let projected: Vec<Vector> = lin
        .basis()
        .iter()
        .map(|b| b - u * (u.dot(b) / u.norm_squared()))
        .filter(|v| v.norm() > DEPENDENCE_TOL)
        .collect();
    orthonormalize(&projected)
}

/// Jacobian of `(u_1, ..., u_q, t) -> ũ(t)/|ũ(t)|` from the product of
/// spherical cone sections and `S^{q-1}_+` onto the section of the summed
/// cone: `|ũ|^{-(d-k)} Π t_j^{d-1-r_j}` times the Gram volume of all frame
/// vectors followed by `u_1, ..., u_q`. `frames[j]` must hold the
/// `d - 1 - r_j` tangent vectors at `u_j`.
pub fn simplex_jacobian(u: &[Vector], t: &[f64], r: &[usize], frames: &[Vec<Vector>]) -> Result<f64> {
    let (d, k) = check_directions(u, r)?;
    if t.len() != u.len() || frames.len() != u.len() {
        return validation("need one weight and one frame per direction");
    }
    for (j, f) in frames.iter().enumerate() {
        if f.len() != d - 1 - r[j] || f.iter().any(|a| a.len() != d) {
            return validation(format!("frame {j} must hold {} vectors of dimension {d}", d - 1 - r[j]));
        }
    }
    if t.iter().any(|&x| x < 0.0) {
        return validation("simplex weights must be nonnegative");
    }
    if smallest_singular_value(u) < DEPENDENCE_TOL {
        return Ok(0.0);
    }
    let mut v = Vector::zeros(d);
    let mut factor = 1.0;
    for ((uj, &tj), &rj) in u.iter().zip(t).zip(r) {
        v.axpy(tj, uj, 1.0);
        factor *= tj.powi((d - 1 - rj) as i32);
    }
    if factor == 0.0 {
        return Ok(0.0);
    }
    let mut all: Vec<Vector> = frames.iter().flatten().cloned().collect();
    all.extend(u.iter().cloned());
    Ok(v.norm().powi(-((d - k) as i32)) * factor * gram_volume_unchecked(&all))
}
