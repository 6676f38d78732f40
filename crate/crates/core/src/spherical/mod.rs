//! Spherical measures, projection moments and the simplex weight.
//!
//! Normalizing constants: `omega(n) = 2 π^{n/2} / Γ(n/2)` is the surface
//! area of `S^{n-1}` and `kappa(n) = π^{n/2} / Γ(1 + n/2)` the volume of the
//! unit ball in `R^n`.

mod measure;
mod region;
mod weight;

pub use measure::{cone_spherical_measure, measure_path, MeasurePath};
pub use region::SphericalRegion;
pub use weight::{mu_weight, simplex_jacobian, tangent_frame};

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{validation, Error, Result};
use crate::montecarlo::{run_batches, Estimate, McConfig};

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn omega(n: usize) -> f64 {
    assert!(n >= 1, "omega(n) needs n >= 1");
    if n > 300 {
        let h = n as f64 / 2.0;
        return (std::f64::consts::LN_2 + h * std::f64::consts::PI.ln() - ln_gamma(h)).exp();
    }
    // ω_{n+2} = 2π ω_n / n
    let mut w = if n % 2 == 1 { 2.0 } else { std::f64::consts::TAU };
    let mut j = 2 - n % 2;
    while j < n {
        w *= std::f64::consts::TAU / j as f64;
        j += 2;
    }
    w
}

/// Volume of the unit ball in `R^n`.
pub fn kappa(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        omega(n) / n as f64
    }
}

fn check_moment_args(d: usize, l: usize, p: f64) -> Result<()> {
    if !(1 <= l && l < d) {
        return validation(format!("need 1 <= l <= d - 1, got d = {d}, l = {l}"));
    }
    if !p.is_finite() {
        return validation("moment exponent must be finite");
    }
    if p + l as f64 <= 0.0 {
        return Err(Error::DivergentIntegral(p + l as f64));
    }
    Ok(())
}

/// `∫_{S^{d-1}} |p_L u|^p dH^{d-1}(u)` for an `l`-dimensional subspace `L`.
pub fn projection_moment(d: usize, l: usize, p: f64) -> Result<f64> {
    check_moment_args(d, l, p)?;
    let (df, lf) = (d as f64, l as f64);
    let log = omega(l).ln() + omega(d - l).ln() + ln_gamma((df - lf) / 2.0) + ln_gamma((p + lf) / 2.0)
        - std::f64::consts::LN_2
        - ln_gamma((df + p) / 2.0);
    Ok(log.exp())
}

/// Monte Carlo estimate of the projection moment with `L = span(e_1..e_l)`.
///
/// For `p >= 0` directions are uniform (normalized Gaussians). For negative
/// `p` the estimator is heavy-tailed, so directions are drawn with density
/// proportional to `|p_L u|^{-a}`, `a = max(0, -p - (p + l)/4)`, obtained by
/// normalizing `(Y, X)` with `|Y|^2 ~ Gamma((l - a)/2, 2)`, uniform
/// direction for `Y` and `X` standard normal in `R^{d-l}`. The proposal's
/// total mass follows from the Gaussian integral of `|y|^{-a} e^{-|x|^2/2}`
/// in Cartesian and in polar coordinates.
pub fn mc_projection_moment(d: usize, l: usize, p: f64, cfg: &McConfig) -> Result<Estimate> {
    check_moment_args(d, l, p)?;
    cfg.validate()?;
    let (df, lf) = (d as f64, l as f64);
    let a = if p < 0.0 { (-p - (p + lf) / 4.0).max(0.0) } else { 0.0 };
    let mass = omega(l) * std::f64::consts::PI.powf((df - lf) / 2.0) * gamma((lf - a) / 2.0)
        / gamma((df - a) / 2.0);
    let radius2 = Gamma::new((lf - a) / 2.0, 2.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let stats = run_batches(cfg, |rng, count, stats| {
        let mut y = vec![0.0; l];
        for _ in 0..count {
            let ry = if a == 0.0 {
                for v in y.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
                y.iter().map(|v| v * v).sum::<f64>().sqrt()
            } else {
                radius2.sample(rng).sqrt()
            };
            let mut rest = 0.0;
            for _ in l..d {
                let x: f64 = rng.sample(StandardNormal);
                rest += x * x;
            }
            let proj = ry / (ry * ry + rest).sqrt();
            stats.push(proj.powf(p + a));
        }
    });
    Ok(stats.estimate(mass, cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn constants() {
        assert_relative_eq!(omega(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(omega(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(omega(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(omega(4), 2.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(kappa(0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(kappa(2), PI, max_relative = 1e-15);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-15);
        for n in 1..20 {
            assert_relative_eq!(omega(n), n as f64 * kappa(n), max_relative = 1e-13);
        }
    }

    #[test]
    fn moments_closed_form() {
        assert_relative_eq!(projection_moment(2, 1, 1.0).unwrap(), 4.0, max_relative = 1e-14);
        assert_relative_eq!(projection_moment(2, 1, 0.0).unwrap(), 2.0 * PI, max_relative = 1e-14);
        assert!(matches!(projection_moment(3, 2, -2.0), Err(Error::DivergentIntegral(_))));
        assert!(projection_moment(3, 3, 1.0).is_err());
        let q = crate::quadrature::integrate(|t: f64| t.cos().abs().powf(0.5), 0.0, 2.0 * PI, 1e-12, 1e-14, 500);
        assert_relative_eq!(projection_moment(2, 1, 0.5).unwrap(), q.value, max_relative = 1e-8);
    }

    #[test]
    fn moments_monte_carlo() {
        let cfg = McConfig::new(100_000, 5);
        for (d, l, p) in [(2, 1, 1.0), (2, 1, 0.0), (4, 3, -1.5), (5, 4, -2.5)] {
            let exact = projection_moment(d, l, p).unwrap();
            let est = mc_projection_moment(d, l, p, &cfg).unwrap();
            assert!(est.sigma_distance(exact) < 4.0, "{d} {l} {p}: {est:?} vs {exact}");
        }
    }
}
