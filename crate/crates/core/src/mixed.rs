//! Mixed curvature measures of finitely many polytopes.
//!
//! For orders `r_1, ..., r_q` with `k = Σ r_i - (q - 1) d` in `0..d`,
//!
//! ```text
//! C_r(P_1..P_q; B × C) = Σ_{F_i ∈ F_{r_i}(P_i)} γ(F; C) ⟦F_1, ..., F_q⟧ Π H^{r_i}(F_i ∩ B_i)
//! γ(F; C) = H^{d-1-k}((N(P_1, F_1) + ... + N(P_q, F_q)) ∩ S^{d-1} ∩ C) / ω_{d-k}
//! ```
//!
//! An index with `r_i = d` ranges over the single face `P_i` itself: its
//! normal cone is `{0}` and its orthogonal complement is trivial, so it
//! only contributes the factor `H^d(P_i ∩ B_i)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::combine;
use crate::error::{validation, Error, Result};
use crate::montecarlo::{Estimate, McConfig};
use crate::multilinear::gram_volume_unchecked;
use crate::polytope::{face_measure, PolyhedralCone, Polytope, Region};
use crate::spherical::{cone_spherical_measure, omega, SphericalRegion};
use crate::{Matrix, Vector};

/// Gram volume below which a face tuple counts as degenerate.
pub const BRACKET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedQuery {
    pub orders: Vec<usize>,
    /// One region per body; empty means `R^d` for all.
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default = "all_directions")]
    pub directions: SphericalRegion,
}

fn all_directions() -> SphericalRegion {
    SphericalRegion::All
}

impl MixedQuery {
    pub fn total(orders: &[usize]) -> Self {
        Self {
            orders: orders.to_vec(),
            regions: Vec::new(),
            directions: SphericalRegion::All,
        }
    }
}

/// One face tuple of the face sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    /// Face index within `faces(r_i)` of each body.
    pub faces: Vec<usize>,
    pub bracket: f64,
    pub gamma: f64,
    pub gamma_std_error: f64,
    pub face_measures: Vec<f64>,
    pub product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedMeasureReport {
    pub orders: Vec<usize>,
    pub k: usize,
    pub value: f64,
    pub std_error: f64,
    pub contributions: Vec<Contribution>,
    /// Tuples whose face complements are linearly dependent.
    pub degenerate_tuples_skipped: u64,
    /// Tuples with a vanishing localized face measure.
    pub empty_tuples_skipped: u64,
    pub exact: bool,
}

impl MixedMeasureReport {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.value,
            std_error: self.std_error,
            samples: 0,
            seed: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let q = self.orders.len();
        let mut out = String::new();
        let mut header: Vec<String> = (1..=q).map(|i| format!("face{i}")).collect();
        header.extend(["bracket".into(), "gamma".into(), "gamma_std_error".into()]);
        header.extend((1..=q).map(|i| format!("measure{i}")));
        header.push("product".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for c in &self.contributions {
            let mut row: Vec<String> = c.faces.iter().map(|f| f.to_string()).collect();
            row.push(format!("{:e}", c.bracket));
            row.push(format!("{:e}", c.gamma));
            row.push(format!("{:e}", c.gamma_std_error));
            row.extend(c.face_measures.iter().map(|m| format!("{m:e}")));
            row.push(format!("{:e}", c.product));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Checks the order tuple and returns `k`.
pub fn check_orders(d: usize, orders: &[usize]) -> Result<usize> {
    let q = orders.len();
    if q == 0 {
        return validation("at least one order is required");
    }
    if let Some(r) = orders.iter().find(|&&r| r > d) {
        return validation(format!("order {r} exceeds the dimension {d}"));
    }
    let total: usize = orders.iter().sum();
    if total < (q - 1) * d || total > q * d - 1 {
        return validation(format!(
            "order sum {total} must lie in [{}, {}]",
            (q - 1) * d,
            q * d - 1
        ));
    }
    Ok(total - (q - 1) * d)
}

struct Candidate {
    faces: Vec<usize>,
    bracket: f64,
    measures: Vec<f64>,
}

/// Mixed curvature measure `C_{r_1..r_q}(P_1, ..., P_q; B × C)`.
pub fn mixed_curvature_measure(polys: &[&Polytope], query: &MixedQuery, cfg: &McConfig) -> Result<MixedMeasureReport> {
    let Some(first) = polys.first() else {
        return validation("at least one polytope is required");
    };
    let d = first.dim();
    if polys.iter().any(|p| p.dim() != d) {
        return validation("polytopes live in different dimensions");
    }
    let q = polys.len();
    if query.orders.len() != q {
        return validation(format!("{} orders given for {q} polytopes", query.orders.len()));
    }
    let k = check_orders(d, &query.orders)?;
    let regions: Vec<Region> = if query.regions.is_empty() {
        vec![Region::All; q]
    } else if query.regions.len() == q {
        query
            .regions
            .iter()
            .map(|r| r.clone().validate(d))
            .collect::<Result<_>>()?
    } else {
        return validation(format!("{} regions given for {q} polytopes", query.regions.len()));
    };
    let directions = query.directions.clone().validate(d)?;
    let r = &query.orders;

    // face data per body: complement basis and localized measure
    let complements: Vec<Vec<Vec<Vector>>> = (0..q)
        .map(|i| {
            polys[i]
                .faces(r[i])
                .iter()
                .map(|f| f.direction.complement().basis().to_vec())
                .collect()
        })
        .collect();
    let measures: Vec<Vec<f64>> = (0..q)
        .map(|i| {
            polys[i]
                .faces(r[i])
                .iter()
                .map(|f| face_measure(polys[i], f, &regions[i]))
                .collect()
        })
        .collect();
    let counts: Vec<usize> = measures.iter().map(|m| m.len()).collect();

    let mut candidates = Vec::new();
    let mut degenerate = 0u64;
    let mut empty = 0u64;
    let mut idx = vec![0usize; q];
    let mut stack: Vec<Vector> = Vec::with_capacity(d);
    let mut depth_len = vec![0usize; q + 1];
    let mut depth = 0usize;
    // depth-first odometer with pruning on the partial Gram volume
    loop {
        if depth == q {
            let bracket = gram_volume_unchecked(&stack);
            let m: Vec<f64> = (0..q).map(|i| measures[i][idx[i]]).collect();
            if m.iter().any(|&x| x == 0.0) {
                empty += 1;
            } else {
                candidates.push(Candidate {
                    faces: idx.clone(),
                    bracket,
                    measures: m,
                });
            }
        } else if idx[depth] < counts[depth] {
            stack.truncate(depth_len[depth]);
            stack.extend(complements[depth][idx[depth]].iter().cloned());
            if stack.len() > d || gram_volume_unchecked(&stack) < BRACKET_TOL {
                degenerate += counts[depth + 1..].iter().map(|&c| c as u64).product::<u64>();
                idx[depth] += 1;
                continue;
            }
            depth_len[depth + 1] = stack.len();
            depth += 1;
            if depth < q {
                idx[depth] = 0;
            }
            continue;
        }
        // advance
        if depth == 0 {
            break;
        }
        if depth == q {
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        // exhausted this level
        depth -= 1;
        idx[depth] += 1;
    }

    let norm = omega(d - k);
    let contributions: Vec<Contribution> = candidates
        .into_par_iter()
        .enumerate()
        .map(|(n, c)| {
            let gens: Vec<Vector> = (0..q)
                .flat_map(|i| {
                    let p = polys[i];
                    let face = &p.faces(r[i])[c.faces[i]];
                    p.normal_cone(face).generators().to_vec()
                })
                .collect();
            let cone = PolyhedralCone::new_unchecked(d, gens);
            let (gamma, err) = match cone_spherical_measure(&cone, &directions, &cfg.derived(n as u64)) {
                Ok(e) => (e.value / norm, e.std_error / norm),
                Err(Error::NonPointedCone) => (0.0, 0.0),
                Err(e) => return Err(e),
            };
            let scale = c.bracket * c.measures.iter().product::<f64>();
            Ok(Contribution {
                faces: c.faces,
                bracket: c.bracket,
                gamma,
                gamma_std_error: err,
                face_measures: c.measures,
                product: gamma * scale,
            })
        })
        .collect::<Result<_>>()?;

    let terms: Vec<(f64, f64)> = contributions
        .iter()
        .map(|c| (c.product, c.gamma_std_error * c.bracket * c.face_measures.iter().product::<f64>()))
        .collect();
    let total = combine(&terms, 0, None);
    Ok(MixedMeasureReport {
        orders: r.clone(),
        k,
        value: total.value,
        std_error: total.std_error,
        exact: total.std_error == 0.0,
        contributions,
        degenerate_tuples_skipped: degenerate,
        empty_tuples_skipped: empty,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Mixed volume `V(K_1[α], K_2[d-α])` as `C_{α,d-α}(K_1, -K_2; all) / binom(d, α)`.
pub fn mixed_volume_via_measures(k1: &Polytope, k2: &Polytope, alpha: usize, cfg: &McConfig) -> Result<Estimate> {
    let d = k1.dim();
    if k2.dim() != d {
        return validation("polytopes live in different dimensions");
    }
    if !(1..d).contains(&alpha) {
        return validation(format!("alpha must lie in 1..={}", d - 1));
    }
    let reflected = k2.reflect();
    let report = mixed_curvature_measure(&[k1, &reflected], &MixedQuery::total(&[alpha, d - alpha]), cfg)?;
    let b = binomial(d, alpha);
    Ok(Estimate {
        value: report.value / b,
        std_error: report.std_error / b,
        samples: 0,
        seed: None,
    })
}

/// Mixed volume `V(P[α], Q[d-α])` from volumes of Minkowski sums.
///
/// `vol(λP + μQ) = Σ_i binom(d, i) V(P[i], Q[d-i]) λ^i μ^{d-i}` is sampled at
/// `(λ, μ) = (cos θ_j, sin θ_j)` with `θ_j = (π/2)(j + 1/2)/(d + 1)` and the
/// resulting `(d+1) × (d+1)` system is solved.
pub fn oracle_mixed_volume(p: &Polytope, q: &Polytope, alpha: usize) -> Result<f64> {
    let d = p.dim();
    if q.dim() != d {
        return validation("polytopes live in different dimensions");
    }
    if alpha > d {
        return validation(format!("alpha must lie in 0..={d}"));
    }
    let n = d + 1;
    let mut a = Matrix::zeros(n, n);
    let mut b = Vector::zeros(n);
    for j in 0..n {
        let theta = std::f64::consts::FRAC_PI_2 * (j as f64 + 0.5) / n as f64;
        let (mu, lambda) = theta.sin_cos();
        let sum = p.scale(lambda)?.minkowski_sum(&q.scale(mu)?)?;
        b[j] = sum.volume();
        for i in 0..n {
            a[(j, i)] = binomial(d, i) * lambda.powi(i as i32) * mu.powi((d - i) as i32);
        }
    }
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular mixed-volume fit".into()))?;
    Ok(x[alpha])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use approx::assert_abs_diff_eq;

    fn value(polys: &[&Polytope], orders: &[usize]) -> MixedMeasureReport {
        mixed_curvature_measure(polys, &MixedQuery::total(orders), &McConfig::default()).unwrap()
    }

    #[test]
    fn square_pairs() {
        let sq = corpus::unit_square();
        let r = value(&[&sq, &sq], &[1, 1]);
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
        assert_eq!(r.contributions.len(), 8);
        assert_eq!(r.degenerate_tuples_skipped, 8);
        for c in &r.contributions {
            assert_abs_diff_eq!(c.gamma, 0.25, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(value(&[&sq, &sq], &[2, 1]).value, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(value(&[&sq, &sq], &[0, 2]).value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cube_triples() {
        let c = corpus::unit_cube();
        let r = value(&[&c, &c, &c], &[2, 2, 2]);
        assert_abs_diff_eq!(r.value, 6.0, epsilon = 1e-12);
        assert_eq!(r.contributions.len(), 48);
        assert!(r.exact);
    }

    #[test]
    fn order_validation() {
        let sq = corpus::unit_square();
        let bad = mixed_curvature_measure(&[&sq, &sq], &MixedQuery::total(&[0, 1]), &McConfig::default());
        assert!(matches!(bad, Err(Error::Validation(_))));
        assert!(check_orders(2, &[2, 2]).is_err());
        assert!(check_orders(2, &[3, 0]).is_err());
        assert_eq!(check_orders(3, &[3, 2, 1]).unwrap(), 0);
    }

    #[test]
    fn mixed_volumes() {
        let cfg = McConfig::default();
        let sq = corpus::unit_square();
        let rect = corpus::cuboid(&[0.0, 0.0], &[2.0, 1.0]);
        assert_abs_diff_eq!(mixed_volume_via_measures(&sq, &sq, 1, &cfg).unwrap().value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mixed_volume_via_measures(&sq, &rect, 1, &cfg).unwrap().value, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(oracle_mixed_volume(&sq, &rect, 1).unwrap(), 1.5, epsilon = 1e-12);
        let cube = corpus::unit_cube();
        let simplex = corpus::standard_simplex(3);
        for alpha in 1..3 {
            let a = mixed_volume_via_measures(&cube, &simplex, alpha, &cfg).unwrap().value;
            let b = oracle_mixed_volume(&cube, &simplex, alpha).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(oracle_mixed_volume(&cube, &cube, 2).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_has_one_row_per_tuple() {
        let sq = corpus::unit_square();
        let r = value(&[&sq, &sq], &[1, 1]);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("face1,face2,bracket,gamma,gamma_std_error,measure1,measure2,product"));
    }
}
