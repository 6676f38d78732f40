//! Numerical check of the iterated translative integral formula
//!
//! ```text
//! ∫ ... ∫ C_k(P_1 ∩ (P_2 + z_2) ∩ ... ∩ (P_q + z_q); h_z) dz_2 ... dz_q
//!     = Σ_{r_1 + ... + r_q = (q-1)d + k} C_{r_1..r_q}(P_1, ..., P_q; h)
//! ```
//!
//! for product test functions `h = 1_{B_1} ⊗ ... ⊗ 1_{B_q} ⊗ 1_C`, where
//! `h_z` localizes to `B_1 ∩ (B_2 + z_2) ∩ ...` and directions in `C`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_measure, CurvatureQuery};
use crate::error::{validation, Error, Result};
use crate::mixed::{mixed_curvature_measure, MixedQuery};
use crate::montecarlo::{pairwise_sum, run_batches, McConfig};
use crate::polytope::{HalfSpace, Intersection, Polytope, PolytopeJson, Region};
use crate::spherical::{measure_path, MeasurePath, SphericalRegion};
use crate::Vector;

/// Inflation of the support window.
pub const WINDOW_MARGIN: f64 = 1e-9;

/// Upper bound on the number of grid nodes.
pub const MAX_GRID_NODES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    MonteCarlo(McConfig),
    Grid { step: f64 },
}

/// Axis-parallel box of translations for one `z_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TifSpec {
    pub polytopes: Vec<Polytope>,
    pub k: usize,
    /// One region per body; empty means `R^d` everywhere.
    pub regions: Vec<Region>,
    pub directions: SphericalRegion,
    pub integrator: Integrator,
    /// Translation windows for `z_2, ..., z_q`; defaults to the support.
    pub window: Option<Vec<Window>>,
}

/// JSON form of [`TifSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TifSpecJson {
    pub polytopes: Vec<PolytopeJson>,
    pub k: usize,
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default = "all_directions")]
    pub directions: SphericalRegion,
    pub integrator: Integrator,
    #[serde(default)]
    pub window: Option<Vec<Window>>,
}

fn all_directions() -> SphericalRegion {
    SphericalRegion::All
}

impl TifSpecJson {
    pub fn to_spec(&self) -> Result<TifSpec> {
        Ok(TifSpec {
            polytopes: self
                .polytopes
                .iter()
                .map(|p| p.to_polytope())
                .collect::<Result<_>>()?,
            k: self.k,
            regions: self.regions.clone(),
            directions: self.directions.clone(),
            integrator: self.integrator,
            window: self.window.clone(),
        })
    }
}

impl TifSpec {
    pub fn new(polytopes: Vec<Polytope>, k: usize, integrator: Integrator) -> Self {
        Self {
            polytopes,
            k,
            regions: Vec::new(),
            directions: SphericalRegion::All,
            integrator,
            window: None,
        }
    }

    pub fn from_json(text: &str) -> Result<TifSpec> {
        let doc: TifSpecJson = serde_json::from_str(text)?;
        doc.to_spec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownEntry {
    pub orders: Vec<usize>,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsReport {
    pub value: f64,
    pub std_error: f64,
    pub breakdown: Vec<BreakdownEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsReport {
    pub value: f64,
    /// Monte Carlo standard error; zero for the grid integrator.
    pub std_error: f64,
    /// `|I_h - I_{2h}|` for the grid integrator.
    pub refinement_error: Option<f64>,
    /// Samples (Monte Carlo) or nodes (grid) evaluated.
    pub evaluations: u64,
    /// Resampled (Monte Carlo) or perturbed (grid) degenerate translations.
    pub degenerate_resamples: u64,
    /// Weight of a single Monte Carlo sample, `vol(W) max|f| / n`; the
    /// smallest discrepancy the estimator can resolve.
    pub resolution: f64,
    pub window: Vec<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TifReport {
    pub q: usize,
    pub dim: usize,
    pub k: usize,
    pub integrator: Integrator,
    pub lhs: LhsReport,
    pub rhs: RhsReport,
    pub absolute_discrepancy: f64,
    /// `|lhs - rhs|` over the combined standard error, floored at the
    /// single-sample resolution (Monte Carlo only).
    pub discrepancy_sigma: Option<f64>,
    pub degenerate_resamples: u64,
}

impl TifReport {
    /// Monte Carlo: `discrepancy_sigma <= max_sigma`; grid: absolute
    /// discrepancy `<= abs_tol`.
    pub fn passes(&self, max_sigma: f64, abs_tol: f64) -> bool {
        match self.discrepancy_sigma {
            Some(s) => s <= max_sigma,
            None => self.absolute_discrepancy <= abs_tol,
        }
    }
}

struct Prepared {
    d: usize,
    q: usize,
    k: usize,
    halfspaces: Vec<Vec<HalfSpace>>,
    boxes: Vec<(Vector, Vector)>,
    regions: Vec<Region>,
    directions: SphericalRegion,
    window: Vec<Window>,
}

enum Sample {
    Value(f64),
    Degenerate,
}

fn support_window(p1: &Polytope, pi: &Polytope) -> Window {
    let (lo1, hi1) = p1.bounding_box();
    let (lo, hi) = pi.bounding_box();
    Window {
        lower: (0..p1.dim()).map(|j| lo1[j] - hi[j] - WINDOW_MARGIN).collect(),
        upper: (0..p1.dim()).map(|j| hi1[j] - lo[j] + WINDOW_MARGIN).collect(),
    }
}

fn prepare(spec: &TifSpec) -> Result<Prepared> {
    let q = spec.polytopes.len();
    if !(2..=3).contains(&q) {
        return validation(format!("the translative check needs 2 or 3 bodies, got {q}"));
    }
    let d = spec.polytopes[0].dim();
    if spec.polytopes.iter().any(|p| p.dim() != d) {
        return validation("polytopes live in different dimensions");
    }
    if !(2..=3).contains(&d) {
        return validation(format!("the translative check supports d = 2, 3, got {d}"));
    }
    if spec.k >= d {
        return validation(format!("k must lie in 0..={}", d - 1));
    }
    let regions: Vec<Region> = if spec.regions.is_empty() {
        vec![Region::All; q]
    } else if spec.regions.len() == q {
        spec.regions
            .iter()
            .map(|r| r.clone().validate(d))
            .collect::<Result<_>>()?
    } else {
        return validation(format!("{} regions given for {q} bodies", spec.regions.len()));
    };
    let directions = spec.directions.clone().validate(d)?;
    if measure_path(d - spec.k, &directions) != MeasurePath::Exact {
        return validation("direction caps need d - k <= 2 here so that every angle is exact");
    }
    let support: Vec<Window> = spec.polytopes[1..]
        .iter()
        .map(|p| support_window(&spec.polytopes[0], p))
        .collect();
    let window = match &spec.window {
        None => support,
        Some(w) => {
            if w.len() != q - 1 {
                return validation(format!("need {} translation windows", q - 1));
            }
            for (given, need) in w.iter().zip(&support) {
                if given.lower.len() != d || given.upper.len() != d {
                    return validation(format!("translation windows must have dimension {d}"));
                }
                let covers = (0..d).all(|j| {
                    given.lower[j] <= need.lower[j] + WINDOW_MARGIN && given.upper[j] >= need.upper[j] - WINDOW_MARGIN
                });
                if !covers {
                    return validation(format!(
                        "translation window does not cover the support {:?}..{:?}",
                        need.lower, need.upper
                    ));
                }
            }
            w.clone()
        }
    };
    match spec.integrator {
        Integrator::MonteCarlo(cfg) => cfg.validate()?,
        Integrator::Grid { step } => {
            if !(step > 0.0) || !step.is_finite() {
                return validation("grid step must be positive");
            }
        }
    }
    Ok(Prepared {
        d,
        q,
        k: spec.k,
        halfspaces: spec.polytopes.iter().map(|p| p.halfspaces().cloned().collect()).collect(),
        boxes: spec.polytopes.iter().map(|p| p.bounding_box()).collect(),
        regions,
        directions,
        window,
    })
}

impl Prepared {
    fn dims(&self) -> usize {
        (self.q - 1) * self.d
    }

    fn window_volume(&self) -> f64 {
        self.window
            .iter()
            .flat_map(|w| w.lower.iter().zip(&w.upper).map(|(l, u)| u - l))
            .product()
    }

    fn bound(&self, axis: usize) -> (f64, f64) {
        let w = &self.window[axis / self.d];
        (w.lower[axis % self.d], w.upper[axis % self.d])
    }

    /// `C_k` of the intersection for translations `z = (z_2, ..., z_q)`.
    fn eval(&self, z: &[f64]) -> Result<Sample> {
        let d = self.d;
        let (mut lo, mut hi) = self.boxes[0].clone();
        for i in 1..self.q {
            let (blo, bhi) = &self.boxes[i];
            for j in 0..d {
                let shift = z[(i - 1) * d + j];
                lo[j] = lo[j].max(blo[j] + shift);
                hi[j] = hi[j].min(bhi[j] + shift);
            }
        }
        if (0..d).any(|j| lo[j] > hi[j] + 1e-12) {
            return Ok(Sample::Value(0.0));
        }
        let mut hs: Vec<HalfSpace> = self.halfspaces[0].clone();
        let mut region = self.regions[0].clone();
        for i in 1..self.q {
            let zi = Vector::from_column_slice(&z[(i - 1) * d..i * d]);
            hs.extend(self.halfspaces[i].iter().map(|h| h.translated(&zi)));
            if !self.regions[i].is_all() {
                region = region.intersect(&self.regions[i].translate(&zi));
            }
        }
        match Polytope::from_bounded_halfspaces(d, &hs)? {
            Intersection::Empty => Ok(Sample::Value(0.0)),
            Intersection::Degenerate(_) => Ok(Sample::Degenerate),
            Intersection::Polytope(p) => {
                let query = CurvatureQuery {
                    k: self.k,
                    region,
                    directions: self.directions.clone(),
                };
                let e = curvature_measure(&p, &query, &McConfig::default())?;
                Ok(Sample::Value(e.value))
            }
        }
    }
}

fn monte_carlo(prep: &Prepared, cfg: &McConfig) -> Result<LhsReport> {
    let n = prep.dims();
    let failures = std::sync::Mutex::new(None::<Error>);
    let degenerate = std::sync::atomic::AtomicU64::new(0);
    let stats = run_batches(cfg, |rng, count, stats| {
        let mut z = vec![0.0; n];
        for _ in 0..count {
            // degenerate translations form a null set; draw again
            for _attempt in 0..1000 {
                for (a, zj) in z.iter_mut().enumerate() {
                    let (l, u) = prep.bound(a);
                    *zj = rng.random_range(l..u);
                }
                match prep.eval(&z) {
                    Ok(Sample::Value(v)) => {
                        stats.push(v);
                        break;
                    }
                    Ok(Sample::Degenerate) => {
                        degenerate.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    }
                    Err(e) => {
                        failures.lock().unwrap().get_or_insert(e);
                        return;
                    }
                }
            }
        }
    });
    if let Some(e) = failures.into_inner().unwrap() {
        return Err(e);
    }
    let est = stats.estimate(prep.window_volume(), cfg.seed);
    Ok(LhsReport {
        value: est.value,
        std_error: est.std_error,
        refinement_error: None,
        evaluations: stats.count(),
        degenerate_resamples: degenerate.into_inner(),
        resolution: prep.window_volume() * stats.max_abs() / stats.count().max(1) as f64,
        window: prep.window.clone(),
    })
}

/// Midpoint rule with `cells[a]` cells on axis `a`; returns the integral,
/// the node count and the number of perturbed nodes.
fn midpoint_rule(prep: &Prepared, cells: &[u64]) -> Result<(f64, u64, u64)> {
    let n = prep.dims();
    let widths: Vec<f64> = (0..n)
        .map(|a| {
            let (l, u) = prep.bound(a);
            (u - l) / cells[a] as f64
        })
        .collect();
    let cell_volume: f64 = widths.iter().product();
    let rows: Vec<Result<(f64, u64)>> = (0..cells[0])
        .into_par_iter()
        .map(|i0| {
            let mut z = vec![0.0; n];
            let mut idx = vec![0u64; n];
            idx[0] = i0;
            let mut values = Vec::new();
            let mut perturbed = 0;
            loop {
                for a in 0..n {
                    z[a] = prep.bound(a).0 + (idx[a] as f64 + 0.5) * widths[a];
                }
                let mut v = None;
                for attempt in 1..=16u32 {
                    match prep.eval(&z)? {
                        Sample::Value(x) => {
                            v = Some(x);
                            break;
                        }
                        Sample::Degenerate => {
                            perturbed += 1;
                            // deterministic irrational sub-cell shift
                            for a in 0..n {
                                let frac = ((attempt as f64 + a as f64) * std::f64::consts::SQRT_2).fract() - 0.5;
                                z[a] += 1e-3 * frac * widths[a];
                            }
                        }
                    }
                }
                values.push(v.unwrap_or(0.0));
                // odometer over the remaining axes
                let mut a = n - 1;
                loop {
                    if a == 0 {
                        return Ok((pairwise_sum(&values), perturbed));
                    }
                    idx[a] += 1;
                    if idx[a] < cells[a] {
                        break;
                    }
                    idx[a] = 0;
                    a -= 1;
                }
            }
        })
        .collect();
    let mut sums = Vec::with_capacity(rows.len());
    let mut perturbed = 0;
    for r in rows {
        let (s, p) = r?;
        sums.push(s);
        perturbed += p;
    }
    let nodes = cells.iter().product();
    Ok((pairwise_sum(&sums) * cell_volume, nodes, perturbed))
}

fn grid(prep: &Prepared, step: f64) -> Result<LhsReport> {
    let n = prep.dims();
    let cells: Vec<u64> = (0..n)
        .map(|a| {
            let (l, u) = prep.bound(a);
            (((u - l) / step).ceil() as u64).max(1)
        })
        .collect();
    let total = cells.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c));
    match total {
        Some(t) if t <= MAX_GRID_NODES => {}
        _ => return validation(format!("grid step {step} needs more than {MAX_GRID_NODES} nodes")),
    }
    let coarse: Vec<u64> = cells.iter().map(|&c| c.div_ceil(2).max(1)).collect();
    let (fine, nodes, perturbed) = midpoint_rule(prep, &cells)?;
    let (rough, rough_nodes, rough_perturbed) = midpoint_rule(prep, &coarse)?;
    Ok(LhsReport {
        value: fine,
        std_error: 0.0,
        refinement_error: Some((fine - rough).abs()),
        evaluations: nodes + rough_nodes,
        degenerate_resamples: perturbed + rough_perturbed,
        resolution: 0.0,
        window: prep.window.clone(),
    })
}

/// Left side: integral over translations of the curvature measure of the
/// intersection.
pub fn tif_lhs(spec: &TifSpec) -> Result<LhsReport> {
    let prep = prepare(spec)?;
    match spec.integrator {
        Integrator::MonteCarlo(cfg) => monte_carlo(&prep, &cfg),
        Integrator::Grid { step } => grid(&prep, step),
    }
}

/// All order tuples `0 <= r_i <= d` with `Σ r_i = total`, in lexicographic order.
pub fn order_tuples(d: usize, q: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(q);
    fn rec(d: usize, q: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for r in 0..=d.min(left) {
            cur.push(r);
            rec(d, q, left - r, cur, out);
            cur.pop();
        }
    }
    rec(d, q, total, &mut cur, &mut out);
    out
}

/// Right side: sum of mixed curvature measures over admissible orders.
pub fn tif_rhs(spec: &TifSpec) -> Result<RhsReport> {
    let prep = prepare(spec)?;
    let (d, q) = (prep.d, prep.q);
    let cfg = match spec.integrator {
        Integrator::MonteCarlo(cfg) => cfg,
        Integrator::Grid { .. } => McConfig::default(),
    };
    let polys: Vec<&Polytope> = spec.polytopes.iter().collect();
    let mut breakdown = Vec::new();
    for orders in order_tuples(d, q, (q - 1) * d + prep.k) {
        let query = MixedQuery {
            orders: orders.clone(),
            regions: prep.regions.clone(),
            directions: prep.directions.clone(),
        };
        let r = mixed_curvature_measure(&polys, &query, &cfg)?;
        breakdown.push(BreakdownEntry {
            orders,
            value: r.value,
            std_error: r.std_error,
        });
    }
    let values: Vec<f64> = breakdown.iter().map(|b| b.value).collect();
    let var: Vec<f64> = breakdown.iter().map(|b| b.std_error * b.std_error).collect();
    Ok(RhsReport {
        value: pairwise_sum(&values),
        std_error: pairwise_sum(&var).sqrt(),
        breakdown,
    })
}

/// Runs both sides and compares them.
pub fn tif_verify(spec: &TifSpec) -> Result<TifReport> {
    let prep = prepare(spec)?;
    let lhs = tif_lhs(spec)?;
    let rhs = tif_rhs(spec)?;
    let diff = (lhs.value - rhs.value).abs();
    let sigma = match spec.integrator {
        Integrator::MonteCarlo(_) => {
            // a zero sample variance does not make the estimate exact
            let se = lhs.std_error.hypot(rhs.std_error).max(lhs.resolution);
            Some(if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY })
        }
        Integrator::Grid { .. } => None,
    };
    Ok(TifReport {
        q: prep.q,
        dim: prep.d,
        k: prep.k,
        integrator: spec.integrator,
        degenerate_resamples: lhs.degenerate_resamples,
        absolute_discrepancy: diff,
        discrepancy_sigma: sigma,
        lhs,
        rhs,
    })
}
