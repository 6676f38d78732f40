//! Named verification suites with machine-readable reports.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus;
use crate::curvature::{mc_parallel_volume, steiner_volume};
use crate::error::{validation, Error, Result};
use crate::mixed::{mixed_volume_via_measures, oracle_mixed_volume};
use crate::montecarlo::{McConfig, DEFAULT_BATCH, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::multilinear::SignCalc;
use crate::polytope::Polytope;
use crate::spherical::{mc_projection_moment, omega, projection_moment};
use crate::translative::{tif_verify, Integrator, TifSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tif,
    Mixedvol,
    Steiner,
    Signs,
    Moments,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tif" => Ok(Suite::Tif),
            "mixedvol" => Ok(Suite::Mixedvol),
            "steiner" => Ok(Suite::Steiner),
            "signs" => Ok(Suite::Signs),
            "moments" => Ok(Suite::Moments),
            "all" => Ok(Suite::All),
            other => validation(format!(
                "unknown suite {other:?} (expected tif, mixedvol, steiner, signs, moments or all)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Tif => "tif",
            Suite::Mixedvol => "mixedvol",
            Suite::Steiner => "steiner",
            Suite::Signs => "signs",
            Suite::Moments => "moments",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

/// How a check compares `value` against `reference`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Exact,
    Absolute,
    Relative,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub metric: Metric,
    pub value: f64,
    pub reference: f64,
    /// Achieved error in the unit of `metric`.
    pub error: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl Check {
    pub fn exact(name: impl Into<String>, value: f64, reference: f64) -> Self {
        let error = (value - reference).abs();
        Self {
            name: name.into(),
            passed: error == 0.0,
            metric: Metric::Exact,
            value,
            reference,
            error,
            tolerance: 0.0,
            std_error: None,
        }
    }

    pub fn absolute(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let error = (value - reference).abs();
        Self {
            name: name.into(),
            passed: error <= tol,
            metric: Metric::Absolute,
            value,
            reference,
            error,
            tolerance: tol,
            std_error: None,
        }
    }

    pub fn relative(name: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let error = (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        Self {
            name: name.into(),
            passed: error <= tol,
            metric: Metric::Relative,
            value,
            reference,
            error,
            tolerance: tol,
            std_error: None,
        }
    }

    /// `|value - reference| / std_error <= max_sigma`.
    pub fn sigma(name: impl Into<String>, value: f64, std_error: f64, reference: f64, max_sigma: f64) -> Self {
        let diff = (value - reference).abs();
        let error = if diff <= 1e-12 * reference.abs().max(1.0) {
            0.0
        } else if std_error > 0.0 {
            diff / std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            name: name.into(),
            passed: error <= max_sigma,
            metric: Metric::Sigma,
            value,
            reference,
            error,
            tolerance: max_sigma,
            std_error: Some(std_error),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: u64,
    /// Replaces the default absolute/relative tolerance of every
    /// deterministic comparison.
    pub tol: Option<f64>,
    pub max_sigma: f64,
    pub grid_step: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tol: None,
            max_sigma: 3.0,
            grid_step: 1e-3,
        }
    }
}

impl VerifyOptions {
    fn mc(&self, salt: u64) -> McConfig {
        McConfig {
            samples: self.samples,
            seed: self.seed,
            batch: DEFAULT_BATCH,
        }
        .derived(salt)
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Runs one suite (or all of them).
pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.samples < 2 {
        return validation("at least 2 samples are required");
    }
    let suites = match suite {
        Suite::All => vec![Suite::Signs, Suite::Moments, Suite::Steiner, Suite::Mixedvol, Suite::Tif],
        s => vec![s],
    };
    let mut reports = Vec::with_capacity(suites.len());
    for s in suites {
        let checks = match s {
            Suite::Signs => signs()?,
            Suite::Moments => moments(opts)?,
            Suite::Steiner => steiner(opts)?,
            Suite::Mixedvol => mixedvol(opts)?,
            Suite::Tif => tif(opts)?,
            Suite::All => unreachable!(),
        };
        reports.push(SuiteReport {
            suite: s,
            passed: checks.iter().all(|c| c.passed),
            checks,
        });
    }
    Ok(VerifyReport {
        seed: opts.seed,
        samples: opts.samples,
        passed: reports.iter().all(|r| r.passed),
        suites: reports,
    })
}

/// Every order tuple `0 <= r_i <= d` of length `q`.
pub fn all_order_tuples(d: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..=d).map(move |r| {
                    let mut t = t.clone();
                    t.push(r);
                    t
                })
            })
            .collect();
    }
    out
}

fn signs() -> Result<Vec<Check>> {
    let mut closing_failures = 0u64;
    let mut reduction_failures = 0u64;
    let mut tuples = 0u64;
    for d in 2..=6 {
        for q in 1..=4 {
            for r in all_order_tuples(d, q) {
                let calc = SignCalc::new(d, r)?;
                let p = calc.parities();
                tuples += 1;
                if p.closing_parity(d, q) != 0 {
                    closing_failures += 1;
                }
                let c1 = calc.c1().rem_euclid(2);
                let c2 = calc.c2().rem_euclid(2);
                let c3 = calc.c3().rem_euclid(2);
                let ok = calc.c1_reduction_chain().iter().all(|v| v.rem_euclid(2) == c1)
                    && calc.c2_reduction_chain().iter().all(|v| v.rem_euclid(2) == c2)
                    && calc.c3_reduced().rem_euclid(2) == c3;
                if !ok {
                    reduction_failures += 1;
                }
            }
        }
    }
    Ok(vec![
        Check::exact(format!("closing identity on {tuples} tuples (failures)"), closing_failures as f64, 0.0),
        Check::exact(format!("reduced forms on {tuples} tuples (failures)"), reduction_failures as f64, 0.0),
    ])
}

/// Exponents `p` checked for a subspace of dimension `l`.
pub fn moment_exponents(l: usize) -> [f64; 4] {
    [-(l as f64 - 1.0) + 0.5, 0.0, 1.0, 2.0]
}

fn moments(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut salt = 0;
    for d in 2..=6 {
        for l in 1..d {
            for p in moment_exponents(l) {
                let exact = projection_moment(d, l, p)?;
                let est = mc_projection_moment(d, l, p, &opts.mc(salt))?;
                salt += 1;
                checks.push(Check::sigma(
                    format!("moment d={d} l={l} p={p}"),
                    est.value,
                    est.std_error,
                    exact,
                    opts.max_sigma,
                ));
                if p == 0.0 {
                    checks.push(Check::relative(
                        format!("moment d={d} l={l} p=0 equals sphere area"),
                        exact,
                        omega(d),
                        opts.tol_or(1e-10),
                    ));
                }
            }
        }
    }
    Ok(checks)
}

/// Bodies used by the Steiner suite.
pub fn steiner_bodies(seed: u64) -> Vec<(String, Polytope)> {
    let mut rng = corpus::rng(seed);
    vec![
        ("square".into(), corpus::unit_square()),
        ("cube".into(), corpus::unit_cube()),
        ("hexagon".into(), corpus::random_hexagon(&mut rng)),
        ("simplex".into(), corpus::random_simplex(&mut rng, 3)),
    ]
}

fn steiner(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut salt = 100;
    for (name, body) in steiner_bodies(opts.seed) {
        for r in [0.1, 0.5, 1.0] {
            let poly = steiner_volume(&body, r, &McConfig::default())?;
            let mc = mc_parallel_volume(&body, r, &opts.mc(salt))?;
            salt += 1;
            checks.push(Check::sigma(
                format!("steiner {name} r={r}"),
                mc.value,
                mc.std_error.hypot(poly.std_error),
                poly.value,
                opts.max_sigma,
            ));
        }
    }
    Ok(checks)
}

/// Body pairs used by the mixed-volume suite: 20 random polygon pairs and
/// five pairs in `R^3`.
pub fn mixedvol_pairs(seed: u64) -> Vec<(String, Polytope, Polytope)> {
    let mut rng = corpus::rng(seed ^ 0x6d76);
    let mut out = Vec::new();
    for i in 0..20 {
        let a = corpus::random_polygon(&mut rng, 8);
        let b = corpus::random_polygon(&mut rng, 8);
        out.push((format!("polygons #{i}"), a, b));
    }
    let cube = corpus::unit_cube();
    let simplex = corpus::standard_simplex(3);
    out.push(("cube/simplex".into(), cube.clone(), simplex.clone()));
    out.push(("cube/random".into(), cube, corpus::random_polytope3(&mut rng, 10)));
    out.push(("simplex/random".into(), simplex, corpus::random_polytope3(&mut rng, 10)));
    for i in 0..2 {
        let a = corpus::random_polytope3(&mut rng, 10);
        let b = corpus::random_polytope3(&mut rng, 10);
        out.push((format!("random pair #{i}"), a, b));
    }
    out
}

fn mixedvol(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, a, b) in mixedvol_pairs(opts.seed) {
        let d = a.dim();
        let tol = opts.tol_or(if d == 2 { 1e-8 } else { 1e-6 });
        for alpha in 1..d {
            let via = mixed_volume_via_measures(&a, &b, alpha, &McConfig::default())?;
            let oracle = oracle_mixed_volume(&a, &b, alpha)?;
            checks.push(Check::relative(
                format!("mixed volume {name} alpha={alpha}"),
                via.value,
                oracle,
                tol,
            ));
        }
    }
    Ok(checks)
}

fn tif(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let sq = corpus::unit_square();
    for k in 0..2 {
        let spec = TifSpec::new(vec![sq.clone(), sq.clone()], k, Integrator::MonteCarlo(opts.mc(200 + k as u64)));
        let rep = tif_verify(&spec)?;
        checks.push(Check::exact(format!("squares k={k} rhs"), rep.rhs.value, 4.0));
        let se = rep.lhs.std_error.hypot(rep.rhs.std_error).max(rep.lhs.resolution);
        checks.push(Check::sigma(
            format!("squares k={k} monte carlo"),
            rep.lhs.value,
            se,
            rep.rhs.value,
            opts.max_sigma,
        ));
        let spec = TifSpec::new(vec![sq.clone(), sq.clone()], k, Integrator::Grid { step: opts.grid_step });
        let rep = tif_verify(&spec)?;
        checks.push(Check::absolute(
            format!("squares k={k} grid step={}", opts.grid_step),
            rep.lhs.value,
            rep.rhs.value,
            opts.tol_or(1e-3),
        ));
    }
    let mut rng = corpus::rng(opts.seed ^ 0x7469);
    for i in 0..5 {
        let a = corpus::random_polygon(&mut rng, 8);
        let b = corpus::random_polygon(&mut rng, 8);
        for k in 0..2 {
            let spec = TifSpec::new(vec![a.clone(), b.clone()], k, Integrator::MonteCarlo(opts.mc(300 + 2 * i + k as u64)));
            let rep = tif_verify(&spec)?;
            let se = rep.lhs.std_error.hypot(rep.rhs.std_error).max(rep.lhs.resolution);
            checks.push(Check::sigma(
                format!("polygons #{i} k={k} monte carlo"),
                rep.lhs.value,
                se,
                rep.rhs.value,
                opts.max_sigma,
            ));
        }
    }
    let cube = corpus::unit_cube();
    let spec = TifSpec::new(vec![cube.clone(), cube.clone(), cube], 0, Integrator::MonteCarlo(opts.mc(400)));
    let rep = tif_verify(&spec)?;
    let tol = opts.tol_or(1e-10);
    for entry in &rep.rhs.breakdown {
        let r = &entry.orders;
        let expected = match (r.iter().filter(|&&x| x == 3).count(), r.iter().filter(|&&x| x == 2).count()) {
            (0, 3) => Some(6.0),
            (2, 0) => Some(1.0),
            (1, 1) => Some(3.0),
            _ => None,
        };
        if let Some(e) = expected {
            checks.push(Check::absolute(format!("cubes rhs entry {r:?}"), entry.value, e, tol));
        } else {
            checks.push(Check::absolute(format!("cubes rhs entry {r:?}"), entry.value, 0.0, tol));
        }
    }
    checks.push(Check::absolute("cubes rhs total", rep.rhs.value, 27.0, tol));
    let se = rep.lhs.std_error.hypot(rep.rhs.std_error).max(rep.lhs.resolution);
    checks.push(Check::sigma("cubes monte carlo", rep.lhs.value, se, 27.0, opts.max_sigma));
    Ok(checks)
}
