//! `mixcurv` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 validation error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixcurv::curvature::{curvature_measure, intrinsic_volumes, CurvatureQuery};
use mixcurv::mixed::{mixed_curvature_measure, MixedQuery};
use mixcurv::montecarlo::{McConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use mixcurv::polytope::{Polytope, Region};
use mixcurv::spherical::SphericalRegion;
use mixcurv::translative::{tif_verify, Integrator, TifSpec};
use mixcurv::verify::{self, Suite, VerifyOptions};
use mixcurv::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mixcurv", version, about = "Curvature measures, mixed curvature measures and translative integral checks for convex polytopes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every Monte Carlo estimate [default: 20240917].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Tolerance override for deterministic comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature measure C_k of one polytope.
    Curvature {
        polytope: PathBuf,
        /// Order k.
        #[arg(short, long, required_unless_present = "all")]
        k: Option<usize>,
        /// Print all intrinsic volumes V_0, ..., V_d.
        #[arg(long, conflicts_with = "k")]
        all: bool,
        /// Spatial region as JSON ("all", {"box": ...} or {"halfspaces": ...}).
        #[arg(long)]
        region: Option<String>,
        /// Direction region as JSON ("all", {"cap": ...}, {"cone": ...} or {"halfspaces": ...}).
        #[arg(long)]
        directions: Option<String>,
    },
    /// Mixed curvature measure C_{r_1, ..., r_q} of q polytopes.
    Mixed {
        #[arg(required = true)]
        polytopes: Vec<PathBuf>,
        /// Orders r_1,...,r_q.
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        /// One spatial region per polytope, as JSON; repeat the flag.
        #[arg(long)]
        region: Vec<String>,
        #[arg(long)]
        directions: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        suite: String,
        /// Grid step for translative grid checks.
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
        /// Allowed deviation in standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
    },
    /// Both sides of the translative integral formula for a JSON spec.
    Tif {
        spec: PathBuf,
        /// Allowed deviation in standard errors (Monte Carlo).
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) => Failure::Usage(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

struct Output {
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli.common, &out.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn emit(common: &Common, text: &str) -> std::io::Result<()> {
    match &common.output {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_polytope(path: &Path) -> Result<Polytope, Failure> {
    Polytope::from_json(&read(path)?).map_err(|e| match e {
        Error::Json(j) => Failure::Usage(format!("{}: {j}", path.display())),
        other => Failure::Invalid(format!("{}: {other}", path.display())),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

fn mc_config(common: &Common) -> McConfig {
    McConfig::new(common.samples.unwrap_or(DEFAULT_SAMPLES), common.seed())
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Curvature {
            polytope,
            k,
            all,
            region,
            directions,
        } => {
            let p = load_polytope(polytope)?;
            let cfg = mc_config(common);
            cfg.validate()?;
            let region: Region = region.as_deref().map(|r| parse_json("region", r)).transpose()?.unwrap_or(Region::All);
            let directions: SphericalRegion = directions
                .as_deref()
                .map(|r| parse_json("directions", r))
                .transpose()?
                .unwrap_or(SphericalRegion::All);
            let orders: Vec<usize> = match (all, k) {
                (true, _) => (0..=p.dim()).collect(),
                (false, Some(k)) => vec![*k],
                (false, None) => unreachable!("clap requires k or --all"),
            };
            let rows = if *all && region.is_all() && directions.is_all() {
                intrinsic_volumes(&p, &cfg)?
            } else {
                orders
                    .iter()
                    .map(|&k| {
                        let query = CurvatureQuery {
                            k,
                            region: region.clone(),
                            directions: directions.clone(),
                        };
                        curvature_measure(&p, &query, &cfg)
                    })
                    .collect::<mixcurv::Result<Vec<_>>>()?
            };
            let text = match common.format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        k: usize,
                        value: f64,
                        std_error: f64,
                        exact: bool,
                    }
                    let rows: Vec<Row> = orders
                        .iter()
                        .zip(&rows)
                        .map(|(&k, e)| Row {
                            k,
                            value: e.value,
                            std_error: e.std_error,
                            exact: e.is_exact(),
                        })
                        .collect();
                    if *all {
                        to_json(&serde_json::json!({ "dim": p.dim(), "seed": cfg.seed, "measures": rows }))
                    } else {
                        to_json(&rows[0])
                    }
                }
                Format::Csv => {
                    let mut s = String::from("k,value,std_error\n");
                    for (k, e) in orders.iter().zip(&rows) {
                        let _ = writeln!(s, "{k},{},{}", e.value, e.std_error);
                    }
                    s
                }
            };
            Ok(Output { text, passed: true })
        }
        Command::Mixed {
            polytopes,
            orders,
            region,
            directions,
        } => {
            let polys = polytopes.iter().map(|p| load_polytope(p)).collect::<Result<Vec<_>, _>>()?;
            let regions = region
                .iter()
                .map(|r| parse_json::<Region>("region", r))
                .collect::<Result<Vec<_>, _>>()?;
            let directions = directions
                .as_deref()
                .map(|r| parse_json("directions", r))
                .transpose()?
                .unwrap_or(SphericalRegion::All);
            let query = MixedQuery {
                orders: orders.clone(),
                regions,
                directions,
            };
            let refs: Vec<&Polytope> = polys.iter().collect();
            let report = mixed_curvature_measure(&refs, &query, &mc_config(common))?;
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
            };
            Ok(Output { text, passed: true })
        }
        Command::Verify {
            suite,
            grid_step,
            sigma,
        } => {
            let suite: Suite = suite.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let opts = VerifyOptions {
                seed: common.seed(),
                samples: common.samples.unwrap_or(DEFAULT_SAMPLES),
                tol: common.tol,
                max_sigma: *sigma,
                grid_step: *grid_step,
            };
            let report = verify::run(suite, &opts)?;
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Csv => {
                    let mut s = String::from("suite,check,passed,metric,value,reference,error,tolerance\n");
                    for r in &report.suites {
                        for c in &r.checks {
                            let metric = serde_json::to_value(c.metric).expect("enum serializes");
                            let _ = writeln!(
                                s,
                                "{},\"{}\",{},{},{},{},{},{}",
                                r.suite,
                                c.name.replace('"', "'"),
                                c.passed,
                                metric.as_str().unwrap_or_default(),
                                c.value,
                                c.reference,
                                c.error,
                                c.tolerance
                            );
                        }
                    }
                    s
                }
            };
            Ok(Output {
                text,
                passed: report.passed,
            })
        }
        Command::Tif { spec, sigma } => {
            let mut spec = TifSpec::from_json(&read(spec)?)?;
            if let Integrator::MonteCarlo(cfg) = &mut spec.integrator {
                if let Some(n) = common.samples {
                    cfg.samples = n;
                }
                if let Some(seed) = common.seed {
                    cfg.seed = seed;
                }
            }
            let report = tif_verify(&spec)?;
            let passed = report.passes(*sigma, common.tol.unwrap_or(1e-3));
            let text = match common.format {
                Format::Json => to_json(&serde_json::json!({ "passed": passed, "report": report })),
                Format::Csv => {
                    let mut s = String::from("side,orders,value,std_error\n");
                    let _ = writeln!(s, "lhs,,{},{}", report.lhs.value, report.lhs.std_error);
                    for e in &report.rhs.breakdown {
                        let orders: Vec<String> = e.orders.iter().map(|r| r.to_string()).collect();
                        let _ = writeln!(s, "rhs,{},{},{}", orders.join(" "), e.value, e.std_error);
                    }
                    let _ = writeln!(s, "rhs,,{},{}", report.rhs.value, report.rhs.std_error);
                    s
                }
            };
            Ok(Output { text, passed })
        }
    }
}
