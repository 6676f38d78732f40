//! Python bindings for `mixcurv`.
//!
//! Polytopes are built from vertex lists or JSON documents; regions and
//! direction sets are passed as JSON strings in the same format the
//! command-line tool accepts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mixcurv::curvature::{self, CurvatureQuery};
use mixcurv::mixed::{self, MixedQuery};
use mixcurv::montecarlo::{self, McConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use mixcurv::polytope::Region;
use mixcurv::spherical::SphericalRegion;
use mixcurv::translative::{self, TifSpec};
use mixcurv::verify::{self, Suite, VerifyOptions};
use mixcurv::{Error, Vector};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn config(samples: u64, seed: u64) -> PyResult<McConfig> {
    let cfg = McConfig::new(samples, seed);
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn region(json: Option<&str>) -> PyResult<Region> {
    json.map_or(Ok(Region::All), |s| {
        serde_json::from_str(s).map_err(|e| PyValueError::new_err(format!("region: {e}")))
    })
}

fn directions(json: Option<&str>) -> PyResult<SphericalRegion> {
    json.map_or(Ok(SphericalRegion::All), |s| {
        serde_json::from_str(s).map_err(|e| PyValueError::new_err(format!("directions: {e}")))
    })
}

/// A bounded, full-dimensional convex polytope.
#[pyclass(name = "Polytope", module = "mixcurv", frozen)]
struct PyPolytope {
    inner: mixcurv::polytope::Polytope,
}

#[pymethods]
impl PyPolytope {
    /// Convex hull of a list of points in R^2 or R^3.
    #[staticmethod]
    fn from_vertices(points: Vec<Vec<f64>>) -> PyResult<Self> {
        let pts: Vec<Vector> = points.iter().map(|p| Vector::from_column_slice(p)).collect();
        let inner = mixcurv::polytope::Polytope::from_vertices(&pts).map_err(to_py)?;
        Ok(PyPolytope { inner })
    }

    /// Parses the JSON polytope format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = mixcurv::polytope::Polytope::from_json(text).map_err(to_py)?;
        Ok(PyPolytope { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices().iter().map(|v| v.iter().copied().collect()).collect()
    }

    /// Number of faces in each dimension 0..=d.
    fn f_vector(&self) -> Vec<usize> {
        self.inner.f_vector()
    }

    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        x.len() == self.inner.dim() && self.inner.contains(&Vector::from_vec(x))
    }

    fn __repr__(&self) -> String {
        format!("Polytope(dim={}, f_vector={:?})", self.inner.dim(), self.inner.f_vector())
    }
}

/// Value of a measure with its Monte Carlo standard error (0 when exact).
#[pyclass(name = "Estimate", module = "mixcurv", frozen, get_all)]
struct PyEstimate {
    value: f64,
    std_error: f64,
    samples: u64,
    seed: Option<u64>,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn exact(&self) -> bool {
        self.std_error == 0.0
    }

    fn __float__(&self) -> f64 {
        self.value
    }

    fn __repr__(&self) -> String {
        format!("Estimate(value={}, std_error={})", self.value, self.std_error)
    }
}

impl From<montecarlo::Estimate> for PyEstimate {
    fn from(e: montecarlo::Estimate) -> Self {
        PyEstimate {
            value: e.value,
            std_error: e.std_error,
            samples: e.samples,
            seed: e.seed,
        }
    }
}

/// Curvature measure C_k(P, region x directions).
#[pyfunction]
#[pyo3(signature = (polytope, k, region=None, directions=None, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED))]
fn curvature_measure(
    py: Python<'_>,
    polytope: &PyPolytope,
    k: usize,
    region: Option<&str>,
    directions: Option<&str>,
    samples: u64,
    seed: u64,
) -> PyResult<PyEstimate> {
    let query = CurvatureQuery {
        k,
        region: self::region(region)?,
        directions: self::directions(directions)?,
    };
    let cfg = config(samples, seed)?;
    let p = &polytope.inner;
    py.detach(|| curvature::curvature_measure(p, &query, &cfg))
        .map(PyEstimate::from)
        .map_err(to_py)
}

/// Intrinsic volumes V_0, ..., V_d.
#[pyfunction]
fn intrinsic_volumes(polytope: &PyPolytope) -> PyResult<Vec<f64>> {
    let cfg = McConfig::new(DEFAULT_SAMPLES, DEFAULT_SEED);
    let values = curvature::intrinsic_volumes(&polytope.inner, &cfg).map_err(to_py)?;
    Ok(values.into_iter().map(|e| e.value).collect())
}

/// Mixed curvature measure C_{r_1, ..., r_q}(P_1, ..., P_q).
///
/// `regions` holds one JSON region per polytope, or is omitted for the
/// whole space.
#[pyfunction]
#[pyo3(signature = (polytopes, orders, regions=None, directions=None, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED))]
fn mixed_curvature_measure(
    py: Python<'_>,
    polytopes: Vec<PyRef<'_, PyPolytope>>,
    orders: Vec<usize>,
    regions: Option<Vec<String>>,
    directions: Option<&str>,
    samples: u64,
    seed: u64,
) -> PyResult<PyEstimate> {
    let regions = regions
        .unwrap_or_default()
        .iter()
        .map(|r| region(Some(r)))
        .collect::<PyResult<Vec<_>>>()?;
    let query = MixedQuery {
        orders,
        regions,
        directions: self::directions(directions)?,
    };
    let cfg = config(samples, seed)?;
    let refs: Vec<&mixcurv::polytope::Polytope> = polytopes.iter().map(|p| &p.inner).collect();
    let report = py
        .detach(|| mixed::mixed_curvature_measure(&refs, &query, &cfg))
        .map_err(to_py)?;
    Ok(report.estimate().into())
}

/// Both sides of the translative integral formula; returns the report as JSON.
#[pyfunction]
fn tif_verify(py: Python<'_>, spec_json: &str) -> PyResult<String> {
    let spec = TifSpec::from_json(spec_json).map_err(to_py)?;
    let report = py.detach(|| translative::tif_verify(&spec)).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Runs a verification suite ("tif", "mixedvol", "steiner", "signs",
/// "moments" or "all"); returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (suite, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED))]
fn run_verify(py: Python<'_>, suite: &str, samples: u64, seed: u64) -> PyResult<String> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let opts = VerifyOptions {
        seed,
        samples,
        ..VerifyOptions::default()
    };
    let report = py.detach(|| verify::run(suite, &opts)).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Volume of the unit ball in R^n.
#[pyfunction]
fn kappa(n: usize) -> f64 {
    mixcurv::spherical::kappa(n)
}

#[pymodule]
#[pyo3(name = "mixcurv")]
fn mixcurv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolytope>()?;
    m.add_class::<PyEstimate>()?;
    m.add_function(wrap_pyfunction!(curvature_measure, m)?)?;
    m.add_function(wrap_pyfunction!(intrinsic_volumes, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_curvature_measure, m)?)?;
    m.add_function(wrap_pyfunction!(tif_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
