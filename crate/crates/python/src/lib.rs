//! Python bindings for `roamcurve`.
//!
//! Built as the extension module `roamcurve`. Points are plain `(x, y, z)`
//! tuples and keypoints are `(longitude, latitude, height, speed)` tuples.

use pyo3::create_exception;
use pyo3::exceptions::{PyFileNotFoundError, PyOSError, PyValueError};
use pyo3::prelude::*;

use roamcurve::camera::{self, ViewModel};
use roamcurve::geo::{self, KeyPoint};
use roamcurve::report;
use roamcurve::sim::{self, AimModel, SceneSpec, SpeedProfile};
use roamcurve::stats;
use roamcurve::{CurveKind, Error, Point3, Tension};

create_exception!(roamcurve, RoamcurveError, PyValueError, "Invalid input or undefined result.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::FileNotFound(p) => PyFileNotFoundError::new_err(p.display().to_string()),
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => RoamcurveError::new_err(other.to_string()),
    }
}

type Xyz = (f64, f64, f64);

fn point(p: Xyz) -> Point3 {
    Point3::new(p.0, p.1, p.2)
}

fn xyz(p: Point3) -> Xyz {
    (p.x, p.y, p.z)
}

fn parse_kind(kind: &str) -> PyResult<CurveKind> {
    kind.parse().map_err(to_py)
}

fn parse_view(model: &str) -> PyResult<ViewModel> {
    ViewModel::ALL
        .into_iter()
        .find(|m| m.as_str() == model)
        .ok_or_else(|| RoamcurveError::new_err(format!("unknown view model '{model}', expected next_node or tangent")))
}

fn to_keypoints(kps: Vec<(f64, f64, f64, f64)>) -> PyResult<Vec<KeyPoint>> {
    kps.into_iter().map(|(lon, lat, h, v)| KeyPoint::new(lon, lat, h, v).map_err(to_py)).collect()
}

/// A path through keypoints: `"polyline"`, `"bezier"` or `"catmull_rom"`.
#[pyclass(name = "PathCurve", module = "roamcurve", frozen)]
struct PyPathCurve(roamcurve::PathCurve);

#[pymethods]
impl PyPathCurve {
    #[new]
    #[pyo3(signature = (kind, points, tension = 0.5))]
    fn new(kind: &str, points: Vec<Xyz>, tension: f64) -> PyResult<Self> {
        let tension = Tension::new(tension).map_err(to_py)?;
        let points = points.into_iter().map(point).collect();
        roamcurve::PathCurve::new(parse_kind(kind)?, points, tension).map(Self).map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().as_str()
    }

    #[getter]
    fn tension(&self) -> f64 {
        self.0.tension().value()
    }

    #[getter]
    fn span_count(&self) -> usize {
        self.0.span_count()
    }

    fn knot_param(&self, k: usize) -> PyResult<f64> {
        if k > self.0.span_count() {
            return Err(RoamcurveError::new_err(format!("knot index {k} out of range")));
        }
        Ok(self.0.knot_param(k))
    }

    fn eval(&self, s: f64) -> PyResult<Xyz> {
        self.0.eval(s).map(xyz).map_err(to_py)
    }

    fn tangent(&self, s: f64) -> PyResult<Xyz> {
        self.0.tangent(s).map(xyz).map_err(to_py)
    }

    fn arc_length(&self, s0: f64, s1: f64) -> PyResult<f64> {
        self.0.arc_length(s0, s1).map_err(to_py)
    }

    fn length(&self) -> f64 {
        self.0.length()
    }

    fn view_direction(&self, model: &str, s: f64) -> PyResult<Xyz> {
        camera::view_direction(&self.0, parse_view(model)?, s).map(xyz).map_err(to_py)
    }

    fn smoothness(&self, model: &str, samples_per_span: usize) -> PyResult<SmoothnessReport> {
        let r = camera::smoothness(&self.0, parse_view(model)?, samples_per_span).map_err(to_py)?;
        Ok(SmoothnessReport {
            corner_angles: r.corner_angles,
            max_angular_jump: r.max_angular_jump,
            mean_angular_speed: r.mean_angular_speed,
            max_angular_speed: r.max_angular_speed,
        })
    }

    fn __repr__(&self) -> String {
        format!("PathCurve({}, {} keypoints, tension={})", self.kind(), self.0.keypoints().len(), self.tension())
    }
}

#[pyclass(module = "roamcurve", frozen, get_all)]
struct SmoothnessReport {
    corner_angles: Vec<f64>,
    max_angular_jump: f64,
    mean_angular_speed: f64,
    max_angular_speed: f64,
}

#[pyclass(module = "roamcurve", frozen, get_all)]
struct SimResult {
    time_used: f64,
    collisions: u32,
    ray_attempts: u32,
    ray_hits: u32,
    accuracy: f64,
    completed: bool,
}

#[pyclass(module = "roamcurve", frozen, get_all)]
struct CorrelationResult {
    method: &'static str,
    r: f64,
    p_value: f64,
    n: usize,
}

impl From<stats::CorrelationResult> for CorrelationResult {
    fn from(c: stats::CorrelationResult) -> Self {
        let method = match c.method {
            stats::CorrelationMethod::Pearson => "pearson",
            stats::CorrelationMethod::Spearman => "spearman",
        };
        Self { method, r: c.r, p_value: c.p_value, n: c.n }
    }
}

#[pyclass(module = "roamcurve", frozen, get_all)]
struct NormalityResult {
    d: f64,
    p_value: f64,
    n: usize,
    replicates: usize,
    capped_at_0_2: bool,
}

#[pyclass(name = "RegressionFit", module = "roamcurve", frozen)]
struct PyRegressionFit(stats::RegressionFit);

#[pymethods]
impl PyRegressionFit {
    #[getter]
    fn slope(&self) -> f64 {
        self.0.slope
    }

    #[getter]
    fn intercept(&self) -> f64 {
        self.0.intercept
    }

    #[getter]
    fn confidence(&self) -> f64 {
        self.0.confidence
    }

    fn fitted(&self, x: f64) -> f64 {
        self.0.fitted(x)
    }

    /// `(lower, upper)` of the mean-response band at `x`.
    fn band(&self, x: f64) -> (f64, f64) {
        self.0.band(x)
    }
}

/// Parses keypoint CSV text into `(longitude, latitude, height, speed)` tuples.
#[pyfunction]
fn load_keypoints(text: &str) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let kps = geo::load_keypoints(text).map_err(to_py)?;
    Ok(kps.into_iter().map(|k| (k.longitude, k.latitude, k.height, k.speed)).collect())
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<CorrelationResult> {
    stats::pearson(&x, &y).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<CorrelationResult> {
    stats::spearman(&x, &y).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (x, seed = 0))]
fn ks_normality(py: Python<'_>, x: Vec<f64>, seed: u64) -> PyResult<NormalityResult> {
    let r = py.detach(|| stats::ks_normality(&x, seed)).map_err(to_py)?;
    Ok(NormalityResult { d: r.d, p_value: r.p_value, n: r.n, replicates: r.replicates, capped_at_0_2: r.capped_at_0_2 })
}

#[pyfunction]
#[pyo3(signature = (x, y, confidence = 0.95))]
fn linear_fit_with_band(x: Vec<f64>, y: Vec<f64>, confidence: f64) -> PyResult<PyRegressionFit> {
    stats::linear_fit_with_band(&x, &y, confidence).map(PyRegressionFit).map_err(to_py)
}

/// Runs the study pipeline on CSV text and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (csv_text, seed = 0))]
fn analyze_study(py: Python<'_>, csv_text: &str, seed: u64) -> PyResult<String> {
    let records = stats::load_study(csv_text).map_err(to_py)?;
    let report = py.detach(|| stats::analyze(&records, seed)).map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| to_py(e.into()))
}

/// Seeded synthetic study as CSV text.
#[pyfunction]
#[pyo3(signature = (n = 50, seed = 0))]
fn synthesize_study(n: usize, seed: u64) -> PyResult<String> {
    stats::synthesize_study(n, seed).and_then(|r| stats::serialize_study(&r)).map_err(to_py)
}

/// Traverses `curve` through the scene described by `scene_json`.
/// `speeds` holds one speed per keypoint.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (curve, speeds, scene_json, dt = 1.0, sigma = 0.05, seed = 0, trigger_distance = sim::DEFAULT_TRIGGER_DISTANCE))]
fn simulate(
    py: Python<'_>,
    curve: &PyPathCurve,
    speeds: Vec<f64>,
    scene_json: &str,
    dt: f64,
    sigma: f64,
    seed: u64,
    trigger_distance: f64,
) -> PyResult<SimResult> {
    let scene = SceneSpec::from_json(scene_json).map_err(to_py)?;
    let profile = SpeedProfile::new(speeds).map_err(to_py)?;
    let aim = AimModel::new(sigma, trigger_distance).map_err(to_py)?;
    let r = py.detach(|| sim::simulate(&curve.0, &profile, &scene, dt, &aim, seed)).map_err(to_py)?;
    Ok(SimResult {
        time_used: r.time_used,
        collisions: r.collisions,
        ray_attempts: r.ray_attempts,
        ray_hits: r.ray_hits,
        accuracy: r.accuracy,
        completed: r.completed,
    })
}

/// Three-panel SVG of the polyline, Bézier and Catmull-Rom paths.
#[pyfunction]
#[pyo3(signature = (keypoints, tension = 0.5, samples_per_span = 32))]
fn render_path_compare(
    keypoints: Vec<(f64, f64, f64, f64)>,
    tension: f64,
    samples_per_span: usize,
) -> PyResult<String> {
    let kps = to_keypoints(keypoints)?;
    let tension = Tension::new(tension).map_err(to_py)?;
    report::render_path_compare(&kps, tension, samples_per_span).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "roamcurve")]
pub fn roamcurve_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RoamcurveError", m.py().get_type::<RoamcurveError>())?;
    m.add_class::<PyPathCurve>()?;
    m.add_class::<SmoothnessReport>()?;
    m.add_class::<SimResult>()?;
    m.add_class::<CorrelationResult>()?;
    m.add_class::<NormalityResult>()?;
    m.add_class::<PyRegressionFit>()?;
    m.add_function(wrap_pyfunction!(load_keypoints, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(ks_normality, m)?)?;
    m.add_function(wrap_pyfunction!(linear_fit_with_band, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_study, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_study, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(render_path_compare, m)?)?;
    Ok(())
}
