use curvcomp::comparison::{self, ComparisonConfig};
use curvcomp::hypersurface::{Direction, FourierCurve, OffsetEllipse, OffsetSphere, Profile, Shape, Surface};
use curvcomp::modelspace::{self, ModelSpace, WarpedProfile};
use curvcomp::{polar, rolling, scene};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

create_exception!(curvcomp_py, CurvcompError, PyException, "Base class of all curvcomp errors.");
create_exception!(curvcomp_py, HypothesisError, CurvcompError, "A theorem hypothesis does not hold.");
create_exception!(curvcomp_py, FeasibilityError, CurvcompError, "The reference point is too deep inside the body.");
create_exception!(curvcomp_py, NoCompactSphereError, CurvcompError, "No compact sphere has the requested curvature.");

fn to_py_err(e: curvcomp::Error) -> PyErr {
    let msg = e.to_string();
    match e {
        curvcomp::Error::Hypothesis(_) => HypothesisError::new_err(msg),
        curvcomp::Error::Feasibility { .. } => FeasibilityError::new_err(msg),
        curvcomp::Error::NoCompactSphere { .. } => NoCompactSphereError::new_err(msg),
        _ => CurvcompError::new_err(msg),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_bound_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_bound_py_any(py)
        }
    }
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| CurvcompError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn direction(name: &str) -> PyResult<Direction> {
    match name {
        "meridian" => Ok(Direction::Meridian),
        "parallel" => Ok(Direction::Parallel),
        other => Err(CurvcompError::new_err(format!("direction must be 'meridian' or 'parallel', got {other:?}"))),
    }
}

/// A model space: constant curvature `c` in dimension 2 or 3, or a warped
/// surface with profile `t + a_2 t² + a_3 t³ + ...`.
#[pyclass(name = "Space", module = "curvcomp_py", frozen)]
struct PySpace {
    inner: ModelSpace,
}

#[pymethods]
impl PySpace {
    #[staticmethod]
    #[pyo3(signature = (c, dim = 2))]
    fn constant(c: f64, dim: u8) -> PyResult<Self> {
        Ok(Self { inner: ModelSpace::constant(c, dim).map_err(to_py_err)? })
    }

    #[staticmethod]
    fn warped(coeffs: Vec<f64>, t_max: f64) -> PyResult<Self> {
        let profile = WarpedProfile::new(coeffs, t_max).map_err(to_py_err)?;
        Ok(Self { inner: ModelSpace::warped(profile) })
    }

    #[getter]
    fn dim(&self) -> u8 {
        self.inner.dim()
    }

    /// `(min, max)` of the sectional curvature.
    fn curvature_range(&self) -> (f64, f64) {
        self.inner.curvature_range()
    }

    /// Normal curvature of the geodesic sphere of radius `t` about the pole.
    fn sphere_curvature(&self, t: f64) -> PyResult<f64> {
        modelspace::sphere_mu(&self.inner, t).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        match &self.inner {
            ModelSpace::Constant { c, dim } => format!("Space.constant({c}, dim={dim})"),
            ModelSpace::Warped(p) => format!("Space.warped({:?}, {})", p.coeffs(), p.t_max()),
        }
    }
}

/// A validated body, given as a radial graph about the pole.
#[pyclass(name = "Body", module = "curvcomp_py", frozen)]
struct PyBody {
    inner: Surface,
}

impl PyBody {
    fn build(profile: Profile, revolution: bool, star_shaped: bool, space: &PySpace) -> PyResult<Self> {
        let shape = if revolution { Shape::Revolution(profile) } else { Shape::Curve(profile) };
        Ok(Self { inner: Surface::new(shape, star_shaped, &space.inner).map_err(to_py_err)? })
    }
}

#[pymethods]
impl PyBody {
    /// `p(θ) = a0 + Σ a_k cos kθ + b_k sin kθ`, with `harmonics = [(a_1, b_1), ...]`.
    #[staticmethod]
    #[pyo3(signature = (space, a0, harmonics, revolution = false, star_shaped = false))]
    fn fourier(space: &PySpace, a0: f64, harmonics: Vec<(f64, f64)>, revolution: bool, star_shaped: bool) -> PyResult<Self> {
        Self::build(Profile::Fourier(FourierCurve::new(a0, harmonics)), revolution, star_shaped, space)
    }

    /// Geodesic sphere of radius `r` centred at distance `a` from the pole.
    #[staticmethod]
    #[pyo3(signature = (space, r, a, revolution = false))]
    fn offset_sphere(space: &PySpace, r: f64, a: f64, revolution: bool) -> PyResult<Self> {
        Self::build(Profile::OffsetSphere(OffsetSphere { r, a }), revolution, false, space)
    }

    /// Euclidean ellipse with semi-axes `a`, `b`, centre shifted by `e` along the first axis.
    #[staticmethod]
    #[pyo3(signature = (space, a, b, e = 0.0, revolution = false))]
    fn offset_ellipse(space: &PySpace, a: f64, b: f64, e: f64, revolution: bool) -> PyResult<Self> {
        Self::build(Profile::OffsetEllipse(OffsetEllipse { a, b, e }), revolution, false, space)
    }

    #[getter]
    fn is_revolution(&self) -> bool {
        self.inner.is_revolution()
    }

    /// `(p, p', p'')` at parameter `theta`.
    fn jet(&self, space: &PySpace, theta: f64) -> (f64, f64, f64) {
        let j = self.inner.jet(&space.inner, theta);
        (j.p, j.dp, j.ddp)
    }

    #[pyo3(signature = (space, theta, direction = "meridian"))]
    fn normal_curvature(&self, space: &PySpace, theta: f64, direction: &str) -> PyResult<f64> {
        Ok(self.inner.normal_curvature(&space.inner, theta, self::direction(direction)?))
    }

    fn normal_angle_cos(&self, space: &PySpace, theta: f64) -> f64 {
        self.inner.normal_angle_cos(&space.inner, theta)
    }

    fn support_function(&self, space: &PySpace, theta: f64) -> f64 {
        self.inner.support_function(&space.inner, theta)
    }

    #[pyo3(signature = (space, n = 1024))]
    fn kn_range<'py>(&self, py: Python<'py>, space: &PySpace, n: usize) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.inner.kn_range(&space.inner, n).map_err(to_py_err)?)
    }

    /// `(d, rho_max)`: smallest and largest distance from the pole.
    fn rho_extrema(&self, space: &PySpace) -> PyResult<(f64, f64)> {
        let e = self.inner.rho_extrema(&space.inner).map_err(to_py_err)?;
        Ok((e.d, e.rho_max))
    }

    fn __repr__(&self) -> String {
        format!("Body({:?})", self.inner.profile())
    }
}

#[pyfunction]
fn radius_for_curvature(c: f64, curvature: f64) -> PyResult<f64> {
    modelspace::radius_for_curvature(c, curvature).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (body, space, c1, k1, n_levels = 64, tol = 1e-7))]
fn verify_angle<'py>(
    py: Python<'py>,
    body: &PyBody,
    space: &PySpace,
    c1: f64,
    k1: f64,
    n_levels: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ComparisonConfig::lower(c1, k1).with_levels(n_levels).with_tol(tol);
    let rep = py.detach(|| comparison::verify_angle(&body.inner, &space.inner, &config)).map_err(to_py_err)?;
    report(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (body, space, c1, k1, n_levels = 64, tol = 1e-7))]
fn verify_support<'py>(
    py: Python<'py>,
    body: &PyBody,
    space: &PySpace,
    c1: f64,
    k1: f64,
    n_levels: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ComparisonConfig::lower(c1, k1).with_levels(n_levels).with_tol(tol);
    let rep = py.detach(|| comparison::verify_support(&body.inner, &space.inner, &config)).map_err(to_py_err)?;
    report(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (body, space, c2, k2, n_levels = 64, tol = 1e-7))]
fn verify_dual<'py>(
    py: Python<'py>,
    body: &PyBody,
    space: &PySpace,
    c2: f64,
    k2: f64,
    n_levels: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = ComparisonConfig::upper(c2, k2).with_levels(n_levels).with_tol(tol);
    let rep = py.detach(|| comparison::verify_dual(&body.inner, &space.inner, &config)).map_err(to_py_err)?;
    report(py, &rep)
}

/// Monotonicity along every trajectory rooted at the nearest point.
#[pyfunction]
#[pyo3(signature = (body, space, c1, k1, tol = 1e-7))]
fn verify_monotone<'py>(py: Python<'py>, body: &PyBody, space: &PySpace, c1: f64, k1: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let config = ComparisonConfig::lower(c1, k1).with_tol(tol);
    let reps = py
        .detach(|| {
            comparison::rooted_segments(&body.inner, &space.inner)?
                .iter()
                .map(|seg| comparison::verify_monotone(&body.inner, &space.inner, &config, seg))
                .collect::<curvcomp::Result<Vec<_>>>()
        })
        .map_err(to_py_err)?;
    report(py, &reps)
}

/// Largest Riccati residual over all monotone segments.
#[pyfunction]
#[pyo3(signature = (body, space, n = 256))]
fn riccati_residual(body: &PyBody, space: &PySpace, n: usize) -> PyResult<f64> {
    let mut worst: f64 = 0.0;
    for seg in body.inner.monotone_segments(&space.inner).map_err(to_py_err)? {
        worst = worst.max(body.inner.riccati_residual(&space.inner, &seg, n).map_err(to_py_err)?.max_residual);
    }
    Ok(worst)
}

/// Rolling check; `part` is "A" (ball inside the body) or "B" (body inside the ball).
#[pyfunction]
#[pyo3(signature = (body, space, part, lam, n_p = 256, n_x = 4096, tol = 1e-8))]
#[allow(clippy::too_many_arguments)]
fn check_rolling<'py>(
    py: Python<'py>,
    body: &PyBody,
    space: &PySpace,
    part: &str,
    lam: f64,
    n_p: usize,
    n_x: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let part = match part {
        "A" | "a" => rolling::Part::A,
        "B" | "b" => rolling::Part::B,
        other => return Err(CurvcompError::new_err(format!("part must be 'A' or 'B', got {other:?}"))),
    };
    let rep = py
        .detach(|| rolling::check_rolling(&body.inner, &space.inner, part, lam, n_p, n_x, tol))
        .map_err(to_py_err)?;
    report(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (body, space, n = 2048, tol = 1e-5))]
fn polar_check<'py>(py: Python<'py>, body: &PyBody, space: &PySpace, n: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let rep = py.detach(|| polar::polar_check(&body.inner, &space.inner, n, tol)).map_err(to_py_err)?;
    report(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (body, space, direction, n = 2048, tol = 1e-4))]
fn projection_check<'py>(
    py: Python<'py>,
    body: &PyBody,
    space: &PySpace,
    direction: [f64; 3],
    n: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = py
        .detach(|| rolling::projection_lemma_check(&body.inner, &space.inner, direction, n, tol))
        .map_err(to_py_err)?;
    report(py, &rep)
}

/// Runs a scene given as JSON text and returns the report the command line
/// would write, including `exit_code`. Malformed scenes raise.
#[pyfunction]
fn run_scene<'py>(py: Python<'py>, scene_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let spec = scene::SceneSpec::from_json(scene_json).map_err(to_py_err)?;
    let rep = py.detach(|| scene::run_scene(&spec));
    let mut v: Value = serde_json::from_str(&rep.to_json()).map_err(|e| CurvcompError::new_err(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("exit_code".into(), rep.exit_code().into());
    }
    json_to_py(py, &v)
}

#[pymodule]
fn curvcomp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PySpace>()?;
    m.add_class::<PyBody>()?;
    m.add("CurvcompError", py.get_type::<CurvcompError>())?;
    m.add("HypothesisError", py.get_type::<HypothesisError>())?;
    m.add("FeasibilityError", py.get_type::<FeasibilityError>())?;
    m.add("NoCompactSphereError", py.get_type::<NoCompactSphereError>())?;
    m.add_function(wrap_pyfunction!(radius_for_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(verify_angle, m)?)?;
    m.add_function(wrap_pyfunction!(verify_support, m)?)?;
    m.add_function(wrap_pyfunction!(verify_dual, m)?)?;
    m.add_function(wrap_pyfunction!(verify_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(riccati_residual, m)?)?;
    m.add_function(wrap_pyfunction!(check_rolling, m)?)?;
    m.add_function(wrap_pyfunction!(polar_check, m)?)?;
    m.add_function(wrap_pyfunction!(projection_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_scene, m)?)?;
    Ok(())
}
