//! Python bindings: systems, realizations, gap and commutator diagnostics,
//! validation and the spectral distance. Reports cross the boundary as JSON
//! strings.

use std::sync::OnceLock;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use spectral_limits::config::RunConfig;
use spectral_limits::diagnostics::{
    commutator_series, function_gap, generator_series, padded_resolvent_residual, resolvent_gap, resolvent_gap_eigen,
    st1_verdict, st2_verdict, strong_resolvent_residual, GapProbe, GapSeries, ProbeFunction, DEFAULT_GENERATORS_PER_LEVEL,
    DEFAULT_THRESHOLD, DEFAULT_WINDOW,
};
use spectral_limits::generators::{binary_chain, cantor_system, ci_system, middle_thirds};
use spectral_limits::inductive::{realization_validate, realize, system_validate, InductiveSystem, Realization};
use spectral_limits::operator::{eigh, ComplexMatrix, HermitianOperator};
use spectral_limits::triple::connes_distance;
use spectral_limits::{Complex64, Error, Tolerances};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Validation(_) | Error::Unsupported(_) | Error::Json(_) | Error::Io(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json(value: &impl Serialize) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// An inductive system of finite spectral triples with a lazily built
/// top-level realization.
#[pyclass(module = "spectral_limits", frozen)]
struct System {
    inner: InductiveSystem,
    tol: Tolerances,
    realization: OnceLock<Realization>,
}

impl System {
    fn wrap(inner: InductiveSystem, tol: Tolerances) -> Self {
        Self { inner, tol, realization: OnceLock::new() }
    }

    fn realization(&self) -> PyResult<&Realization> {
        if let Some(r) = self.realization.get() {
            return Ok(r);
        }
        let r = realize(&self.inner, self.inner.top_level(), &self.tol).map_err(py_err)?;
        Ok(self.realization.get_or_init(|| r))
    }

    fn gap_series(&self, probe: GapProbe) -> PyResult<GapSeries> {
        let r = self.realization()?;
        spectral_limits::diagnostics::gap_series(r, &probe, 0..=r.level()).map_err(py_err)
    }
}

#[pymethods]
impl System {
    /// Builds a system from a JSON run configuration.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let config = RunConfig::from_json(text).map_err(py_err)?;
        let system = config.system.build(&config.tolerances).map_err(py_err)?;
        Ok(Self::wrap(system, config.tolerances))
    }

    /// Loads a serialized system.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let system: InductiveSystem = serde_json::from_str(text).map_err(|e| py_err(e.into()))?;
        Ok(Self::wrap(system, Tolerances::default()))
    }

    /// Middle-thirds Cantor system with `levels` levels above level 0.
    #[staticmethod]
    #[pyo3(signature = (levels, grading = false))]
    fn cantor(levels: usize, grading: bool) -> PyResult<Self> {
        let system = cantor_system(&middle_thirds(levels), levels, grading).map_err(py_err)?;
        Ok(Self::wrap(system, Tolerances::default()))
    }

    /// Binary commutative AF chain with `D = Σ α_i (P_i − P_{i−1})`.
    #[staticmethod]
    fn christensen_ivan(alphas: Vec<f64>) -> PyResult<Self> {
        let tol = Tolerances::default();
        let chain = binary_chain(&alphas).map_err(py_err)?;
        Ok(Self::wrap(ci_system(&chain, alphas.len(), &tol).map_err(py_err)?, tol))
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    #[getter]
    fn top_level(&self) -> usize {
        self.inner.top_level()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims()
    }

    /// Eigenvalues of `D_j` in ascending order.
    fn dirac_spectrum(&self, j: usize) -> PyResult<Vec<f64>> {
        check_level(&self.inner, j)?;
        Ok(eigh(self.inner.triple(j).dirac(), &self.tol).map_err(py_err)?.eigenvalues().to_vec())
    }

    /// System and realization validation reports as JSON.
    fn validate(&self) -> PyResult<String> {
        let system = system_validate(&self.inner, &self.tol).map_err(py_err)?;
        let realization = realization_validate(self.realization()?, &self.tol).map_err(py_err)?;
        json(&serde_json::json!({ "system": system, "realization": realization }))
    }

    /// `‖P_j R_λ(D_J) P_j − R_λ(D_J)‖` computed directly.
    fn resolvent_gap(&self, j: usize, lam: Complex64) -> PyResult<f64> {
        resolvent_gap(self.realization()?, j, lam).map_err(py_err)
    }

    /// The same gap from the eigendata of `D_J` alone.
    fn resolvent_gap_eigen(&self, j: usize, lam: Complex64) -> PyResult<f64> {
        resolvent_gap_eigen(self.realization()?, j, lam).map_err(py_err)
    }

    /// Gap for a named probe function: lorentzian, gaussian or odd-lorentzian.
    fn function_gap(&self, j: usize, name: &str) -> PyResult<f64> {
        let f = ProbeFunction::from_name(name).map_err(py_err)?;
        function_gap(self.realization()?, j, &|x| f.eval(x)).map_err(py_err)
    }

    fn strong_resolvent_residual(&self, j: usize, lam: Complex64) -> PyResult<f64> {
        strong_resolvent_residual(self.realization()?, j, lam).map_err(py_err)
    }

    /// `(corrected, printed)` residuals of the padded-resolvent identity.
    fn padded_resolvent_residual(&self, j: usize, lam: Complex64) -> PyResult<(f64, f64)> {
        let p = padded_resolvent_residual(self.realization()?, j, lam).map_err(py_err)?;
        Ok((p.corrected, p.printed))
    }

    /// Gap series for `λ` with its ST1 verdict, as JSON.
    #[pyo3(signature = (lam, threshold = DEFAULT_THRESHOLD, window = DEFAULT_WINDOW))]
    fn st1(&self, lam: Complex64, threshold: f64, window: usize) -> PyResult<String> {
        let series = self.gap_series(GapProbe::resolvent(lam))?;
        let verdict = st1_verdict(&series, threshold, window);
        json(&serde_json::json!({ "series": series, "verdict": verdict }))
    }

    /// `‖[D_k, π_k(φ_{j,k}(a))]‖` for `k = j..=top` with `a` given by its
    /// real values on the points of a commutative `A_j`.
    fn commutator_norms(&self, j: usize, values: Vec<f64>) -> PyResult<Vec<f64>> {
        check_level(&self.inner, j)?;
        let a = spectral_limits::algebra::AlgebraElement::from_real_function(&values).map_err(py_err)?;
        let series = commutator_series(&self.inner, j, &a, self.inner.top_level()).map_err(py_err)?;
        Ok(series.entries.iter().map(|e| e.norm).collect())
    }

    /// Commutator series of the standard generators with the ST2 verdict, as
    /// JSON.
    #[pyo3(signature = (bound = None, window = DEFAULT_WINDOW))]
    fn st2(&self, bound: Option<f64>, window: usize) -> PyResult<String> {
        let top = self.inner.top_level();
        let series = generator_series(&self.inner, 0..=top, top, DEFAULT_GENERATORS_PER_LEVEL).map_err(py_err)?;
        let verdict = st2_verdict(&series, window, bound);
        json(&serde_json::json!({ "series": series, "verdict": verdict }))
    }

    /// Spectral distance between points `x` and `y` of the commutative
    /// level-`j` algebra; `inf` for disconnected points.
    fn distance(&self, j: usize, x: usize, y: usize) -> PyResult<f64> {
        check_level(&self.inner, j)?;
        Ok(connes_distance(self.inner.triple(j), x, y).map_err(py_err)?.value)
    }

    fn __repr__(&self) -> String {
        format!("System(dims={:?})", self.inner.dims())
    }
}

fn check_level(s: &InductiveSystem, j: usize) -> PyResult<()> {
    if j > s.top_level() {
        return Err(PyValueError::new_err(format!("level {j} exceeds the top level {}", s.top_level())));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix given as rows of complex numbers.
#[pyfunction]
fn eigvalsh(rows: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let tol = Tolerances::default();
    let h = HermitianOperator::new(ComplexMatrix::from_fn(n, n, |r, c| rows[r][c]), &tol).map_err(py_err)?;
    Ok(eigh(&h, &tol).map_err(py_err)?.eigenvalues().to_vec())
}

#[pymodule]
#[pyo3(name = "spectral_limits")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(eigvalsh, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
