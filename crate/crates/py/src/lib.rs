//! Python bindings: symbols, transmission data, the boundary symbol and identity runs.

use fracgreen::cli::{run_identity, Bumps, CampaignConfig, GridSpec, Tolerances};
use fracgreen::grid::Grid;
use fracgreen::symbol::{compute_transmission, reduced_symbol, Cutoff, HomogeneousSymbol, SymbolSpec, TransmissionData};
use fracgreen::verify::{IdentityId, IdentityReport, Route};
use fracgreen::wiener_hopf::{boundary_jump_symbol, wh_decompose, WhConfig};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: fracgreen::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Transmission", frozen)]
struct PyTransmission(TransmissionData);

#[pymethods]
impl PyTransmission {
    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }
    #[getter]
    fn mu_star(&self) -> f64 {
        self.0.mu_star
    }
    #[getter]
    fn s0(&self) -> f64 {
        self.0.s0
    }
    fn __repr__(&self) -> String {
        format!("Transmission(a={}, delta={}, mu={}, mu_star={}, s0={})", self.0.a, self.0.delta, self.0.mu, self.0.mu_star, self.0.s0)
    }
}

/// A preset symbol, e.g. `Symbol("frac_laplacian_drift", 0.5, [0.5], dim=1)`.
#[pyclass(name = "Symbol", frozen)]
struct PySymbol {
    spec: SymbolSpec,
    dim: usize,
    sym: HomogeneousSymbol,
}

#[pymethods]
impl PySymbol {
    #[new]
    #[pyo3(signature = (preset, a, params = vec![], dim = 1))]
    fn new(preset: &str, a: f64, params: Vec<f64>, dim: usize) -> PyResult<Self> {
        let spec = SymbolSpec::new(preset, a, params);
        let sym = HomogeneousSymbol::from_spec(&spec, dim).map_err(err)?;
        Ok(PySymbol { spec, dim, sym })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.dim
    }

    #[getter]
    fn preset(&self) -> &str {
        self.sym.preset_id()
    }

    /// `L(xi)`; raises at the origin.
    fn eval(&self, xi: Vec<f64>) -> PyResult<Complex64> {
        self.sym.eval(&xi).map_err(err)
    }

    fn transmission(&self) -> PyResult<PyTransmission> {
        compute_transmission(&self.sym).map(PyTransmission).map_err(err)
    }

    /// Boundary symbol on the tangential frequencies of an `n`-point grid:
    /// list of `(xi', b, b_jump)`.
    #[pyo3(signature = (n, box_halfwidth = 8.0))]
    fn boundary_symbol(&self, n: usize, box_halfwidth: f64) -> PyResult<Vec<(f64, Complex64, Complex64)>> {
        let td = compute_transmission(&self.sym).map_err(err)?;
        let g = Grid::new(self.dim, n, box_halfwidth).map_err(err)?;
        let q = reduced_symbol(&self.sym, &td, Some(Cutoff::default()));
        let dec = wh_decompose(&q, &g, &WhConfig::default()).map_err(err)?;
        let bs = boundary_jump_symbol(&dec).map_err(err)?;
        Ok((0..dec.lines.len()).map(|l| (g.xi_p(l), bs.b_vals[l], bs.b_jump[l])).collect())
    }

    /// Runs one identity (`"ibp_general"`, `"full_green"`, ...) on an `n`-point grid.
    #[pyo3(signature = (identity, n, box_halfwidth = 8.0))]
    fn verify(&self, py: Python<'_>, identity: &str, n: usize, box_halfwidth: f64) -> PyResult<PyReport> {
        let id: IdentityId = identity.parse().map_err(err)?;
        let cfg = CampaignConfig {
            symbol: self.spec.clone(),
            grid: GridSpec { dim: self.dim, n: vec![n], box_halfwidth },
            bumps: Bumps::default(),
            identities: vec![id],
            tolerances: Tolerances::default(),
            route: Route::Fft,
            cutoff_radius: 1.0,
            output_dir: "out".into(),
            seed: 0,
            mu_override: None,
        };
        cfg.validate().map_err(err)?;
        py.detach(|| run_identity(&cfg, id, n)).map(PyReport).map_err(err)
    }
}

#[pyclass(name = "Report", frozen)]
struct PyReport(IdentityReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn identity_id(&self) -> &'static str {
        self.0.identity_id.as_str()
    }
    #[getter]
    fn n(&self) -> usize {
        self.0.grid.n
    }
    #[getter]
    fn lhs(&self) -> Complex64 {
        self.0.lhs
    }
    #[getter]
    fn rhs(&self) -> Complex64 {
        self.0.rhs
    }
    #[getter]
    fn abs_residual(&self) -> f64 {
        self.0.abs_residual
    }
    #[getter]
    fn rel_residual(&self) -> f64 {
        self.0.rel_residual
    }
    fn __repr__(&self) -> String {
        format!("Report({} N={} rel_residual={:.3e})", self.0.identity_id.as_str(), self.0.grid.n, self.0.rel_residual)
    }
}

#[pymodule]
fn fracgreen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySymbol>()?;
    m.add_class::<PyTransmission>()?;
    m.add_class::<PyReport>()?;
    Ok(())
}
