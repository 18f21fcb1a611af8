//! Python bindings: `import corremit`.

use std::path::PathBuf;

use corremit_core::collective::{self, MacrospinTrajectory};
use corremit_core::decay::{self, DecayMatrix};
use corremit_core::io::{config, verify};
use corremit_core::noise;
use corremit_core::numerics::quad::QuadratureSpec;
use corremit_core::response::{self, ResponseMode, ResponsePart, SpiralSetup};
use corremit_core::{DipoleEnsemble, PhysicalParams, Projection};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: corremit_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Electron-gas and dipole parameters (CGS; `delta` in rad/s, `gamma` in rad/(s G)).
#[pyclass(name = "Params", module = "corremit", from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: PhysicalParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (v_f, mass, d, delta, gamma, projection = "spin-half"))]
    fn new(v_f: f64, mass: f64, d: f64, delta: f64, gamma: f64, projection: &str) -> PyResult<Self> {
        let projection: Projection = projection.parse().map_err(err)?;
        Ok(PyParams {
            inner: PhysicalParams::new(v_f, mass, d, delta, gamma, projection).map_err(err)?,
        })
    }

    /// Free-electron defaults: v_F = 1e8 cm/s, Δ = 2π·1.2 GHz, d = 0.
    #[staticmethod]
    fn standard() -> Self {
        PyParams {
            inner: PhysicalParams::standard(),
        }
    }

    #[staticmethod]
    fn from_config(path: PathBuf) -> PyResult<Self> {
        Ok(PyParams {
            inner: config::parse_config(&path).map_err(err)?,
        })
    }

    fn with_d(&self, d: f64) -> PyResult<Self> {
        let inner = self.inner.with_d(d);
        inner.validate().map_err(err)?;
        Ok(PyParams { inner })
    }

    fn with_delta(&self, delta: f64) -> PyResult<Self> {
        let inner = self.inner.with_delta(delta);
        inner.validate().map_err(err)?;
        Ok(PyParams { inner })
    }

    #[getter]
    fn v_f(&self) -> f64 {
        self.inner.v_f
    }
    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }
    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn k_f(&self) -> f64 {
        self.inner.k_f()
    }
    #[getter]
    fn lambda_f(&self) -> f64 {
        self.inner.lambda_f()
    }
    #[getter]
    fn e_f(&self) -> f64 {
        self.inner.e_f()
    }

    fn to_config(&self) -> String {
        config::render_config(&self.inner)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(v_f={:e}, mass={:e}, d={:e}, delta={:e}, gamma={:e}, projection='{}')",
            p.v_f, p.mass, p.d, p.delta, p.gamma, p.projection
        )
    }
}

/// Decay-rate matrix γ_nm (Hz) of a dipole ensemble.
#[pyclass(name = "DecayMatrix", module = "corremit")]
struct PyDecayMatrix {
    inner: DecayMatrix,
}

#[pymethods]
impl PyDecayMatrix {
    /// Matrix from explicit real rates (rows of equal length).
    #[staticmethod]
    #[pyo3(signature = (rows, gamma0 = 1.0))]
    fn from_rows(rows: Vec<Vec<f64>>, gamma0: f64) -> PyResult<Self> {
        Ok(PyDecayMatrix {
            inner: DecayMatrix::from_rows(&rows, gamma0).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn gamma0(&self) -> f64 {
        self.inner.gamma0
    }

    /// Rates as nested lists of complex numbers.
    fn rates(&self) -> Vec<Vec<Complex64>> {
        let r = &self.inner.rates;
        (0..r.nrows()).map(|i| (0..r.ncols()).map(|j| r[(i, j)]).collect()).collect()
    }

    /// Ascending eigenvalues (Hz).
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectrum().map_err(err)?.to_vec())
    }

    fn dtr_excited(&self) -> f64 {
        collective::dtr_excited(&self.inner)
    }

    fn g2_zero(&self) -> PyResult<f64> {
        collective::g2_zero(&self.inner).map_err(err)
    }

    fn r_coherent(&self) -> f64 {
        collective::r_coherent(&self.inner)
    }
}

/// γ_nm for z-aligned dipoles at in-plane `positions` (cm).
#[pyfunction]
fn decay_matrix(params: &PyParams, positions: Vec<(f64, f64)>) -> PyResult<PyDecayMatrix> {
    let ens = DipoleEnsemble::z_aligned(positions.iter().map(|&(x, y)| [x, y]).collect()).map_err(err)?;
    Ok(PyDecayMatrix {
        inner: decay::build_matrix(&ens, &params.inner).map_err(err)?,
    })
}

/// Oersted noise C^{-+}(ω, q) in G² s.
#[pyfunction]
#[pyo3(signature = (params, omega, q, f = 1.0))]
fn oersted_noise(params: &PyParams, omega: f64, q: f64, f: f64) -> PyResult<f64> {
    noise::oersted_noise(&params.inner, omega, q, f).map_err(err)
}

/// Dimensionless transverse-current spectral function C(q, ω).
#[pyfunction]
fn transverse_current_c(params: &PyParams, omega: f64, q: f64) -> PyResult<f64> {
    noise::transverse_current_c(&params.inner, omega, q).map_err(err)
}

/// Single-dipole rate γ(r) in Hz.
#[pyfunction]
fn gamma_r(params: &PyParams, r: f64) -> PyResult<f64> {
    decay::gamma_r(&params.inner, r).map_err(err)
}

#[pyfunction]
fn gamma0(params: &PyParams) -> PyResult<f64> {
    decay::gamma0(&params.inner).map_err(err)
}

/// Dark-state statistics; one dict per spacing (units of λ_F).
#[pyfunction]
#[pyo3(signature = (params, n, spacings, realizations, seed, threshold = 0.1))]
fn disorder_sweep<'py>(
    py: Python<'py>,
    params: &PyParams,
    n: usize,
    spacings: Vec<f64>,
    realizations: usize,
    seed: u64,
    threshold: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let stats = py
        .detach(|| decay::disorder_sweep(&params.inner, n, &spacings, realizations, threshold, seed))
        .map_err(err)?;
    stats
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("spacing", s.spacing)?;
            d.set_item("dark_fraction", s.dark_fraction)?;
            d.set_item("dark_fraction_stderr", s.dark_fraction_stderr)?;
            d.set_item("mean_min_rate", s.mean_min_rate)?;
            d.set_item("mean_min_rate_stderr", s.mean_min_rate_stderr)?;
            Ok(d)
        })
        .collect()
}

/// Superradiance length λ_SR (cm) from the transverse-current noise.
#[pyfunction]
fn lambda_sr(params: &PyParams) -> PyResult<f64> {
    collective::lambda_sr(&params.inner, &QuadratureSpec::default()).map_err(err)
}

#[pyfunction]
fn lambda_sr_prime(params: &PyParams) -> f64 {
    collective::lambda_sr_prime(&params.inner)
}

fn trajectory_dict<'py>(py: Python<'py>, tr: &MacrospinTrajectory) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", tr.times.clone())?;
    d.set_item("sx", tr.sx.clone())?;
    d.set_item("sy", tr.sy.clone())?;
    d.set_item("sz", tr.sz.clone())?;
    Ok(d)
}

/// Macrospin ⟨S(t)⟩ (units of ħ); `method` is "exact" or "ode".
#[pyfunction]
#[pyo3(signature = (n, gamma0, delta, times, method = "exact"))]
fn macrospin<'py>(
    py: Python<'py>,
    n: usize,
    gamma0: f64,
    delta: f64,
    times: Vec<f64>,
    method: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let tr = match method {
        "exact" => collective::macrospin_exact(n, gamma0, delta, &times),
        "ode" => collective::macrospin_ode(n, gamma0, delta, &times),
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)?;
    trajectory_dict(py, &tr)
}

/// Exact retarded correlator G₀ᴿ(q, ω) in erg.
#[pyfunction]
fn green_exact(params: &PyParams, q: f64, omega: f64) -> PyResult<Complex64> {
    response::green_exact(&params.inner, q, omega).map_err(err)
}

/// Kubo coefficient (1/ħ)G₀ᴿ + e²ρ_e/m; `part` is "total", "paramagnetic" or "diamagnetic".
#[pyfunction]
#[pyo3(signature = (params, q, omega, part = "total", small_q = false))]
fn kubo_coefficient(params: &PyParams, q: f64, omega: f64, part: &str, small_q: bool) -> PyResult<Complex64> {
    let part = parse_part(part)?;
    let mode = if small_q { ResponseMode::SmallQ } else { ResponseMode::Exact };
    response::kubo_coefficient(&params.inner, q, omega, mode, part).map_err(err)
}

fn parse_part(part: &str) -> PyResult<ResponsePart> {
    match part {
        "total" => Ok(ResponsePart::Total),
        "paramagnetic" => Ok(ResponsePart::Paramagnetic),
        "diamagnetic" => Ok(ResponsePart::Diamagnetic),
        other => Err(PyValueError::new_err(format!("unknown part {other:?}"))),
    }
}

/// Static orbital susceptibility from the q → 0 limit; returns (value, error estimate).
#[pyfunction]
fn landau_chi(params: &PyParams) -> PyResult<(f64, f64)> {
    let l = response::landau_chi(&params.inner).map_err(err)?;
    Ok((l.value, l.error))
}

/// Current frames of the spiral wave on an n_rho × n_phi grid at `frames` evenly spaced times.
/// Returns (rho, phi, [(t, j_rho, j_phi)]) with j flattened as rho-major.
#[pyfunction]
#[pyo3(signature = (n_rho, n_phi, frames, part = "total"))]
fn spiral_frames(
    py: Python<'_>,
    n_rho: usize,
    n_phi: usize,
    frames: usize,
    part: &str,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<(f64, Vec<f64>, Vec<f64>)>)> {
    let part = parse_part(part)?;
    let out = py
        .detach(|| {
            let setup = SpiralSetup::spiral();
            let grid = setup.grid(n_rho, n_phi)?;
            let syn = setup.synthesis(grid.clone(), &Default::default())?;
            Ok::<_, corremit_core::Error>((grid, syn.frames(part, &setup.frame_times(frames))?))
        })
        .map_err(err)?;
    let (grid, fs) = out;
    Ok((grid.rho, grid.phi, fs.into_iter().map(|f| (f.time, f.j_rho, f.j_phi)).collect()))
}

/// Cross-module consistency suite; returns (all_pass, [(name, value, target, tolerance, pass)]).
#[pyfunction]
#[pyo3(signature = (params = None, spin_degeneracy = 2.0))]
fn run_verify(
    params: Option<&PyParams>,
    spin_degeneracy: f64,
) -> PyResult<(bool, Vec<(String, f64, f64, f64, bool)>)> {
    let p = params.map(|p| p.inner).unwrap_or_else(PhysicalParams::standard);
    let r = verify::run_verify(&p, &verify::VerifyOptions { spin_degeneracy }).map_err(err)?;
    Ok((
        r.all_pass(),
        r.checks
            .iter()
            .map(|c| (c.name.to_string(), c.value, c.target, c.tolerance, c.pass))
            .collect(),
    ))
}

#[pymodule]
fn corremit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyDecayMatrix>()?;
    m.add_function(wrap_pyfunction!(decay_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(oersted_noise, m)?)?;
    m.add_function(wrap_pyfunction!(transverse_current_c, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_r, m)?)?;
    m.add_function(wrap_pyfunction!(gamma0, m)?)?;
    m.add_function(wrap_pyfunction!(disorder_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_sr, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_sr_prime, m)?)?;
    m.add_function(wrap_pyfunction!(macrospin, m)?)?;
    m.add_function(wrap_pyfunction!(green_exact, m)?)?;
    m.add_function(wrap_pyfunction!(kubo_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(landau_chi, m)?)?;
    m.add_function(wrap_pyfunction!(spiral_frames, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
