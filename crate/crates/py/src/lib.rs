//! Python bindings: the main types and operations of the toolkit, exposed as
//! plain functions and one spectrum class. Build with
//! `cargo build -p algrf-py --release`; `python/smoke_test.py` loads the
//! produced cdylib directly.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use algrf::ansatz_toolkit::{
    constraint_solve, constraint_t0, cutoff_gamma, radial_potential, ConstraintParams, CutoffKind,
    CutoffProfile, RadialSource, SignConvention,
};
use algrf::decay_bootstrap::{energy_decay_exponent, fit_decay_exponent, run_bootstrap_chain};
use algrf::fiber_spectrum;
use algrf::nikulin_census::{distinct_triples, generate_tables, orders_list};
use algrf::spectral_laplace::{
    harmonic_mode, mode_greens_solve, neumann_poincare_annulus, RadialGrid, RadialProfile,
};

fn to_py_err(e: algrf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Compact fiber represented by its Laplace spectrum.
#[pyclass(name = "FiberSpectrum", skip_from_py_object)]
#[derive(Clone)]
struct PyFiberSpectrum {
    inner: fiber_spectrum::FiberSpectrum,
}

#[pymethods]
impl PyFiberSpectrum {
    /// Flat-torus spectrum up to `cutoff` with lattice multiplicities.
    #[staticmethod]
    fn flat_torus(side_lengths: Vec<f64>, cutoff: f64) -> PyResult<Self> {
        fiber_spectrum::FiberSpectrum::flat_torus(&side_lengths, cutoff)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }

    /// Sorted `(eigenvalue, multiplicity)` pairs.
    fn eigenvalues(&self) -> Vec<(f64, u32)> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.inner.volume
    }

    #[getter]
    fn poincare_constant(&self) -> f64 {
        self.inner.poincare_constant
    }

    /// `k₀ = sqrt(min{μ : μ > 0})`, the spectral-gap rate.
    fn smallest_positive_sqrt(&self) -> PyResult<f64> {
        self.inner.smallest_positive_sqrt().map_err(to_py_err)
    }

    /// Violated invariants, empty when the spectrum is valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        fiber_spectrum::FiberSpectrum::from_json(s)
            .map(|inner| Self { inner })
            .map_err(to_py_err)
    }
}

/// Census totals and distinct-triple summary.
#[pyfunction]
fn census_summary(py: Python<'_>) -> PyResult<Py<PyDict>> {
    let census = generate_tables();
    let triples = distinct_triples(&census.rows);
    let d = PyDict::new(py);
    d.set_item("table1_total", census.table1_total)?;
    d.set_item("table2_total", census.table2_total)?;
    d.set_item("table3_total", census.table3_total)?;
    d.set_item("grand_total", census.grand_total)?;
    d.set_item("distinct_triples", triples.distinct_count)?;
    d.set_item("discrepancies", census.discrepancies.clone())?;
    d.set_item("t3_coincidence", triples.t3_coincidence)?;
    Ok(d.into())
}

/// All census rows as dictionaries of derived columns.
#[pyfunction]
fn census_rows(py: Python<'_>) -> PyResult<Vec<Py<PyDict>>> {
    let census = generate_tables();
    census
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            d.set_item("table", row.record.table.label())?;
            d.set_item("g", row.record.genus_g)?;
            d.set_item("rational_curves", row.record.rational_count)?;
            d.set_item("rk_ns", row.record.rk_ns)?;
            d.set_item("b2", row.derived.b2)?;
            d.set_item("b3", row.derived.b3)?;
            d.set_item("b4", row.derived.b4)?;
            d.set_item("dim_moduli", row.derived.dim_moduli)?;
            d.set_item("dim_family", row.derived.dim_family)?;
            d.set_item("printed_match", row.printed_match)?;
            Ok(d.into())
        })
        .collect()
}

/// The 39 admissible automorphism orders.
#[pyfunction]
fn admissible_orders() -> Vec<u32> {
    orders_list().orders
}

/// `Q = −Σ_{j≥2} e_j(λ)` from model-relative eigenvalues.
#[pyfunction]
fn ma_nonlinearity_q(eigenvalues: Vec<f64>) -> f64 {
    let d = eigenvalues.len();
    algrf::decay_bootstrap::q_from_eigenvalues(&eigenvalues, d)
}

/// `β₀ = −log μ / log 2`.
#[pyfunction]
fn energy_exponent(mu_c: f64) -> PyResult<f64> {
    energy_decay_exponent(mu_c).map_err(to_py_err)
}

/// Least-squares decay exponent of `(r, sup_norm)` samples: `(β̂, R²)`.
#[pyfunction]
fn fit_decay(samples: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    fit_decay_exponent(&samples)
        .map(|r| (r.exponent, r.r_squared))
        .map_err(to_py_err)
}

/// Per-mode Green solve against a smooth bump: returns radii, the real part
/// of the solution, and the finite-difference residual.
#[pyfunction]
#[pyo3(signature = (k, mu_ordinal, r_max=1000.0, nodes=512))]
fn greens_solve_bump(
    py: Python<'_>,
    k: i32,
    mu_ordinal: usize,
    r_max: f64,
    nodes: usize,
) -> PyResult<Py<PyDict>> {
    let spectrum =
        fiber_spectrum::FiberSpectrum::flat_torus(&[1.0, 1.0], 250.0).map_err(to_py_err)?;
    let grid = RadialGrid::log(1.0, r_max, nodes).map_err(to_py_err)?;
    let mode = spectrum.mode(k, mu_ordinal).map_err(to_py_err)?;
    let bump = |r: f64| {
        let t: f64 = (r - 2.5) / 0.8;
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    };
    let rhs = if k == 0 && mu_ordinal == 0 {
        let wide = |r: f64| {
            let t: f64 = (r - 25.0) / 10.0;
            if t.abs() < 1.0 {
                (-1.0 / (1.0 - t * t)).exp()
            } else {
                0.0
            }
        };
        let m1 = grid.integrate_r_dr(|_, r| bump(r));
        let m2 = grid.integrate_r_dr(|_, r| wide(r));
        let ratio = m1 / m2;
        RadialProfile::from_fn(mode, grid.clone(), move |r| bump(r) - ratio * wide(r))
    } else {
        RadialProfile::from_fn(mode, grid.clone(), bump)
    };
    let sol = mode_greens_solve(mode, &rhs, Complex64::new(0.0, 0.0)).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("r", grid.nodes().to_vec())?;
    d.set_item(
        "u_re",
        sol.profile.values.iter().map(|v| v.re).collect::<Vec<_>>(),
    )?;
    d.set_item("relative_residual", sol.relative_residual())?;
    Ok(d.into())
}

/// Decaying harmonic extension for a mode: samples of `|u|` on the grid.
#[pyfunction]
#[pyo3(signature = (k, mu_ordinal, r_max=100.0, nodes=512))]
fn harmonic_profile(
    k: i32,
    mu_ordinal: usize,
    r_max: f64,
    nodes: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let spectrum =
        fiber_spectrum::FiberSpectrum::flat_torus(&[1.0, 1.0], 250.0).map_err(to_py_err)?;
    let grid = RadialGrid::log(1.0, r_max, nodes).map_err(to_py_err)?;
    let mode = spectrum.mode(k, mu_ordinal).map_err(to_py_err)?;
    let h = harmonic_mode(mode, Complex64::new(1.0, 0.0), &grid).map_err(to_py_err)?;
    Ok((
        grid.nodes().to_vec(),
        h.values.iter().map(|v| v.norm()).collect(),
    ))
}

/// Neumann Poincaré constant of the flat annulus.
#[pyfunction]
fn poincare_annulus(r1: f64, r2: f64, fourier_cutoff: u32) -> PyResult<f64> {
    neumann_poincare_annulus(r1, r2, fourier_cutoff).map_err(to_py_err)
}

/// Moment `Γ_χ` of the standard cutoff.
#[pyfunction]
fn gamma_chi(kind: &str) -> PyResult<f64> {
    let kind = match kind {
        "trapezoid" => CutoffKind::Trapezoid,
        "smooth" => CutoffKind::SmoothMollified,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown cutoff kind {other}"
            )))
        }
    };
    Ok(cutoff_gamma(&CutoffProfile::standard(kind)).0)
}

/// Constraint solve: `t₀`, the `s₀` interval, and the root-found amplitude.
#[pyfunction]
#[pyo3(signature = (d, quasi_isometry, ord_sigma, vol_y, err, beta, r0=100.0))]
#[allow(clippy::too_many_arguments)]
fn constraint(
    py: Python<'_>,
    d: usize,
    quasi_isometry: f64,
    ord_sigma: u32,
    vol_y: f64,
    err: f64,
    beta: f64,
    r0: f64,
) -> PyResult<Py<PyDict>> {
    let chi = CutoffProfile::standard(CutoffKind::Trapezoid);
    let (gamma, _) = cutoff_gamma(&chi);
    let params = ConstraintParams {
        quasi_isometry,
        dimension: d,
        ord_sigma,
        vol_y,
        gamma_chi: gamma,
        err,
        beta,
        r0,
    };
    let t0 = constraint_t0(&params).map_err(to_py_err)?;
    let sol = constraint_solve(&params, &chi, |_| 1.0, None).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("gamma_chi", gamma)?;
    out.set_item("t0", t0)?;
    out.set_item("t", sol.t)?;
    out.set_item("s0_interval", sol.s0_interval)?;
    out.set_item("s0", sol.s0)?;
    Ok(out.into())
}

/// Radial potential of a constant source, both sign conventions:
/// `(rho, h_as_printed, h_corrected)`.
#[pyfunction]
#[pyo3(signature = (rho1, n=4096))]
fn radial_potential_constant(rho1: f64, n: usize) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let src = RadialSource::from_fn(rho1, 1.4 * rho1, n, |_| 1.0).map_err(to_py_err)?;
    let printed = radial_potential(&src, SignConvention::AsPrinted);
    let corrected = radial_potential(&src, SignConvention::Corrected);
    Ok((printed.rho, printed.h, corrected.h))
}

/// Chained doubling steps: rows of `(step, beta_in, beta_q, beta_out)`.
#[pyfunction]
#[pyo3(signature = (beta, steps, d=3, seed=0))]
fn bootstrap_chain(
    beta: f64,
    steps: usize,
    d: usize,
    seed: u64,
) -> PyResult<Vec<(usize, f64, f64, f64)>> {
    run_bootstrap_chain(beta, steps, d, seed)
        .map(|rows| {
            rows.iter()
                .map(|r| (r.step, r.beta_in, r.beta_q, r.beta_out))
                .collect()
        })
        .map_err(to_py_err)
}

#[pymodule]
#[pyo3(name = "algrf")]
fn algrf_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFiberSpectrum>()?;
    m.add_function(wrap_pyfunction!(census_summary, m)?)?;
    m.add_function(wrap_pyfunction!(census_rows, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_orders, m)?)?;
    m.add_function(wrap_pyfunction!(ma_nonlinearity_q, m)?)?;
    m.add_function(wrap_pyfunction!(energy_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(greens_solve_bump, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_profile, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_annulus, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_chi, m)?)?;
    m.add_function(wrap_pyfunction!(constraint, m)?)?;
    m.add_function(wrap_pyfunction!(radial_potential_constant, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_chain, m)?)?;
    Ok(())
}
