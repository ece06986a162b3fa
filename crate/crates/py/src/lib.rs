//! Python bindings: the blow-up map, theoretical rates, outgoing kernels,
//! and the 3D radial visibility sweep with its rate fit.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use thermocloak::heat::{Envelope, SourceSpec};
use thermocloak::helmholtz::{radial_visibility, RadialFrequencySolver};
use thermocloak::medium::{MediumSpec, ObjectSpec};
use thermocloak::radial::RadialGrid;
use thermocloak::special;
use thermocloak::transform::BlowupMap;

fn err(e: thermocloak::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Piecewise radial blow-up map: `B_eps -> B_1`, identity outside `B_2`.
#[pyclass(name = "BlowupMap", frozen)]
struct PyBlowupMap {
    inner: BlowupMap,
}

#[pymethods]
impl PyBlowupMap {
    #[new]
    fn new(epsilon: f64, dim: usize) -> PyResult<Self> {
        Ok(Self { inner: BlowupMap::new(epsilon, dim).map_err(err)? })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Mapped radius `f(r)`.
    fn profile(&self, r: f64) -> f64 {
        self.inner.profile(r)
    }

    /// Pre-image radius of `s` under the profile.
    fn inverse_radius(&self, s: f64) -> f64 {
        self.inner.inverse_radius(s)
    }

    fn map(&self, x: Vec<f64>) -> Vec<f64> {
        self.inner.map(&x)
    }

    fn inverse(&self, y: Vec<f64>) -> Vec<f64> {
        self.inner.inverse(&y)
    }

    fn det_jacobian(&self, x: Vec<f64>) -> f64 {
        self.inner.det_jacobian(&x)
    }

    /// `(radial, tangential, density)` of the pushed-forward unit medium at
    /// mapped radius `s` in the shell `1 < s < 2`.
    fn shell_coefficients(&self, s: f64) -> (f64, f64, f64) {
        let c = self.inner.shell_coefficients(s);
        (c.radial, c.tangential, c.density)
    }

    fn __repr__(&self) -> String {
        format!("BlowupMap(epsilon={}, dim={})", self.inner.epsilon(), self.inner.dim())
    }
}

/// Time-domain near-invisibility rate.
#[pyfunction]
fn rate_time(epsilon: f64, dim: usize) -> PyResult<f64> {
    special::rate_time(epsilon, dim).map_err(err)
}

/// Per-frequency visibility envelope `e(epsilon, omega, dim)`.
#[pyfunction]
fn rate_frequency(epsilon: f64, omega: f64, dim: usize) -> PyResult<f64> {
    special::rate_frequency(epsilon, omega, dim).map_err(err)
}

/// Frequency-integrated rate entering the time-domain bound.
#[pyfunction]
fn integrated_rate(epsilon: f64, dim: usize) -> PyResult<f64> {
    special::integrated_rate(epsilon, dim).map_err(err)
}

/// Hankel function of the first kind, order zero.
#[pyfunction]
fn hankel0(z: Complex64) -> PyResult<Complex64> {
    special::hankel0_h1(z).map_err(err)
}

/// Outgoing 3D kernel `e^{ikr} / (4 pi r)`.
#[pyfunction]
fn green3d(k: Complex64, r: f64) -> PyResult<Complex64> {
    special::green3d(k, r).map_err(err)
}

/// Outgoing 2D kernel `(i/4) H0(kr)`.
#[pyfunction]
fn green2d(k: Complex64, r: f64) -> PyResult<Complex64> {
    special::green2d(k, r).map_err(err)
}

/// Complex wavenumber `e^{i pi/4} eps sqrt(omega)` of the blown-up problem.
#[pyfunction]
fn wavenumber(epsilon: f64, omega: f64) -> Complex64 {
    special::wavenumber(epsilon, omega)
}

/// 3D radial visibility sweep at one frequency: for each epsilon, solve the
/// cloaked and homogeneous problems with a Gaussian shell source at r = 3
/// and return `(epsilon, errL2, errH1)` of the exterior difference.
#[pyfunction]
#[pyo3(signature = (epsilons, omega, a_object=2.0, rho_object=3.0, r_obs=2.0))]
fn radial_sweep(
    epsilons: Vec<f64>,
    omega: f64,
    a_object: f64,
    rho_object: f64,
    r_obs: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let source = SourceSpec::new(vec![3.0, 0.0, 0.0], 0.3, Envelope::Exp).map_err(err)?;
    let object = ObjectSpec::isotropic(3, a_object, rho_object).map_err(err)?;
    epsilons
        .into_iter()
        .map(|eps| {
            let grid = RadialGrid::graded(3, eps, 4.0).map_err(err)?;
            let map = BlowupMap::new(eps, 3).map_err(err)?;
            let spec = MediumSpec::cloak(map, object.clone()).map_err(err)?;
            let cloak = RadialFrequencySolver::new(grid.clone(), &spec).map_err(err)?;
            let homog =
                RadialFrequencySolver::new(grid, &MediumSpec::homogeneous(3).map_err(err)?)
                    .map_err(err)?;
            let vis =
                radial_visibility(&cloak, &homog, omega, &|r| source.spatial_radial(r), r_obs)
                    .map_err(err)?;
            Ok((eps, vis.err_l2, vis.err_h1))
        })
        .collect()
}

/// Least-squares decay fit in the dimension's natural coordinates
/// (`ln eps` in 3D, `-ln |ln eps|` in 2D). Returns
/// `(slope, intercept, residual, points_used)`.
#[pyfunction]
fn fit_rate(dim: usize, points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64, usize)> {
    let fit = thermocloak::harness::fit_rate(dim, &points).map_err(err)?;
    Ok((fit.slope, fit.intercept, fit.residual, fit.n_used))
}

#[pymodule]
fn thermocloak_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlowupMap>()?;
    m.add_function(wrap_pyfunction!(rate_time, m)?)?;
    m.add_function(wrap_pyfunction!(rate_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(integrated_rate, m)?)?;
    m.add_function(wrap_pyfunction!(hankel0, m)?)?;
    m.add_function(wrap_pyfunction!(green3d, m)?)?;
    m.add_function(wrap_pyfunction!(green2d, m)?)?;
    m.add_function(wrap_pyfunction!(wavenumber, m)?)?;
    m.add_function(wrap_pyfunction!(radial_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rate, m)?)?;
    Ok(())
}
