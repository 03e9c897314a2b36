//! Python bindings. Matrices cross the boundary as `(re, im)` pairs of
//! nested row lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use swkernel::orbits::DEFAULT_TOL;
use swkernel::{self as core, HermitianMatrix, KernelFamily, ModuliPoint, Unitary};

type Parts = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_parts(m: &HermitianMatrix) -> Parts {
    let n = m.dim();
    let (re, im) = (m.re_parts(), m.im_parts());
    (re.chunks(n).map(<[f64]>::to_vec).collect(), im.chunks(n).map(<[f64]>::to_vec).collect())
}

fn unitary_parts(u: &Unitary) -> Parts {
    let m = u.matrix();
    let n = u.dim();
    let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
    (re, im)
}

fn from_parts(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<HermitianMatrix> {
    let n = re.len();
    if im.len() != n || re.iter().chain(&im).any(|row| row.len() != n) {
        return Err(PyValueError::new_err("re and im must be square and of equal size"));
    }
    let flat = |rows: Vec<Vec<f64>>| rows.into_iter().flatten().collect::<Vec<f64>>();
    HermitianMatrix::from_parts(n, &flat(re), &flat(im)).map_err(err)
}

/// A Stratonovich-Weyl kernel.
#[pyclass(name = "Kernel", module = "swkernel", frozen)]
struct PyKernel {
    inner: core::SWKernel,
}

#[pymethods]
impl PyKernel {
    /// Named closed-form family, e.g. `"qutrit"` with `nu`, or `"1|23|4"`.
    #[staticmethod]
    #[pyo3(signature = (name, nu=None, nu1=None, nu2=None))]
    fn family(name: &str, nu: Option<f64>, nu1: Option<f64>, nu2: Option<f64>) -> PyResult<Self> {
        let f = KernelFamily::parse(name, nu, nu1, nu2).map_err(err)?;
        Ok(Self { inner: f.kernel().map_err(err)? })
    }

    /// Kernel at the moduli point with spherical `angles`, optionally
    /// conjugated by a Haar unitary drawn from `phase_seed`.
    #[staticmethod]
    #[pyo3(signature = (dim, angles, phase_seed=None))]
    fn from_angles(dim: usize, angles: Vec<f64>, phase_seed: Option<u64>) -> PyResult<Self> {
        let p = ModuliPoint::from_angles(dim, &angles).map_err(err)?;
        let u = match phase_seed {
            Some(s) => core::sample_haar_unitary(dim, s).map_err(err)?,
            None => Unitary::identity(dim),
        };
        Ok(Self { inner: core::build_kernel(&p, &u).map_err(err)? })
    }

    #[staticmethod]
    fn from_matrix(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: core::SWKernel::from_matrix(from_parts(re, im)?).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Eigenvalues, descending.
    #[getter]
    fn spectrum(&self) -> Vec<f64> {
        self.inner.spectrum().values().to_vec()
    }

    #[getter]
    fn mu(&self) -> Option<Vec<f64>> {
        self.inner.moduli().map(|p| p.mu().to_vec())
    }

    #[getter]
    fn angles(&self) -> Option<Vec<f64>> {
        self.inner.moduli().map(|p| p.angles().to_vec())
    }

    #[getter]
    fn matrix(&self) -> Parts {
        to_parts(self.inner.matrix())
    }

    /// `(pattern, orbit_dim, isotropy_dim)`.
    fn stratum(&self) -> PyResult<(String, usize, usize)> {
        let s = core::classify_stratum(&self.inner, DEFAULT_TOL).map_err(err)?;
        Ok((s.pattern, s.orbit_dim, s.isotropy_dim))
    }

    fn gram_rank(&self) -> PyResult<usize> {
        let basis = core::build_basis(self.inner.dim()).map_err(err)?;
        Ok(core::gram_matrix(&self.inner, &basis).map_err(err)?.rank)
    }

    /// `(|tr Δ - 1|, |tr Δ² - N|, pass)`.
    fn master(&self) -> (f64, f64, bool) {
        let r = core::verify_master(self.inner.matrix());
        (r.trace_residual, r.trace_sq_residual, r.pass)
    }

    fn trace_power(&self, n: u32) -> f64 {
        self.inner.trace_power(n)
    }

    fn conjugated(&self, seed: u64) -> PyResult<Self> {
        let u = core::sample_haar_unitary(self.inner.dim(), seed).map_err(err)?;
        Ok(Self { inner: self.inner.conjugated(&u).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Kernel(dim={}, spectrum={:?})", self.inner.dim(), self.inner.spectrum().values())
    }
}

/// A density matrix.
#[pyclass(name = "DensityMatrix", module = "swkernel", frozen)]
struct PyDensity {
    inner: core::DensityMatrix,
}

#[pymethods]
impl PyDensity {
    #[new]
    fn new(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: core::DensityMatrix::new(from_parts(re, im)?).map_err(err)? })
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        Ok(Self { inner: core::DensityMatrix::maximally_mixed(dim).map_err(err)? })
    }

    /// `|ψ⟩⟨ψ|` from real and imaginary amplitudes.
    #[staticmethod]
    fn pure(re: Vec<f64>, im: Vec<f64>) -> PyResult<Self> {
        if re.len() != im.len() {
            return Err(PyValueError::new_err("re and im must have equal length"));
        }
        let psi: Vec<core::Complex64> = re.iter().zip(&im).map(|(&a, &b)| core::Complex64::new(a, b)).collect();
        Ok(Self { inner: core::DensityMatrix::pure(&psi).map_err(err)? })
    }

    #[staticmethod]
    fn from_bloch(xi: Vec<f64>) -> PyResult<Self> {
        let n = (((xi.len() + 1) as f64).sqrt()).round() as usize;
        let basis = core::build_basis(n).map_err(err)?;
        let b = core::BlochVector { xi };
        Ok(Self { inner: core::DensityMatrix::from_bloch(&b, &basis).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn bloch(&self) -> Vec<f64> {
        self.inner.bloch().xi.clone()
    }

    #[getter]
    fn matrix(&self) -> Parts {
        to_parts(self.inner.matrix())
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }
}

#[pyfunction]
fn family_names() -> Vec<&'static str> {
    KernelFamily::NAMES.to_vec()
}

/// Generalized Gell-Mann matrices as `(re, im)` pairs.
#[pyfunction]
fn gell_mann_basis(dim: usize) -> PyResult<Vec<Parts>> {
    Ok(core::build_basis(dim).map_err(err)?.elements().iter().map(to_parts).collect())
}

#[pyfunction]
fn haar_unitary(dim: usize, seed: u64) -> PyResult<Parts> {
    Ok(unitary_parts(&core::sample_haar_unitary(dim, seed).map_err(err)?))
}

#[pyfunction]
fn angles_to_mu(dim: usize, angles: Vec<f64>) -> PyResult<Vec<f64>> {
    core::angles_to_mu(dim, &angles).map_err(err)
}

#[pyfunction]
fn mu_to_spectrum(dim: usize, mu: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(core::mu_to_spectrum(dim, &mu).map_err(err)?.into_values())
}

#[pyfunction]
fn check_ordering(dim: usize, mu: Vec<f64>) -> bool {
    core::check_ordering(dim, &mu)
}

/// `(in_region, subregion)` for the point with spherical `angles`.
#[pyfunction]
fn classify_region(dim: usize, angles: Vec<f64>) -> PyResult<(bool, String)> {
    let p = ModuliPoint::from_angles(dim, &angles).map_err(err)?;
    let r = core::classify_region(&p);
    Ok((r.in_region, r.subregion.to_string()))
}

/// Angle tuples of the admissible grid.
#[pyfunction]
fn moduli_grid(dim: usize, resolution: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(core::sample_moduli_grid(dim, resolution)
        .map_err(err)?
        .iter()
        .map(|p| p.angles().to_vec())
        .collect())
}

#[pyfunction]
fn lucas_traces(max_n: u32) -> PyResult<Vec<(u32, f64)>> {
    core::lucas_traces(max_n).map_err(err)
}

#[pyfunction]
fn wigner_value(rho: &PyDensity, kernel: &PyKernel) -> PyResult<f64> {
    Ok(core::wigner_value(&rho.inner, &kernel.inner).map_err(err)?.value)
}

/// Monte-Carlo reconstruction; returns `(estimate, spectral-norm error)`.
#[pyfunction]
#[pyo3(signature = (rho, angles, samples, seed=42))]
fn reconstruct(rho: &PyDensity, angles: Vec<f64>, samples: usize, seed: u64) -> PyResult<(Parts, f64)> {
    let p = ModuliPoint::from_angles(rho.inner.dim(), &angles).map_err(err)?;
    let r = core::reconstruct_mc(&rho.inner, &p, samples, seed).map_err(err)?;
    Ok((to_parts(&r.estimate), r.error))
}

/// Largest deviation of Monte-Carlo fourth moments from the Weingarten formula.
#[pyfunction]
#[pyo3(signature = (dim, samples, seed=42))]
fn weingarten_check(dim: usize, samples: usize, seed: u64) -> PyResult<f64> {
    Ok(core::weingarten_check(dim, samples, seed).map_err(err)?.max_deviation)
}

/// `[(name, residual, tolerance, pass)]` for the four correspondence checks.
#[pyfunction]
#[pyo3(signature = (dim, angles, trials=20, samples=10_000, seed=42))]
fn verify(
    dim: usize,
    angles: Vec<f64>,
    trials: usize,
    samples: usize,
    seed: u64,
) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let p = ModuliPoint::from_angles(dim, &angles).map_err(err)?;
    let r = core::check_sw_postulates(&p, trials, samples, seed).map_err(err)?;
    Ok(r.checks.into_iter().map(|c| (c.name.to_string(), c.residual, c.tolerance, c.pass)).collect())
}

#[pymodule]
#[pyo3(name = "swkernel")]
fn swkernel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKernel>()?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(family_names, m)?)?;
    m.add_function(wrap_pyfunction!(gell_mann_basis, m)?)?;
    m.add_function(wrap_pyfunction!(haar_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(angles_to_mu, m)?)?;
    m.add_function(wrap_pyfunction!(mu_to_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(check_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(classify_region, m)?)?;
    m.add_function(wrap_pyfunction!(moduli_grid, m)?)?;
    m.add_function(wrap_pyfunction!(lucas_traces, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_value, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(weingarten_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
