//! Dense Hermitian matrices, the generalized Gell-Mann basis of `su(N)`,
//! spectral decomposition and Haar-random `SU(N)` sampling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Max-abs tolerance for `A = A†`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Max-abs tolerance for `U U† = I` when a unitary is supplied from outside.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "dimension must be at least 2" });
    }
    Ok(())
}

/// `max_ij |A_ij - conj(A_ji)|`.
pub fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Dense `N×N` complex Hermitian matrix.
///
/// The constructor checks `A = A†` to [`HERMITIAN_TOL`] and stores the exactly
/// symmetrized matrix `(A + A†)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidDimension { dim: 0, reason: "empty matrix" });
        }
        let residual = hermiticity_residual(&m);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::symmetrized(m))
    }

    /// Builds from row-major real and imaginary parts.
    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: re.len().max(im.len()),
            });
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(re[i * dim + j], im[i * dim + j])
        });
        Self::new(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Self { inner: m }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub(crate) fn symmetrized(m: DMatrix<Complex64>) -> Self {
        let adj = m.adjoint();
        Self { inner: (m + adj).scale(0.5) }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr(A B)`, which is real for two Hermitian matrices.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.inner[(i, j)] * other.inner[(j, i)]).re;
            }
        }
        acc
    }

    /// Row-major real parts.
    pub fn re_parts(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n * n).map(|k| self.inner[(k / n, k % n)].re).collect()
    }

    /// Row-major imaginary parts.
    pub fn im_parts(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n * n).map(|k| self.inner[(k / n, k % n)].im).collect()
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Unitary) -> HermitianMatrix {
        Self::symmetrized(u.matrix() * &self.inner * u.matrix().adjoint())
    }

    /// `αA + βB`.
    pub fn combine(&self, alpha: f64, other: &HermitianMatrix, beta: f64) -> HermitianMatrix {
        Self { inner: self.inner.scale(alpha) + other.inner.scale(beta) }
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        Self { inner: self.inner.scale(factor) }
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        spectral_decompose(self).eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn determinant(&self) -> f64 {
        self.inner.clone().determinant().re
    }
}

/// Unitary `N×N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    inner: DMatrix<Complex64>,
}

impl Unitary {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let residual = unitarity_residual(&m);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { inner: m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn adjoint(&self) -> Unitary {
        Self { inner: self.inner.adjoint() }
    }

    pub fn compose(&self, other: &Unitary) -> Unitary {
        Self { inner: &self.inner * &other.inner }
    }

    pub fn determinant(&self) -> Complex64 {
        self.inner.clone().determinant()
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.inner)
    }
}

fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    max_abs(&(prod - DMatrix::<Complex64>::identity(n, n)))
}

/// Generalized Gell-Mann basis `λ_1 … λ_{N²-1}` of `su(N)`, normalized to
/// `tr(λ_a λ_b) = 2 δ_ab`.
///
/// Elements are grouped by column `s = 2..N`: for each row `j < s` the
/// symmetric then antisymmetric off-diagonal generator, followed by the
/// diagonal `λ_{s²-1} = √(2/(s(s-1))) diag(1,…,1,-(s-1),0,…)`. The Cartan
/// generator for `s` therefore sits at (1-based) index `s² - 1`.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    elements: Vec<HermitianMatrix>,
}

/// Builds the generalized Gell-Mann basis for `dim ≥ 2`.
pub fn build_basis(dim: usize) -> Result<GellMannBasis> {
    check_dim(dim)?;
    let mut elements = Vec::with_capacity(dim * dim - 1);
    for s in 2..=dim {
        let col = s - 1;
        for row in 0..col {
            let mut sym = DMatrix::from_element(dim, dim, ZERO);
            sym[(row, col)] = ONE;
            sym[(col, row)] = ONE;
            elements.push(HermitianMatrix { inner: sym });

            let mut anti = DMatrix::from_element(dim, dim, ZERO);
            anti[(row, col)] = Complex64::new(0.0, -1.0);
            anti[(col, row)] = Complex64::new(0.0, 1.0);
            elements.push(HermitianMatrix { inner: anti });
        }
        elements.push(cartan_generator(dim, s));
    }
    Ok(GellMannBasis { dim, elements })
}

fn cartan_generator(dim: usize, s: usize) -> HermitianMatrix {
    let norm = (2.0 / (s * (s - 1)) as f64).sqrt();
    let mut diag = vec![0.0; dim];
    for d in diag.iter_mut().take(s - 1) {
        *d = norm;
    }
    diag[s - 1] = -((s - 1) as f64) * norm;
    HermitianMatrix::from_real_diagonal(&diag)
}

impl GellMannBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Zero-based element access; `element(a)` is `λ_{a+1}`.
    pub fn element(&self, a: usize) -> &HermitianMatrix {
        &self.elements[a]
    }

    /// Zero-based positions `s² - 2` of the Cartan generators, `s = 2..N`.
    pub fn cartan_indices(&self) -> Vec<usize> {
        (2..=self.dim).map(|s| s * s - 2).collect()
    }

    /// The diagonal generator `λ_{s²-1}`.
    pub fn cartan(&self, s: usize) -> &HermitianMatrix {
        assert!((2..=self.dim).contains(&s), "Cartan index s={s} out of range");
        &self.elements[s * s - 2]
    }

    /// Coefficients `c_a = tr(A λ_a) / 2` of the traceless part of `a`.
    pub fn coefficients(&self, a: &HermitianMatrix) -> Result<Vec<f64>> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.dim() });
        }
        Ok(self.elements.iter().map(|l| 0.5 * a.trace_product(l)).collect())
    }

    /// `Σ_a c_a λ_a`.
    pub fn combination(&self, coeffs: &[f64]) -> Result<HermitianMatrix> {
        if coeffs.len() != self.elements.len() {
            return Err(Error::DimensionMismatch { expected: self.elements.len(), got: coeffs.len() });
        }
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (c, l) in coeffs.iter().zip(&self.elements) {
            if *c != 0.0 {
                m += l.inner.scale(*c);
            }
        }
        Ok(HermitianMatrix { inner: m })
    }
}

/// Eigen-decomposition `A = V diag(λ) V†` with `λ` sorted descending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns. Each column is phased so its first
    /// non-negligible component is real and positive.
    pub eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let lam = self.eigenvalues[j];
            for i in 0..n {
                scaled[(i, j)] *= lam;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Spectral decomposition of a Hermitian matrix. Deterministic for equal input.
pub fn spectral_decompose(m: &HermitianMatrix) -> SpectralDecomposition {
    let n = m.dim();
    let eig = m.inner.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut vectors = DMatrix::from_element(n, n, ZERO);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(ONE);
        for i in 0..n {
            vectors[(i, dst)] = col[i] * phase;
        }
    }
    SpectralDecomposition { eigenvalues: values, eigenvectors: vectors }
}

/// Haar-random element of `SU(N)` drawn from `rng`.
///
/// QR of a complex Ginibre matrix with the phases of `diag(R)` moved into
/// `Q` gives a Haar unitary; dividing by `det(Q)^{1/N}` projects it to `SU(N)`.
pub fn sample_haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Unitary> {
    check_dim(dim)?;
    Ok(haar_unchecked(dim, rng))
}

pub(crate) fn haar_unchecked<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    let det = q.clone().determinant();
    let correction = Complex64::from_polar(1.0, -det.arg() / dim as f64);
    Unitary { inner: q * correction }
}

/// Haar-random element of `SU(N)`, reproducible from `seed`.
pub fn sample_haar_unitary(dim: usize, seed: u64) -> Result<Unitary> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    sample_haar_unitary_with(dim, &mut rng)
}

/// `count` consecutive Haar draws from one stream seeded by `seed`.
pub fn sample_haar_unitaries(dim: usize, count: usize, seed: u64) -> Result<Vec<Unitary>> {
    check_dim(dim)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| haar_unchecked(dim, &mut rng)).collect())
}
