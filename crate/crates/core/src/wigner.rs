//! Density matrices, Bloch vectors and the Wigner function
//! `W_ρ(Ω) = tr[ρ Δ(Ω)]`, with Monte-Carlo checks of the reconstruction
//! identity and the degree-2 Weingarten formula.
//!
//! Phase-space points are represented by full `SU(N)` elements. The Wigner
//! value only depends on the coset modulo the kernel's isotropy group, so the
//! extra coordinates are redundant but harmless.
//!
//! Monte-Carlo routines split the sample budget over a fixed number of
//! chunks. Chunk `c` draws from a ChaCha stream keyed by `(seed, c)` and the
//! partial sums are merged in chunk order, so results do not depend on the
//! thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    build_basis, check_dim, haar_unchecked, hermiticity_residual, spectral_decompose,
    GellMannBasis, HermitianMatrix, Unitary,
};
use crate::error::{Error, Result};
use crate::kernels::{build_kernel, diagonal_kernel, SWKernel};
use crate::moduli::ModuliPoint;

/// Tolerance on `tr ρ = 1`.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = -1e-10;

const CHUNKS: u64 = 16;

/// Unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    bloch: BlochVector,
}

impl DensityMatrix {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let dim = matrix.dim();
        check_dim(dim)?;
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, residual {:e}", tr - 1.0)));
        }
        let min = spectral_decompose(&matrix).eigenvalues[dim - 1];
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!("not positive semidefinite, min eigenvalue {min:e}")));
        }
        let bloch = bloch_of(&matrix, &build_basis(dim)?);
        Ok(Self { matrix, bloch })
    }

    pub fn from_parts(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_parts(dim, re, im)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Self::new(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        let n = v.len();
        let m = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self::new(HermitianMatrix::symmetrized(m))
    }

    pub fn from_bloch(xi: &BlochVector, basis: &GellMannBasis) -> Result<Self> {
        Self::new(xi.to_matrix(basis)?)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn bloch(&self) -> &BlochVector {
        &self.bloch
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix)
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &Unitary) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u))
    }
}

/// Random mixed state `G G† / tr(G G†)` from a complex Ginibre matrix.
pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let g = ginibre(dim, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(HermitianMatrix::symmetrized(m.unscale(tr)))
}

/// Random pure state with a Gaussian amplitude vector.
pub fn random_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let psi: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DensityMatrix::pure(&psi)
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Bloch coordinates `ξ` with `ρ = (1/N)(I + √(N(N-1)/2) (ξ, λ))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlochVector {
    pub xi: Vec<f64>,
}

fn bloch_scale(dim: usize) -> f64 {
    let n = dim as f64;
    (n * (n - 1.0) / 2.0).sqrt()
}

fn bloch_of(m: &HermitianMatrix, basis: &GellMannBasis) -> BlochVector {
    let n = m.dim() as f64;
    let denom = (2.0 * (n - 1.0) / n).sqrt();
    BlochVector { xi: basis.elements().iter().map(|l| m.trace_product(l) / denom).collect() }
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `(1/N)(I + √(N(N-1)/2) (ξ, λ))`; positivity is not checked.
    pub fn to_matrix(&self, basis: &GellMannBasis) -> Result<HermitianMatrix> {
        let n = basis.dim();
        let c = bloch_scale(n);
        let scaled: Vec<f64> = self.xi.iter().map(|x| c * x).collect();
        let traceless = basis.combination(&scaled)?;
        Ok(HermitianMatrix::identity(n).combine(1.0 / n as f64, &traceless, 1.0 / n as f64))
    }
}

pub fn to_bloch(rho: &DensityMatrix, basis: &GellMannBasis) -> Result<BlochVector> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: rho.dim() });
    }
    Ok(bloch_of(rho.matrix(), basis))
}

#[derive(Debug, Clone)]
pub struct WignerValue {
    pub value: f64,
    /// `|Im tr(ρΔ)|` before discarding it.
    pub imag_residue: f64,
    pub phase_point: Option<Unitary>,
}

/// `W_ρ = tr[ρ Δ]`.
pub fn wigner_value(rho: &DensityMatrix, k: &SWKernel) -> Result<WignerValue> {
    if rho.dim() != k.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), got: rho.dim() });
    }
    let (r, d) = (rho.matrix().matrix(), k.matrix().matrix());
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += r[(i, j)] * d[(j, i)];
        }
    }
    Ok(WignerValue { value: acc.re, imag_residue: acc.im.abs(), phase_point: k.phase_point().cloned() })
}

/// Orthonormal vectors `n^{(s²-1)}_a = (1/2) tr(U λ_{s²-1} U† λ_a)`, one per
/// Cartan generator, ordered by `s = 2..N`.
pub fn cartan_frame(u: &Unitary, basis: &GellMannBasis) -> Result<Vec<Vec<f64>>> {
    if u.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: u.dim() });
    }
    Ok((2..=basis.dim())
        .map(|s| {
            let rotated = basis.cartan(s).conjugate_by(u);
            basis.elements().iter().map(|l| 0.5 * rotated.trace_product(l)).collect()
        })
        .collect())
}

/// `W = (1/N)[1 + (N²-1)/√(N+1) (n, ξ)]` with `n = Σ_s μ_{s²-1} n^{(s²-1)}`.
pub fn wigner_cartan(
    xi: &BlochVector,
    point: &ModuliPoint,
    u: &Unitary,
    basis: &GellMannBasis,
) -> Result<f64> {
    let dim = basis.dim();
    if point.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: point.dim() });
    }
    if xi.xi.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: xi.xi.len() });
    }
    let frame = cartan_frame(u, basis)?;
    let dot: f64 = frame
        .iter()
        .zip(point.mu())
        .map(|(n_s, mu)| mu * n_s.iter().zip(&xi.xi).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let n = dim as f64;
    Ok((1.0 + (n * n - 1.0) / (n + 1.0).sqrt() * dot) / n)
}

fn chunk_sizes(samples: usize) -> Vec<(u64, usize)> {
    let chunks = CHUNKS as usize;
    (0..chunks)
        .map(|c| (c as u64, samples / chunks + usize::from(c < samples % chunks)))
        .filter(|&(_, len)| len > 0)
        .collect()
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub estimate: HermitianMatrix,
    /// Spectral norm of `estimate - ρ`.
    pub error: f64,
    pub samples: usize,
}

/// Monte-Carlo reconstruction `ρ ≈ (N/M) Σ_j Δ(U_j) tr[ρ Δ(U_j)]` over Haar
/// samples `U_j`. The factor `N` is the inverse normalization fixed by the
/// master equations.
pub fn reconstruct_mc(
    rho: &DensityMatrix,
    point: &ModuliPoint,
    samples: usize,
    seed: u64,
) -> Result<Reconstruction> {
    let dim = rho.dim();
    if point.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: point.dim() });
    }
    if samples < 1000 {
        return Err(Error::InvalidArgument("reconstruction needs at least 1000 samples".into()));
    }
    let diag: Vec<f64> = {
        let d = diagonal_kernel(point);
        (0..dim).map(|i| d.matrix()[(i, i)].re).collect()
    };
    let r = rho.matrix().matrix();
    let partials: Vec<DMatrix<Complex64>> = chunk_sizes(samples)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut acc = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
            for _ in 0..len {
                let u = haar_unchecked(dim, &mut rng);
                let delta = conjugate_diagonal(u.matrix(), &diag);
                let w: f64 = (0..dim)
                    .flat_map(|i| (0..dim).map(move |j| (i, j)))
                    .map(|(i, j)| (r[(i, j)] * delta[(j, i)]).re)
                    .sum();
                acc += delta * Complex64::new(w, 0.0);
            }
            acc
        })
        .collect();
    let mut total = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for p in partials {
        total += p;
    }
    let estimate = HermitianMatrix::symmetrized(total * Complex64::new(dim as f64 / samples as f64, 0.0));
    let error = estimate.combine(1.0, rho.matrix(), -1.0).spectral_norm();
    Ok(Reconstruction { estimate, error, samples })
}

/// `U diag(d) U†`.
fn conjugate_diagonal(u: &DMatrix<Complex64>, d: &[f64]) -> DMatrix<Complex64> {
    let n = d.len();
    DMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| u[(i, k)] * u[(j, k)].conj() * d[k]).sum()
    })
}

/// Haar integral `∫ dμ U_{i1j1} U_{i2j2} Ū_{k1l1} Ū_{k2l2}` from the
/// degree-2 Weingarten formula. Indices are zero-based.
#[allow(clippy::too_many_arguments)]
pub fn weingarten_moment(
    dim: usize,
    i1: usize,
    j1: usize,
    i2: usize,
    j2: usize,
    k1: usize,
    l1: usize,
    k2: usize,
    l2: usize,
) -> f64 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let n = dim as f64;
    let direct = d(i1, k1) * d(i2, k2) * d(j1, l1) * d(j2, l2)
        + d(i1, k2) * d(i2, k1) * d(j1, l2) * d(j2, l1);
    let crossed = d(i1, k1) * d(i2, k2) * d(j1, l2) * d(j2, l1)
        + d(i1, k2) * d(i2, k1) * d(j1, l1) * d(j2, l2);
    direct / (n * n - 1.0) - crossed / (n * (n * n - 1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeingartenReport {
    pub dim: usize,
    pub samples: usize,
    /// Largest `|MC - formula|` over all index tuples.
    pub max_deviation: f64,
    /// Zero-based `(i1, j1, i2, j2, k1, l1, k2, l2)` where it occurs.
    pub worst_indices: [usize; 8],
    pub tuples: usize,
}

/// Compares Monte-Carlo fourth moments of Haar unitaries with
/// [`weingarten_moment`] over every index tuple. `N ≤ 3`, `M ≥ 10⁴`.
pub fn weingarten_check(dim: usize, samples: usize, seed: u64) -> Result<WeingartenReport> {
    check_dim(dim)?;
    if dim > 3 {
        return Err(Error::InvalidDimension { dim, reason: "the full tuple scan supports N ≤ 3" });
    }
    if samples < 10_000 {
        return Err(Error::InvalidArgument("Weingarten check needs at least 10^4 samples".into()));
    }
    let n2 = dim * dim;
    let n4 = n2 * n2;
    let partials: Vec<Vec<Complex64>> = chunk_sizes(samples)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut acc = vec![Complex64::new(0.0, 0.0); n4 * n4];
            let mut pairs = vec![Complex64::new(0.0, 0.0); n4];
            for _ in 0..len {
                let u = haar_unchecked(dim, &mut rng);
                let m = u.matrix();
                let flat: Vec<Complex64> = (0..n2).map(|a| m[(a / dim, a % dim)]).collect();
                for a in 0..n2 {
                    for b in 0..n2 {
                        pairs[a * n2 + b] = flat[a] * flat[b];
                    }
                }
                for (p, row) in pairs.iter().zip(acc.chunks_mut(n4)) {
                    for (q, slot) in pairs.iter().zip(row.iter_mut()) {
                        *slot += p * q.conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); n4 * n4];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    let mut worst = (0.0f64, [0usize; 8]);
    for (idx, sum) in total.iter().enumerate() {
        let (left, right) = (idx / n4, idx % n4);
        let (a, b, c, e) = (left / n2, left % n2, right / n2, right % n2);
        let t = [a / dim, a % dim, b / dim, b % dim, c / dim, c % dim, e / dim, e % dim];
        let exact = weingarten_moment(dim, t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7]);
        let dev = (sum / samples as f64 - Complex64::new(exact, 0.0)).norm();
        if dev > worst.0 {
            worst = (dev, t);
        }
    }
    Ok(WeingartenReport {
        dim,
        samples,
        max_deviation: worst.0,
        worst_indices: worst.1,
        tuples: n4 * n4,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PostulateCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PostulateReport {
    pub dim: usize,
    pub checks: Vec<PostulateCheck>,
    pub pass: bool,
}

/// Checks the four correspondence postulates for the kernel family at
/// `point`: Hermiticity and covariance over `trials` random draws, and the
/// Monte-Carlo normalization and reconstruction over `samples` Haar points.
///
/// Monte-Carlo tolerances are five standard errors of a variable bounded by
/// `b = max|π_i|` (`5b/√M` for the normalization, `5Nb²/√M` for the
/// reconstruction). The reconstruction uses at least 1000 samples.
pub fn check_sw_postulates(
    point: &ModuliPoint,
    trials: usize,
    samples: usize,
    seed: u64,
) -> Result<PostulateReport> {
    let dim = point.dim();
    if trials == 0 || samples == 0 {
        return Err(Error::InvalidArgument("trials and samples must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let diag = diagonal_kernel(point);
    let bound = point.spectrum().values().iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut herm = 0.0f64;
    let mut cov = 0.0f64;
    for _ in 0..trials {
        let u = haar_unchecked(dim, &mut rng);
        let raw = u.matrix() * diag.matrix() * u.matrix().adjoint();
        herm = herm.max(hermiticity_residual(&raw));

        let kernel = build_kernel(point, &u)?;
        let rho = random_density_with(dim, &mut rng)?;
        let v = haar_unchecked(dim, &mut rng);
        let lhs = wigner_value(&rho.conjugated(&v)?, &kernel)?.value;
        let rhs = wigner_value(&rho, &kernel.conjugated(&v.adjoint())?)?.value;
        cov = cov.max((lhs - rhs).abs());
    }

    let rho = random_density_with(dim, &mut rng)?;
    let mut mean = 0.0;
    for _ in 0..samples {
        let u = haar_unchecked(dim, &mut rng);
        mean += wigner_value(&rho, &build_kernel(point, &u)?)?.value;
    }
    mean /= samples as f64;
    let norm_residual = (mean - 1.0 / dim as f64).abs();
    let norm_tol = 5.0 * bound / (samples as f64).sqrt();

    let rec_samples = samples.max(1000);
    let rec = reconstruct_mc(&rho, point, rec_samples, rng.random())?;
    let rec_tol = 5.0 * dim as f64 * bound * bound / (rec_samples as f64).sqrt();

    let checks = vec![
        PostulateCheck { name: "hermiticity", residual: herm, tolerance: 1e-13, samples: trials, pass: herm < 1e-13 },
        PostulateCheck { name: "covariance", residual: cov, tolerance: 1e-12, samples: trials, pass: cov < 1e-12 },
        PostulateCheck {
            name: "normalization",
            residual: norm_residual,
            tolerance: norm_tol,
            samples,
            pass: norm_residual < norm_tol,
        },
        PostulateCheck {
            name: "reconstruction",
            residual: rec.error,
            tolerance: rec_tol,
            samples: rec_samples,
            pass: rec.error < rec_tol,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(PostulateReport { dim, checks, pass })
}
