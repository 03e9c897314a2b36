//! Coadjoint-orbit strata of kernels.
//!
//! The orbit of `Δ` under `SU(N)` conjugation is classified by which adjacent
//! eigenvalues of the ordered spectrum coincide. Strata are written in bar
//! notation: positions `1..N`, with a bar between `i` and `i+1` when
//! `π_i = π_{i+1}`. So `1|23|4` is `π_1 = π_2 > π_3 = π_4` and the regular
//! quatrit stratum is `1234`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{GellMannBasis, HermitianMatrix};
use crate::error::{Error, Result};
use crate::kernels::SWKernel;
use crate::moduli::ordering_coefficient;

/// Default relative tolerance for clustering and rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub pattern: String,
    /// Sizes of the blocks of equal eigenvalues, top to bottom.
    pub blocks: Vec<usize>,
    pub orbit_dim: usize,
    pub isotropy_dim: usize,
}

impl Stratum {
    /// Stratum of a descending spectrum, clustering adjacent eigenvalues
    /// whose gap is at most `tol · N · max(1, max|π|)`.
    pub fn from_spectrum(values: &[f64], tol: f64) -> Stratum {
        let n = values.len();
        let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let gap = tol * n as f64 * scale;
        let mut pattern = String::new();
        let mut blocks = vec![1usize];
        for i in 0..n {
            pattern.push_str(&(i + 1).to_string());
            if i + 1 < n {
                if (values[i] - values[i + 1]).abs() <= gap {
                    pattern.push('|');
                    *blocks.last_mut().unwrap() += 1;
                } else {
                    blocks.push(1);
                }
            }
        }
        Self::from_blocks(pattern, blocks, n)
    }

    fn from_blocks(pattern: String, blocks: Vec<usize>, n: usize) -> Stratum {
        let isotropy_dim = blocks.iter().map(|k| k * k).sum::<usize>() - 1;
        Stratum { pattern, blocks, orbit_dim: n * n - 1 - isotropy_dim, isotropy_dim }
    }
}

/// Gram matrix `G_kl = (1/2) tr(t_k† t_l)` of the tangent vectors
/// `t_k = [λ_k, Δ]` to the orbit through `Δ`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub matrix: DMatrix<f64>,
    /// Numerical rank at [`DEFAULT_TOL`].
    pub rank: usize,
}

impl GramMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> =
            SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Number of eigenvalues above `tol · λ_max`.
    pub fn rank_at(&self, tol: f64) -> usize {
        let eig = self.eigenvalues();
        let top = eig.first().copied().unwrap_or(0.0).max(0.0);
        if top == 0.0 {
            return 0;
        }
        eig.iter().filter(|&&v| v > tol * top).count()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }
}

pub fn gram_matrix(k: &SWKernel, basis: &GellMannBasis) -> Result<GramMatrix> {
    gram_of(k.matrix(), basis)
}

/// [`gram_matrix`] for an arbitrary Hermitian matrix.
pub fn gram_of(delta: &HermitianMatrix, basis: &GellMannBasis) -> Result<GramMatrix> {
    if delta.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), got: delta.dim() });
    }
    let d = delta.matrix();
    // t_k = [λ_k, Δ] is anti-Hermitian; h_k = -i t_k is Hermitian and
    // (1/2) tr(t_k† t_l) = (1/2) tr(h_k h_l).
    let tangents: Vec<HermitianMatrix> = basis
        .elements()
        .iter()
        .map(|l| {
            let lm = l.matrix();
            let t = lm * d - d * lm;
            HermitianMatrix::symmetrized(t * num_complex::Complex64::new(0.0, -1.0))
        })
        .collect();
    let n = tangents.len();
    let mut g = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = 0.5 * tangents[a].trace_product(&tangents[b]);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    let mut gram = GramMatrix { matrix: g, rank: 0 };
    gram.rank = gram.rank_at(DEFAULT_TOL);
    Ok(gram)
}

/// Stratum of a kernel from eigenvalue clustering at `tol`, cross-checked
/// against the Gram rank at the same tolerance.
pub fn classify_stratum(k: &SWKernel, tol: f64) -> Result<Stratum> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let stratum = Stratum::from_spectrum(k.spectrum().values(), tol);
    let basis = crate::algebra::build_basis(k.dim())?;
    let rank = gram_matrix(k, &basis)?.rank_at(tol);
    if rank != stratum.orbit_dim {
        return Err(Error::StratumInconsistent {
            pattern: stratum.pattern,
            expected: stratum.orbit_dim,
            rank,
        });
    }
    Ok(stratum)
}

/// Polyhedral cone `{x : F x ≥ 0}` of ordered Cartan coefficients, with `F`
/// lower bidiagonal: row 0 is `x_0 ≥ 0`, row `r` is
/// `x_r - √(r/(r+2)) x_{r-1} ≥ 0`. For `N = 3, 4` this is the cone with apex
/// angle `π/3`, resp. `π/6`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitCone {
    pub dim: usize,
    pub facet_normals: DMatrix<f64>,
}

impl OrbitCone {
    pub fn new(dim: usize) -> Result<Self> {
        crate::algebra::check_dim(dim)?;
        let m = dim - 1;
        let mut f = DMatrix::zeros(m, m);
        for r in 0..m {
            f[(r, r)] = 1.0;
            if r > 0 {
                f[(r, r - 1)] = -ordering_coefficient(r + 1);
            }
        }
        Ok(Self { dim, facet_normals: f })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim - 1 {
            return false;
        }
        let v = &self.facet_normals * nalgebra::DVector::from_column_slice(x);
        v.iter().all(|&c| c >= -crate::moduli::ORDERING_TOL)
    }
}

/// Cone membership of a coefficient vector; agrees with
/// [`crate::moduli::check_ordering`] on the unit sphere and extends it to all of `R^{N-1}`.
pub fn cone_membership(mu: &[f64], dim: usize) -> bool {
    match OrbitCone::new(dim) {
        Ok(c) => c.contains(mu),
        Err(_) => false,
    }
}
