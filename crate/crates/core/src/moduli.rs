//! Spherical-angle parametrization of the kernel moduli space.
//!
//! A kernel is fixed up to conjugation by the coefficients
//! `μ = (μ_3, μ_8, …, μ_{N²-1})` of its Cartan part. The master equations put
//! `μ` on the unit `(N-2)`-sphere; descending order of the spectrum cuts that
//! sphere down to a spherical simplex.
//!
//! Coefficient vectors are stored by Cartan level: `mu[s - 2] = μ_{s²-1}`.
//! Angles are stored as `angles[j - 1] = ψ_j`, `j = 1..N-2`, with
//! `ψ_j ∈ [0, π]` for `j < N-2` and `ψ_{N-2} ∈ [0, 2π)`.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::check_dim;
use crate::error::{Error, Result};

/// Tolerance for the ordering inequalities.
pub const ORDERING_TOL: f64 = 1e-12;
/// Tolerance for `Σ μ² = 1` on inputs.
pub const SPHERE_TOL: f64 = 1e-10;
/// Treat `|sin ψ|` below this as zero when labelling subregions.
const SIN_ZERO_TOL: f64 = 1e-12;

/// Normalization constant `κ = √(N(N²-1)/2)`.
pub fn kappa(dim: usize) -> f64 {
    let n = dim as f64;
    (n * (n * n - 1.0) / 2.0).sqrt()
}

/// Constant of the ordering inequality between Cartan levels `s` and `s+1`:
/// `μ_{(s+1)²-1} ≥ √((s-1)/(s+1)) μ_{s²-1}`.
pub(crate) fn ordering_coefficient(s: usize) -> f64 {
    ((s - 1) as f64 / (s + 1) as f64).sqrt()
}

/// A point of the moduli space: `N-2` spherical angles and the derived
/// unit-norm Cartan coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliPoint {
    dim: usize,
    angles: Vec<f64>,
    mu: Vec<f64>,
}

impl ModuliPoint {
    pub fn from_angles(dim: usize, angles: &[f64]) -> Result<Self> {
        let mu = angles_to_mu(dim, angles)?;
        Ok(Self { dim, angles: angles.to_vec(), mu })
    }

    /// Builds from coefficients on the unit sphere; angles are recovered in
    /// their canonical ranges.
    pub fn from_mu(dim: usize, mu: &[f64]) -> Result<Self> {
        check_mu(dim, mu)?;
        let norm = mu.iter().map(|m| m * m).sum::<f64>().sqrt();
        let mu: Vec<f64> = mu.iter().map(|m| m / norm).collect();
        let angles = mu_to_angles(&mu);
        Ok(Self { dim, angles, mu })
    }

    /// The single qubit point, or the `ψ = 0` point for larger `N`.
    pub fn origin(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Self::from_angles(dim, &vec![0.0; dim - 2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn spectrum(&self) -> OrderedSpectrum {
        spectrum_unchecked(self.dim, &self.mu)
    }

    pub fn is_admissible(&self) -> bool {
        check_ordering(self.dim, &self.mu)
    }
}

/// Kernel eigenvalues `π_1 … π_N` in the order produced by the Cartan
/// expansion. For admissible points this order is descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSpectrum {
    values: Vec<f64>,
}

impl OrderedSpectrum {
    /// Wraps eigenvalues, checking `Σπ = 1` and `Σπ² = N` to `1e-9`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        check_dim(n)?;
        let sum: f64 = values.iter().sum();
        let sum_sq: f64 = values.iter().map(|v| v * v).sum();
        let (r1, r2) = (sum - 1.0, sum_sq - n as f64);
        if r1.abs() > 1e-9 || r2.abs() > 1e-9 {
            return Err(Error::MasterEquations { trace_residual: r1, trace_sq_residual: r2 });
        }
        Ok(Self { values })
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_descending(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1] - tol)
    }

    pub fn sorted_descending(&self) -> OrderedSpectrum {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        Self { values: v }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn determinant(&self) -> f64 {
        self.values.iter().product()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Named pieces of the admissible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subregion {
    /// `ψ_1 = 0` (and the qubit point).
    P1,
    /// Boundary piece where `k` is the largest index with `sin ψ_{N-k} = 0`.
    P2(usize),
    /// Generic piece with all relevant sines nonzero.
    P3,
    Outside,
}

impl std::fmt::Display for Subregion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Subregion::P1 => write!(f, "P1"),
            Subregion::P2(k) => write!(f, "P2({k})"),
            Subregion::P3 => write!(f, "P3"),
            Subregion::Outside => write!(f, "outside"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionMembership {
    pub in_region: bool,
    pub subregion: Subregion,
}

fn check_angles(dim: usize, angles: &[f64]) -> Result<()> {
    check_dim(dim)?;
    if angles.len() != dim - 2 {
        return Err(Error::DimensionMismatch { expected: dim - 2, got: angles.len() });
    }
    let last = angles.len().saturating_sub(1);
    for (idx, &a) in angles.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::AngleRange { index: idx + 1, value: a, range: "finite" });
        }
        if idx == last {
            if !(0.0..2.0 * PI).contains(&a) {
                return Err(Error::AngleRange { index: idx + 1, value: a, range: "[0, 2π)" });
            }
        } else if !(0.0..=PI).contains(&a) {
            return Err(Error::AngleRange { index: idx + 1, value: a, range: "[0, π]" });
        }
    }
    Ok(())
}

fn check_mu(dim: usize, mu: &[f64]) -> Result<()> {
    check_dim(dim)?;
    if mu.len() != dim - 1 {
        return Err(Error::DimensionMismatch { expected: dim - 1, got: mu.len() });
    }
    let norm_sq: f64 = mu.iter().map(|m| m * m).sum();
    if (norm_sq - 1.0).abs() > SPHERE_TOL {
        return Err(Error::OffSphere { norm_sq });
    }
    Ok(())
}

/// Spherical angles to Cartan coefficients:
/// `μ_3 = sin ψ_1 ⋯ sin ψ_{N-2}`, `μ_{i²-1} = sin ψ_1 ⋯ sin ψ_{N-i} cos ψ_{N-i+1}`.
pub fn angles_to_mu(dim: usize, angles: &[f64]) -> Result<Vec<f64>> {
    check_angles(dim, angles)?;
    Ok(angles_to_mu_unchecked(dim, angles))
}

fn angles_to_mu_unchecked(dim: usize, angles: &[f64]) -> Vec<f64> {
    // sin_prefix[m] = sin ψ_1 ⋯ sin ψ_m
    let mut sin_prefix = Vec::with_capacity(angles.len() + 1);
    sin_prefix.push(1.0);
    for a in angles {
        let last = *sin_prefix.last().unwrap();
        sin_prefix.push(last * a.sin());
    }
    (2..=dim)
        .map(|s| {
            if s == 2 {
                sin_prefix[dim - 2]
            } else {
                sin_prefix[dim - s] * angles[dim - s].cos()
            }
        })
        .collect()
}

/// Inverse of [`angles_to_mu`] for unit vectors, in canonical angle ranges.
pub fn mu_to_angles(mu: &[f64]) -> Vec<f64> {
    let dim = mu.len() + 1;
    let mut angles = Vec::with_capacity(dim.saturating_sub(2));
    // ψ_j pairs with cos on level s = N - j + 1, i.e. mu[N - j - 1].
    for j in 1..dim.saturating_sub(1) {
        let top = mu[dim - j - 1];
        if j == dim - 2 {
            let mut a = mu[0].atan2(top);
            if a < 0.0 {
                a += 2.0 * PI;
            }
            angles.push(if a >= 2.0 * PI { 0.0 } else { a });
        } else {
            let rest = mu[..dim - j - 1].iter().map(|m| m * m).sum::<f64>().sqrt();
            angles.push(rest.atan2(top));
        }
    }
    angles
}

/// Kernel spectrum from Cartan coefficients:
/// `π_i = (1/N)(1 + √2 κ Σ_{s>i} μ_{s²-1}/√(s(s-1)) - κ √(2(i-1)/i) μ_{i²-1})`.
pub fn mu_to_spectrum(dim: usize, mu: &[f64]) -> Result<OrderedSpectrum> {
    check_mu(dim, mu)?;
    Ok(spectrum_unchecked(dim, mu))
}

pub(crate) fn spectrum_unchecked(dim: usize, mu: &[f64]) -> OrderedSpectrum {
    let n = dim as f64;
    let k = kappa(dim);
    let sqrt2 = 2f64.sqrt();
    let values = (1..=dim)
        .map(|i| {
            let upper: f64 = ((i + 1).max(2)..=dim)
                .map(|s| mu[s - 2] / ((s * (s - 1)) as f64).sqrt())
                .sum();
            let own = if i >= 2 {
                k * (2.0 * (i - 1) as f64 / i as f64).sqrt() * mu[i - 2]
            } else {
                0.0
            };
            (1.0 + sqrt2 * k * upper - own) / n
        })
        .collect();
    OrderedSpectrum::new_unchecked(values)
}

/// Cartan coefficients of a diagonal kernel `diag(π)`:
/// `μ_{s²-1} = N tr(diag(π) λ_{s²-1}) / (2κ)`.
pub fn spectrum_to_mu(spectrum: &[f64]) -> Result<Vec<f64>> {
    let dim = spectrum.len();
    check_dim(dim)?;
    let k = kappa(dim);
    Ok((2..=dim)
        .map(|s| {
            let norm = (2.0 / (s * (s - 1)) as f64).sqrt();
            let head: f64 = spectrum[..s - 1].iter().sum();
            let tr = norm * (head - (s - 1) as f64 * spectrum[s - 1]);
            dim as f64 * tr / (2.0 * k)
        })
        .collect())
}

/// `μ_3 ≥ 0` and `μ_{(i+1)²-1} ≥ √((i-1)/(i+1)) μ_{i²-1}` for `i = 2..N-1`,
/// each to [`ORDERING_TOL`]. Equivalent to a descending spectrum.
pub fn check_ordering(dim: usize, mu: &[f64]) -> bool {
    if dim < 2 || mu.len() != dim - 1 {
        return false;
    }
    if mu[0] < -ORDERING_TOL {
        return false;
    }
    (2..dim).all(|s| mu[s - 1] - ordering_coefficient(s) * mu[s - 2] >= -ORDERING_TOL)
}

/// Locates a point in `P = P1 ∪ (∪_k P2(k)) ∪ P3`. Membership is decided by
/// the ordering inequalities; the subregion label by which sines vanish.
pub fn classify_region(point: &ModuliPoint) -> RegionMembership {
    let dim = point.dim;
    if !check_ordering(dim, &point.mu) {
        return RegionMembership { in_region: false, subregion: Subregion::Outside };
    }
    let angles = &point.angles;
    if angles.is_empty() || angles[0].sin().abs() <= SIN_ZERO_TOL {
        return RegionMembership { in_region: true, subregion: Subregion::P1 };
    }
    // Largest k in 2..=N-2 with sin ψ_{N-k} = 0, i.e. smallest index N-k.
    for k in (2..=dim.saturating_sub(2)).rev() {
        let idx = dim - k;
        if angles[idx - 1].sin().abs() <= SIN_ZERO_TOL {
            return RegionMembership { in_region: true, subregion: Subregion::P2(k) };
        }
    }
    RegionMembership { in_region: true, subregion: Subregion::P3 }
}

/// Upper bound of `ψ_j` on the admissible region given `ψ_{j+1}`.
fn angle_upper_bound(dim: usize, j: usize, next: Option<f64>) -> f64 {
    // ψ_j carries the inequality between levels i and i+1 with i = N - j.
    let i = dim - j;
    let c = ordering_coefficient(i);
    let cos_next = next.map_or(1.0, f64::cos);
    1f64.atan2(c * cos_next)
}

/// Equal-angle grid over the admissible region.
///
/// Angles are swept from `ψ_{N-2}` down to `ψ_1`, each over
/// `[0, upper bound]` with `resolution` points; the bound of `ψ_j` follows
/// from the inequality it carries and the current `ψ_{j+1}`. Points where a
/// vanishing sine makes the remaining angles irrelevant are emitted once,
/// with those angles set to zero.
pub fn sample_moduli_grid(dim: usize, resolution: usize) -> Result<Vec<ModuliPoint>> {
    check_dim(dim)?;
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    if dim == 2 {
        return Ok(vec![ModuliPoint::from_angles(2, &[])?]);
    }
    let n_angles = dim - 2;
    let mut out = Vec::new();
    let mut current = vec![0.0; n_angles];
    grid_recurse(dim, resolution, n_angles, &mut current, &mut out);
    Ok(out)
}

fn grid_recurse(
    dim: usize,
    resolution: usize,
    j: usize,
    current: &mut Vec<f64>,
    out: &mut Vec<ModuliPoint>,
) {
    let n_angles = dim - 2;
    let next = if j == n_angles { None } else { Some(current[j]) };
    let upper = angle_upper_bound(dim, j, next);
    for step in 0..resolution {
        let value = upper * step as f64 / (resolution - 1) as f64;
        current[j - 1] = value;
        // A zero angle below the last one kills every larger-index angle.
        if step == 0 && j < n_angles && current[j..].iter().any(|&a| a != 0.0) {
            continue;
        }
        if j == 1 {
            let mu = angles_to_mu_unchecked(dim, current);
            out.push(ModuliPoint { dim, angles: current.clone(), mu });
        } else {
            grid_recurse(dim, resolution, j - 1, current, out);
        }
    }
    current[j - 1] = 0.0;
}

/// Area of the unit `n`-sphere `S^n ⊂ R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n - 1) as f64 * sphere_area(n - 2),
    }
}

/// Monte-Carlo estimate of the area of the admissible region.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AreaEstimate {
    pub fraction: f64,
    pub area: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Rejection-sampling estimate: uniform points on `S^{N-2}` (normalized
/// Gaussians), fraction that satisfy the ordering inequalities, times the
/// sphere area.
pub fn admissible_area_mc(dim: usize, samples: usize, seed: u64) -> Result<AreaEstimate> {
    check_dim(dim)?;
    if dim < 3 {
        return Err(Error::InvalidDimension { dim, reason: "the qubit moduli space is a point" });
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut mu = vec![0.0; dim - 1];
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut norm = 0.0f64;
        for m in mu.iter_mut() {
            *m = StandardNormal.sample(&mut rng);
            norm += *m * *m;
        }
        let norm = norm.sqrt();
        mu.iter_mut().for_each(|m| *m /= norm);
        if check_ordering(dim, &mu) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let total = sphere_area(dim - 2);
    Ok(AreaEstimate {
        fraction: p,
        area: p * total,
        std_error: (p * (1.0 - p) / samples as f64).sqrt() * total,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn angles_to_mu_examples() {
        assert!(close(&angles_to_mu(3, &[PI / 2.0]).unwrap(), &[1.0, 0.0], 1e-15));
        assert!(close(&angles_to_mu(3, &[0.0]).unwrap(), &[0.0, 1.0], 1e-15));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // oracle: μ15 = cos ψ1, μ8 = sin ψ1 cos ψ2, μ3 = sin ψ1 sin ψ2
        let want = [s * s, s * s, s];
        assert!(close(&angles_to_mu(4, &[PI / 4.0, PI / 4.0]).unwrap(), &want, 1e-15));
        assert_eq!(angles_to_mu(2, &[]).unwrap(), vec![1.0]);
    }

    #[test]
    fn angle_range_errors() {
        assert!(matches!(angles_to_mu(4, &[-0.1, 0.0]), Err(Error::AngleRange { index: 1, .. })));
        assert!(matches!(angles_to_mu(4, &[0.1, 2.0 * PI]), Err(Error::AngleRange { index: 2, .. })));
        assert!(angles_to_mu(4, &[4.0, 0.0]).is_err());
        assert!(angles_to_mu(4, &[0.0, 5.0]).is_ok());
        assert!(matches!(angles_to_mu(4, &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let r3 = 3f64.sqrt();
        let q = mu_to_spectrum(2, &[1.0]).unwrap();
        assert!(close(q.values(), &[(1.0 + r3) / 2.0, (1.0 - r3) / 2.0], 1e-15));
        let luis = mu_to_spectrum(3, &[0.0, 1.0]).unwrap();
        assert!(close(luis.values(), &[1.0, 1.0, -1.0], 1e-14));
        let b = mu_to_spectrum(3, &[r3 / 2.0, 0.5]).unwrap();
        assert!(close(b.values(), &[5.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0], 1e-14));
        assert!(matches!(mu_to_spectrum(3, &[1.0, 1.0]), Err(Error::OffSphere { .. })));
    }

    #[test]
    fn spectrum_mu_inverse() {
        for n in 2..=6 {
            for k in 0..20 {
                let angles: Vec<f64> = (0..n - 2).map(|j| 0.1 + 0.13 * (k + j) as f64 % 2.9).collect();
                let mu = angles_to_mu(n, &angles).unwrap();
                let spec = mu_to_spectrum(n, &mu).unwrap();
                assert!(close(&spectrum_to_mu(spec.values()).unwrap(), &mu, 1e-13));
            }
        }
    }

    #[test]
    fn mu_angles_round_trip() {
        for n in 3..=6 {
            for k in 0..30 {
                let mut angles: Vec<f64> =
                    (0..n - 2).map(|j| 0.05 + ((k * 7 + j * 3) as f64 * 0.31) % 3.0).collect();
                *angles.last_mut().unwrap() = (k as f64 * 0.53) % (2.0 * PI);
                let mu = angles_to_mu(n, &angles).unwrap();
                let back = mu_to_angles(&mu);
                assert!(close(&back, &angles, 1e-12), "{angles:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn ordering_examples() {
        assert!(check_ordering(4, &[0.0, 0.0, 1.0]));
        assert!(!check_ordering(3, &[1.0, 0.0]));
        assert!(check_ordering(2, &[1.0]));
        assert!(!check_ordering(2, &[-1.0]));
    }

    #[test]
    fn region_examples() {
        for n in 2..=6 {
            let p = ModuliPoint::origin(n).unwrap();
            assert_eq!(classify_region(&p).subregion, Subregion::P1);
        }
        let p = ModuliPoint::from_angles(3, &[PI / 6.0]).unwrap();
        assert_eq!(classify_region(&p), RegionMembership { in_region: true, subregion: Subregion::P3 });
        let p = ModuliPoint::from_angles(3, &[PI / 2.0]).unwrap();
        assert_eq!(classify_region(&p).subregion, Subregion::Outside);
        // N=4, ψ2 = 0: μ3 = 0 face
        let p = ModuliPoint::from_angles(4, &[0.5, 0.0]).unwrap();
        assert_eq!(classify_region(&p).subregion, Subregion::P2(2));
        // N=5, ψ2 = 0 gives k = 3
        let p = ModuliPoint::from_angles(5, &[0.5, 0.0, 0.0]).unwrap();
        assert_eq!(classify_region(&p).subregion, Subregion::P2(3));
    }

    #[test]
    fn grid_shapes() {
        let g2 = sample_moduli_grid(2, 10).unwrap();
        assert_eq!(g2.len(), 1);
        assert_eq!(g2[0].mu(), &[1.0]);

        let g3 = sample_moduli_grid(3, 100).unwrap();
        assert_eq!(g3.len(), 100);
        assert_eq!(g3[0].angles(), &[0.0]);
        for p in &g3[1..] {
            assert!(p.angles()[0] > 0.0 && p.angles()[0] <= PI / 3.0 + 1e-15);
        }

        let g4 = sample_moduli_grid(4, 12).unwrap();
        assert_eq!(g4.len(), 12 * 11 + 1);
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        for p in &g4 {
            let m = p.mu();
            assert!(m[0] >= -1e-12 && m[1] >= m[0] / r3 - 1e-12 && m[2] >= m[1] / r2 - 1e-12);
        }
        assert!(sample_moduli_grid(4, 1).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
    }
}
