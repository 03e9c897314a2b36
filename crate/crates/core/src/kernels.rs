//! Stratonovich-Weyl kernels: construction from moduli points, the master
//! equations `tr Δ = 1`, `tr Δ² = N`, and the closed-form families known for
//! qubits, qutrits and quatrits.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{build_basis, spectral_decompose, HermitianMatrix, Unitary};
use crate::error::{Error, Result};
use crate::moduli::{kappa, spectrum_to_mu, ModuliPoint, OrderedSpectrum};

/// Residual bound for [`verify_master`].
pub const MASTER_TOL: f64 = 1e-9;
/// Eigenvalues with smaller magnitude count as zero in [`detect_singular`].
pub const ZERO_EIGEN_TOL: f64 = 1e-9;
/// Slack on the endpoints of family parameter intervals.
pub const INTERVAL_MARGIN: f64 = 1e-12;

/// A Hermitian matrix satisfying the master equations.
#[derive(Debug, Clone)]
pub struct SWKernel {
    matrix: HermitianMatrix,
    spectrum: OrderedSpectrum,
    moduli: Option<ModuliPoint>,
    phase_point: Option<Unitary>,
}

impl SWKernel {
    /// Accepts any Hermitian matrix that passes [`verify_master`]. The
    /// spectrum is recomputed; the moduli point is left empty.
    pub fn from_matrix(matrix: HermitianMatrix) -> Result<Self> {
        let report = verify_master(&matrix);
        if !report.pass {
            return Err(Error::MasterEquations {
                trace_residual: report.trace_residual,
                trace_sq_residual: report.trace_sq_residual,
            });
        }
        let spectrum = OrderedSpectrum::new_unchecked(spectral_decompose(&matrix).eigenvalues);
        Ok(Self { matrix, spectrum, moduli: None, phase_point: None })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> &OrderedSpectrum {
        &self.spectrum
    }

    pub fn moduli(&self) -> Option<&ModuliPoint> {
        self.moduli.as_ref()
    }

    /// The unitary the diagonal kernel was conjugated with, when known.
    pub fn phase_point(&self) -> Option<&Unitary> {
        self.phase_point.as_ref()
    }

    /// `U Δ U†`, keeping the moduli point.
    pub fn conjugated(&self, u: &Unitary) -> Result<SWKernel> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.dim() });
        }
        let phase = match &self.phase_point {
            Some(p) => u.compose(p),
            None => u.clone(),
        };
        Ok(Self {
            matrix: self.matrix.conjugate_by(u),
            spectrum: self.spectrum.clone(),
            moduli: self.moduli.clone(),
            phase_point: Some(phase),
        })
    }

    /// `tr Δⁿ` by repeated multiplication.
    pub fn trace_power(&self, n: u32) -> f64 {
        let m = self.matrix.matrix();
        let dim = self.dim();
        let mut acc = DMatrix::identity(dim, dim);
        for _ in 0..n {
            acc = &acc * m;
        }
        acc.trace().re
    }
}

/// `Δ = (1/N) U [I + κ Σ_s μ_{s²-1} λ_{s²-1}] U†`.
pub fn build_kernel(point: &ModuliPoint, u: &Unitary) -> Result<SWKernel> {
    let dim = point.dim();
    if u.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: u.dim() });
    }
    let diagonal = diagonal_kernel(point);
    let mut spectrum = point.spectrum().into_values();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok(SWKernel {
        matrix: diagonal.conjugate_by(u),
        spectrum: OrderedSpectrum::new_unchecked(spectrum),
        moduli: Some(point.clone()),
        phase_point: Some(u.clone()),
    })
}

/// The Cartan part `(1/N)[I + κ Σ μ λ]` assembled from the basis.
pub(crate) fn diagonal_kernel(point: &ModuliPoint) -> HermitianMatrix {
    let dim = point.dim();
    let basis = build_basis(dim).expect("moduli points have dim >= 2");
    let k = kappa(dim);
    let mut acc = HermitianMatrix::identity(dim);
    for (s, mu) in (2..=dim).zip(point.mu()) {
        acc = acc.combine(1.0, basis.cartan(s), k * mu);
    }
    acc.scale(1.0 / dim as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MasterReport {
    /// `|tr Δ - 1|`
    pub trace_residual: f64,
    /// `|tr Δ² - N|`
    pub trace_sq_residual: f64,
    pub pass: bool,
}

pub fn verify_master(m: &HermitianMatrix) -> MasterReport {
    let n = m.dim() as f64;
    let trace_residual = (m.trace() - 1.0).abs();
    let trace_sq_residual = (m.trace_product(m) - n).abs();
    MasterReport {
        trace_residual,
        trace_sq_residual,
        pass: trace_residual < MASTER_TOL && trace_sq_residual < MASTER_TOL,
    }
}

/// The closed-form kernel families for `N = 2, 3, 4`.
///
/// One-parameter intervals are checked with [`INTERVAL_MARGIN`] slack and
/// endpoints are accepted: there the formulas coincide with the adjacent,
/// more degenerate family (see [`KernelFamily::canonical`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    Qubit,
    /// `{(1-ν±δ)/2, ν}`, `δ = √((1+ν)(5-3ν))`, `ν ∈ [-1, -1/3]`.
    Qutrit(f64),
    /// Singular qutrit kernel `{(1+√5)/2, 0, (1-√5)/2}`.
    QutritGolden,
    /// `{(1-ν₁-ν₂±δ)/2, ν₁, ν₂}` over the curvilinear triangle ABC.
    QuatritRegular(f64, f64),
    Quatrit1_234(f64),
    Quatrit12_34(f64),
    Quatrit123_4(f64),
    Quatrit1_2_34,
    Quatrit12_3_4,
    Quatrit1_23_4,
    Quatrit1204(f64),
    Quatrit1034(f64),
    Quatrit1004,
}

struct Interval {
    lo: f64,
    hi: f64,
    printed: &'static str,
}

fn s5() -> f64 {
    5f64.sqrt()
}
fn s15() -> f64 {
    15f64.sqrt()
}

impl KernelFamily {
    /// Canonical family names, as accepted by [`KernelFamily::parse`].
    pub const NAMES: [&'static str; 13] = [
        "qubit",
        "qutrit",
        "qutrit-golden",
        "quatrit-regular",
        "quatrit-1|234",
        "quatrit-12|34",
        "quatrit-123|4",
        "quatrit-1|2|34",
        "quatrit-12|3|4",
        "quatrit-1|23|4",
        "quatrit-1204",
        "quatrit-1034",
        "quatrit-1004",
    ];

    /// Parses a family name; the `quatrit-` prefix may be dropped and
    /// `golden` stands for `qutrit-golden`.
    pub fn parse(name: &str, nu: Option<f64>, nu1: Option<f64>, nu2: Option<f64>) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase();
        let key = key.strip_prefix("quatrit-").unwrap_or(&key);
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| Error::InvalidArgument(format!("family `{name}` needs --{flag}")))
        };
        Ok(match key {
            "qubit" => Self::Qubit,
            "qutrit" => Self::Qutrit(need(nu, "nu")?),
            "golden" | "qutrit-golden" | "103" => Self::QutritGolden,
            "regular" | "1234" => Self::QuatritRegular(need(nu1, "nu1")?, need(nu2, "nu2")?),
            "1|234" => Self::Quatrit1_234(need(nu, "nu")?),
            "12|34" => Self::Quatrit12_34(need(nu, "nu")?),
            "123|4" => Self::Quatrit123_4(need(nu, "nu")?),
            "1|2|34" => Self::Quatrit1_2_34,
            "12|3|4" => Self::Quatrit12_3_4,
            "1|23|4" => Self::Quatrit1_23_4,
            "1204" => Self::Quatrit1204(need(nu, "nu")?),
            "1034" => Self::Quatrit1034(need(nu, "nu")?),
            "1004" => Self::Quatrit1004,
            _ => return Err(Error::UnknownFamily(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        use KernelFamily::*;
        match self {
            Qubit => "qubit",
            Qutrit(_) => "qutrit",
            QutritGolden => "qutrit-golden",
            QuatritRegular(..) => "quatrit-regular",
            Quatrit1_234(_) => "quatrit-1|234",
            Quatrit12_34(_) => "quatrit-12|34",
            Quatrit123_4(_) => "quatrit-123|4",
            Quatrit1_2_34 => "quatrit-1|2|34",
            Quatrit12_3_4 => "quatrit-12|3|4",
            Quatrit1_23_4 => "quatrit-1|23|4",
            Quatrit1204(_) => "quatrit-1204",
            Quatrit1034(_) => "quatrit-1034",
            Quatrit1004 => "quatrit-1004",
        }
    }

    pub fn dim(&self) -> usize {
        use KernelFamily::*;
        match self {
            Qubit => 2,
            Qutrit(_) | QutritGolden => 3,
            _ => 4,
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        use KernelFamily::*;
        match *self {
            Qutrit(v) | Quatrit1_234(v) | Quatrit12_34(v) | Quatrit123_4(v) | Quatrit1204(v)
            | Quatrit1034(v) => vec![v],
            QuatritRegular(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    fn interval(&self) -> Option<Interval> {
        use KernelFamily::*;
        let s22 = 22f64.sqrt();
        let s7 = 7f64.sqrt();
        Some(match self {
            Qutrit(_) => Interval { lo: -1.0, hi: -1.0 / 3.0, printed: "(-1, -1/3)" },
            Quatrit1_234(_) => Interval {
                lo: (1.0 - s15()) / 4.0,
                hi: (1.0 + s5()) / 4.0,
                printed: "((1-√15)/4, (1+√5)/4)",
            },
            Quatrit12_34(_) => Interval {
                lo: (1.0 - s5()) / 4.0,
                hi: (1.0 + s5()) / 4.0,
                printed: "((1-√5)/4, (1+√5)/4)",
            },
            Quatrit123_4(_) => Interval {
                lo: (1.0 - s15()) / 4.0,
                hi: (1.0 - s5()) / 4.0,
                printed: "((1-√15)/4, (1-√5)/4)",
            },
            Quatrit1204(_) => Interval {
                lo: (1.0 - s22) / 3.0,
                hi: (1.0 - s7) / 2.0,
                printed: "[(1-√22)/3, (1-√7)/2)",
            },
            Quatrit1034(_) => Interval {
                lo: (2.0 - s22) / 6.0,
                hi: 0.0,
                printed: "[(2-√22)/6, 0)",
            },
            _ => return None,
        })
    }

    fn check_parameters(&self) -> Result<()> {
        if let Some(iv) = self.interval() {
            let v = self.parameters()[0];
            if !v.is_finite() || v < iv.lo - INTERVAL_MARGIN || v > iv.hi + INTERVAL_MARGIN {
                return Err(Error::ParameterOutOfRange {
                    family: self.name().into(),
                    value: v,
                    interval: iv.printed.into(),
                });
            }
        }
        if let KernelFamily::QuatritRegular(a, b) = *self {
            let d2 = regular_discriminant(a, b);
            let mid = (1.0 - a - b - d2.max(0.0).sqrt()) / 2.0;
            let inside = a.is_finite()
                && b.is_finite()
                && d2 >= -INTERVAL_MARGIN
                && mid >= a - INTERVAL_MARGIN
                && a >= b - INTERVAL_MARGIN;
            if !inside {
                let bad = if a >= b - INTERVAL_MARGIN { b } else { a };
                return Err(Error::ParameterOutOfRange {
                    family: self.name().into(),
                    value: bad,
                    interval: "triangle ABC: δ² ≥ 0, (1-ν₁-ν₂-δ)/2 ≥ ν₁ ≥ ν₂".into(),
                });
            }
        }
        Ok(())
    }

    /// Maps parameters on an interval endpoint or triangle edge to the more
    /// degenerate family they describe; other values are returned unchanged.
    pub fn canonical(&self) -> KernelFamily {
        use KernelFamily::*;
        let at = |v: f64, target: f64| (v - target).abs() <= 1e-9;
        let (a5, b5, c15) = ((1.0 - s5()) / 4.0, (1.0 + s5()) / 4.0, (1.0 - s15()) / 4.0);
        match *self {
            Qutrit(v) if at(v, (1.0 - s5()) / 2.0) => QutritGolden,
            Quatrit1_234(v) if at(v, c15) => Quatrit1_23_4,
            Quatrit1_234(v) if at(v, b5) => Quatrit1_2_34,
            Quatrit12_34(v) if at(v, a5) => Quatrit12_3_4,
            Quatrit12_34(v) if at(v, b5) => Quatrit1_2_34,
            Quatrit123_4(v) if at(v, c15) => Quatrit1_23_4,
            Quatrit123_4(v) if at(v, a5) => Quatrit12_3_4,
            Quatrit1204(v) if at(v, (1.0 - 7f64.sqrt()) / 2.0) => Quatrit1004,
            Quatrit1034(v) if at(v, 0.0) => Quatrit1004,
            QuatritRegular(a, b) => {
                let d2 = regular_discriminant(a, b).max(0.0);
                let mid = (1.0 - a - b - d2.sqrt()) / 2.0;
                let top_pair = d2 <= 1e-12;
                let middle_pair = at(mid, a);
                let bottom_pair = at(a, b);
                match (top_pair, middle_pair, bottom_pair) {
                    (false, false, false) => *self,
                    (true, false, false) => Quatrit1_234(a),
                    (false, true, false) => Quatrit12_34(a),
                    (false, false, true) => Quatrit123_4(a),
                    (true, false, true) => Quatrit1_23_4,
                    (false, true, true) => Quatrit12_3_4,
                    _ => Quatrit1_2_34,
                }
            }
            other => other,
        }
    }

    /// Diagonal kernel with this spectrum at `U = I`.
    pub fn kernel(&self) -> Result<SWKernel> {
        let spec = family_spectrum(self)?;
        let point = ModuliPoint::from_mu(self.dim(), &spectrum_to_mu(spec.values())?)?;
        build_kernel(&point, &Unitary::identity(self.dim()))
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.parameters();
        if params.is_empty() {
            write!(f, "{}", self.name())
        } else {
            let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
            write!(f, "{}({})", self.name(), p.join(", "))
        }
    }
}

fn regular_discriminant(a: f64, b: f64) -> f64 {
    7.0 + 2.0 * a - 3.0 * a * a + 2.0 * b - 2.0 * a * b - 3.0 * b * b
}

/// Closed-form spectrum of a family member, sorted descending.
pub fn family_spectrum(family: &KernelFamily) -> Result<OrderedSpectrum> {
    use KernelFamily::*;
    family.check_parameters()?;
    let root = |x: f64| x.max(0.0).sqrt();
    let mut values = match *family {
        Qubit => {
            let r3 = 3f64.sqrt();
            vec![(1.0 + r3) / 2.0, (1.0 - r3) / 2.0]
        }
        Qutrit(nu) => {
            let d = root((1.0 + nu) * (5.0 - 3.0 * nu));
            vec![(1.0 - nu + d) / 2.0, (1.0 - nu - d) / 2.0, nu]
        }
        QutritGolden => vec![(1.0 + s5()) / 2.0, 0.0, (1.0 - s5()) / 2.0],
        QuatritRegular(a, b) => {
            let d = root(regular_discriminant(a, b));
            vec![(1.0 - a - b + d) / 2.0, (1.0 - a - b - d) / 2.0, a, b]
        }
        Quatrit1_234(nu) => {
            let d1 = root(22.0 + 4.0 * nu - 8.0 * nu * nu);
            let top = (1.0 - nu) / 3.0 + d1 / 6.0;
            vec![top, top, nu, (1.0 - nu - d1) / 3.0]
        }
        Quatrit12_34(nu) => {
            let d2 = root(7.0 + 4.0 * nu - 8.0 * nu * nu);
            vec![(1.0 - 2.0 * nu + d2) / 2.0, nu, nu, (1.0 - 2.0 * nu - d2) / 2.0]
        }
        Quatrit123_4(nu) => {
            let d2 = root(7.0 + 4.0 * nu - 8.0 * nu * nu);
            vec![(1.0 - 2.0 * nu + d2) / 2.0, (1.0 - 2.0 * nu - d2) / 2.0, nu, nu]
        }
        Quatrit1_2_34 => {
            let a = (1.0 + s5()) / 4.0;
            vec![a, a, a, (1.0 - 3.0 * s5()) / 4.0]
        }
        Quatrit12_3_4 => {
            let b = (1.0 - s5()) / 4.0;
            vec![(1.0 + 3.0 * s5()) / 4.0, b, b, b]
        }
        Quatrit1_23_4 => {
            let (a, b) = ((1.0 + s15()) / 4.0, (1.0 - s15()) / 4.0);
            vec![a, a, b, b]
        }
        Quatrit1204(nu) => {
            let d = root(7.0 + 2.0 * nu - 3.0 * nu * nu);
            vec![(1.0 - nu + d) / 2.0, (1.0 - nu - d) / 2.0, 0.0, nu]
        }
        Quatrit1034(nu) => {
            let d = root(7.0 + 2.0 * nu - 3.0 * nu * nu);
            vec![(1.0 - nu + d) / 2.0, 0.0, nu, (1.0 - nu - d) / 2.0]
        }
        Quatrit1004 => {
            let s7 = 7f64.sqrt();
            vec![(1.0 + s7) / 2.0, 0.0, 0.0, (1.0 - s7) / 2.0]
        }
    };
    values.sort_by(|a, b| b.total_cmp(a));
    OrderedSpectrum::new(values)
}

/// `tr Δⁿ` of the golden-ratio qutrit kernel for `n = 1..=max_n`, computed
/// from matrix powers. These are the Lucas numbers `L_n`.
pub fn lucas_traces(max_n: u32) -> Result<Vec<(u32, f64)>> {
    if max_n < 2 {
        return Err(Error::InvalidArgument("max_n must be at least 2".into()));
    }
    let kernel = KernelFamily::QutritGolden.kernel()?;
    Ok((1..=max_n).map(|n| (n, kernel.trace_power(n))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularReport {
    pub min_abs_eigenvalue: f64,
    pub zero_multiplicity: usize,
}

pub fn detect_singular(k: &SWKernel) -> SingularReport {
    let values = k.spectrum().values();
    SingularReport {
        min_abs_eigenvalue: values.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs())),
        zero_multiplicity: values.iter().filter(|v| v.abs() < ZERO_EIGEN_TOL).count(),
    }
}
