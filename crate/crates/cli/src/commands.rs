use std::path::Path;

use serde::Serialize;
use swkernel::kernels::MASTER_TOL;
use swkernel::moduli::ModuliPoint;
use swkernel::orbits::{Stratum, DEFAULT_TOL};
use swkernel::{
    build_kernel, classify_region, classify_stratum, detect_singular, sample_haar_unitaries,
    sample_haar_unitary, sample_moduli_grid, verify_master, weingarten_check, wigner_value,
    KernelFamily, MasterReport, SWKernel, SingularReport, Unitary,
};

use crate::io::{num, read_kernel, read_kernel_matrix, read_state, to_json, MatrixParts, Output};
use crate::{Failure, Format, KernelSpec};

/// Resolves the kernel flags. Without `--family` or `--angles` the qubit
/// kernel is used for `N = 2` and the all-zero angles point otherwise.
fn resolve(spec: &KernelSpec, default_dim: Option<usize>) -> Result<(SWKernel, Option<KernelFamily>), Failure> {
    if let Some(name) = &spec.family {
        let family = KernelFamily::parse(name, spec.nu, spec.nu1, spec.nu2)?;
        if let Some(dim) = spec.dim.or(default_dim) {
            if dim != family.dim() {
                return Err(Failure::Usage(format!(
                    "family `{}` has N = {}, but N = {dim} was requested",
                    family.name(),
                    family.dim()
                )));
            }
        }
        return Ok((family.kernel()?, Some(family)));
    }
    let dim = spec
        .dim
        .or(default_dim)
        .ok_or_else(|| Failure::Usage("pass --dim, --family or --angles".into()))?;
    let point = match &spec.angles {
        Some(angles) => ModuliPoint::from_angles(dim, angles)?,
        None if dim == 2 => ModuliPoint::origin(2)?,
        None => ModuliPoint::from_angles(dim, &vec![0.0; dim.saturating_sub(2)])?,
    };
    let family = (dim == 2).then_some(KernelFamily::Qubit);
    Ok((build_kernel(&point, &Unitary::identity(dim))?, family))
}

#[derive(Serialize)]
struct KernelReport {
    dim: usize,
    family: Option<String>,
    parameters: Vec<f64>,
    spectrum: Vec<f64>,
    mu: Vec<f64>,
    angles: Vec<f64>,
    region: String,
    stratum: Stratum,
    master: MasterReport,
    singular: SingularReport,
    phase_seed: Option<u64>,
    matrix: MatrixParts,
}

pub fn kernel(spec: &KernelSpec, phase_seed: Option<u64>) -> Result<Output, Failure> {
    let (mut k, family) = resolve(spec, None)?;
    if let Some(seed) = phase_seed {
        k = k.conjugated(&sample_haar_unitary(k.dim(), seed)?)?;
    }
    let point = k.moduli().cloned().expect("resolved kernels carry a moduli point");
    let report = KernelReport {
        dim: k.dim(),
        family: family.map(|f| f.name().to_string()),
        parameters: family.map(|f| f.parameters()).unwrap_or_default(),
        spectrum: k.spectrum().values().to_vec(),
        mu: point.mu().to_vec(),
        angles: point.angles().to_vec(),
        region: classify_region(&point).subregion.to_string(),
        stratum: classify_stratum(&k, DEFAULT_TOL)?,
        master: verify_master(k.matrix()),
        singular: detect_singular(&k),
        phase_seed,
        matrix: MatrixParts::of(k.matrix()),
    };
    Ok(Output::ok(to_json(&report)))
}

#[derive(Serialize)]
struct GridRow {
    angles: Vec<f64>,
    mu: Vec<f64>,
    spectrum: Vec<f64>,
    stratum: String,
    orbit_dim: usize,
    det: f64,
    subregion: String,
}

#[derive(Serialize)]
struct Grid {
    dim: usize,
    resolution: usize,
    count: usize,
    rows: Vec<GridRow>,
}

pub fn moduli_grid(dim: usize, resolution: usize, format: Format) -> Result<Output, Failure> {
    if dim < 2 {
        return Err(Failure::Usage("--dim must be at least 2".into()));
    }
    if resolution < 2 {
        return Err(Failure::Usage("--resolution must be at least 2".into()));
    }
    let rows: Vec<GridRow> = sample_moduli_grid(dim, resolution)?
        .iter()
        .map(|p| {
            let spectrum = p.spectrum();
            let stratum = Stratum::from_spectrum(spectrum.values(), DEFAULT_TOL);
            GridRow {
                angles: p.angles().to_vec(),
                mu: p.mu().to_vec(),
                det: spectrum.determinant(),
                spectrum: spectrum.into_values(),
                stratum: stratum.pattern,
                orbit_dim: stratum.orbit_dim,
                subregion: classify_region(p).subregion.to_string(),
            }
        })
        .collect();
    let text = match format {
        Format::Json => to_json(&Grid { dim, resolution, count: rows.len(), rows }),
        Format::Csv => {
            let mut header: Vec<String> = (1..=dim - 2).map(|j| format!("psi{j}")).collect();
            header.extend((2..=dim).map(|s| format!("mu{}", s * s - 1)));
            header.extend((1..=dim).map(|i| format!("pi{i}")));
            header.extend(["stratum", "orbit_dim", "det", "subregion"].map(String::from));
            let mut out = header.join(",");
            out.push('\n');
            for r in &rows {
                let mut cells: Vec<String> =
                    r.angles.iter().chain(&r.mu).chain(&r.spectrum).map(|&v| num(v)).collect();
                cells.push(r.stratum.clone());
                cells.push(r.orbit_dim.to_string());
                cells.push(num(r.det));
                cells.push(r.subregion.clone());
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct Check {
    name: String,
    dim: usize,
    residual: f64,
    tolerance: f64,
    samples: Option<usize>,
    pass: bool,
}

impl Check {
    fn new(name: &str, dim: usize, residual: f64, tolerance: f64, samples: Option<usize>) -> Self {
        Check { name: name.into(), dim, residual, tolerance, samples, pass: residual < tolerance }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    samples: usize,
    trials: usize,
    checks: Vec<Check>,
    pass: bool,
}

/// A fixed interior point of the admissible region.
fn generic_point(dim: usize) -> Result<ModuliPoint, Failure> {
    let grid = sample_moduli_grid(dim, 5)?;
    Ok(grid[grid.len() / 2].clone())
}

fn named_families(dim: usize) -> Vec<KernelFamily> {
    use KernelFamily::*;
    match dim {
        2 => vec![Qubit],
        3 => vec![Qutrit(-1.0), Qutrit(-0.6), Qutrit(-1.0 / 3.0), QutritGolden],
        4 => vec![
            QuatritRegular(-0.3, -0.6),
            Quatrit1_234(0.0),
            Quatrit12_34(0.3),
            Quatrit123_4(-0.5),
            Quatrit1_2_34,
            Quatrit12_3_4,
            Quatrit1_23_4,
            Quatrit1204(-1.0),
            Quatrit1034(-0.2),
            Quatrit1004,
        ],
        _ => vec![],
    }
}

fn stratum_check(name: &str, k: &SWKernel) -> Check {
    let residual = match classify_stratum(k, DEFAULT_TOL) {
        Ok(_) => 0.0,
        Err(swkernel::Error::StratumInconsistent { expected, rank, .. }) => expected.abs_diff(rank) as f64,
        Err(_) => f64::INFINITY,
    };
    Check::new(name, k.dim(), residual, 0.5, None)
}

pub fn verify(
    dims: &[usize],
    samples: usize,
    trials: usize,
    seed: u64,
    kernel_file: Option<&Path>,
) -> Result<Output, Failure> {
    if samples == 0 || trials == 0 {
        return Err(Failure::Usage("--samples and --trials must be positive".into()));
    }
    let mut checks = Vec::new();
    if let Some(path) = kernel_file {
        let m = read_kernel_matrix(path)?;
        let master = verify_master(&m);
        checks.push(Check::new(
            "master-equations",
            m.dim(),
            master.trace_residual.max(master.trace_sq_residual),
            MASTER_TOL,
            None,
        ));
        if master.pass {
            checks.push(stratum_check("gram-consistency", &read_kernel(path)?));
        }
    } else {
        for &dim in dims {
            if dim < 2 {
                return Err(Failure::Usage(format!("invalid dimension {dim} in --dims")));
            }
            let point = generic_point(dim)?;
            let mut worst = 0.0f64;
            for u in sample_haar_unitaries(dim, trials, seed)? {
                let r = verify_master(build_kernel(&point, &u)?.matrix());
                worst = worst.max(r.trace_residual).max(r.trace_sq_residual);
            }
            checks.push(Check::new("master-equations", dim, worst, 1e-10, Some(trials)));

            let postulates = swkernel::check_sw_postulates(&point, trials, samples, seed)?;
            for c in postulates.checks {
                checks.push(Check {
                    name: c.name.to_string(),
                    dim,
                    residual: c.residual,
                    tolerance: c.tolerance,
                    samples: Some(c.samples),
                    pass: c.pass,
                });
            }

            if dim <= 3 {
                let m = samples.max(10_000);
                let w = weingarten_check(dim, m, seed)?;
                checks.push(Check::new("weingarten", dim, w.max_deviation, 5.0 / (m as f64).sqrt(), Some(m)));
            }

            let mut kernels = vec![build_kernel(&point, &Unitary::identity(dim))?];
            for f in named_families(dim) {
                kernels.push(f.kernel()?);
            }
            let mut bad = 0.0;
            for k in &kernels {
                bad += stratum_check("gram-consistency", k).residual;
            }
            checks.push(Check::new("gram-consistency", dim, bad, 0.5, Some(kernels.len())));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport { seed, samples, trials, checks, pass };
    Ok(Output { text: to_json(&report), pass })
}

#[derive(Serialize)]
struct WignerReport {
    dim: usize,
    value: f64,
    imag_residue: f64,
    kernel_spectrum: Vec<f64>,
    phase_seed: Option<u64>,
}

#[derive(Serialize)]
struct SweepReport {
    dim: usize,
    seed: u64,
    samples: usize,
    min: f64,
    max: f64,
    mean: f64,
    values: Vec<f64>,
}

pub fn wigner(
    state: &Path,
    spec: &KernelSpec,
    kernel_file: Option<&Path>,
    phase_seed: Option<u64>,
    sweep: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<Output, Failure> {
    let rho = read_state(state)?;
    let k = match kernel_file {
        Some(path) => read_kernel(path)?,
        None => resolve(spec, Some(rho.dim()))?.0,
    };
    if k.dim() != rho.dim() {
        return Err(Failure::Invalid(format!("state has N = {}, kernel has N = {}", rho.dim(), k.dim())));
    }
    if let Some(m) = sweep {
        if m == 0 {
            return Err(Failure::Usage("--sweep must be positive".into()));
        }
        let mut values = Vec::with_capacity(m);
        for u in sample_haar_unitaries(k.dim(), m, seed)? {
            values.push(wigner_value(&rho, &k.conjugated(&u)?)?.value);
        }
        let text = match format {
            Format::Csv => {
                let mut out = String::from("index,value\n");
                for (i, v) in values.iter().enumerate() {
                    out.push_str(&format!("{i},{}\n", num(*v)));
                }
                out
            }
            Format::Json => to_json(&SweepReport {
                dim: k.dim(),
                seed,
                samples: m,
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean: values.iter().sum::<f64>() / m as f64,
                values,
            }),
        };
        return Ok(Output::ok(text));
    }
    let k = match phase_seed {
        Some(s) => k.conjugated(&sample_haar_unitary(k.dim(), s)?)?,
        None => k,
    };
    let w = wigner_value(&rho, &k)?;
    let text = match format {
        Format::Csv => format!("value\n{}\n", num(w.value)),
        Format::Json => to_json(&WignerReport {
            dim: k.dim(),
            value: w.value,
            imag_residue: w.imag_residue,
            kernel_spectrum: k.spectrum().values().to_vec(),
            phase_seed,
        }),
    };
    Ok(Output::ok(text))
}
