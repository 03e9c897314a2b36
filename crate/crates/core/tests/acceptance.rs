//! End-to-end acceptance checks. Prints one line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use swkernel::algebra::sample_haar_unitary_with;
use swkernel::moduli::{admissible_area_mc, mu_to_angles, spectrum_to_mu};
use swkernel::orbits::{gram_of, DEFAULT_TOL};
use swkernel::wigner::random_density_with;
use swkernel::{
    angles_to_mu, build_basis, build_kernel, classify_region, classify_stratum, family_spectrum,
    lucas_traces, mu_to_spectrum, reconstruct_mc, sample_moduli_grid, spectral_decompose,
    verify_master, weingarten_check, KernelFamily, ModuliPoint, Unitary,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn eigenvalues(m: &swkernel::HermitianMatrix) -> Vec<f64> {
    spectral_decompose(m).eigenvalues
}

/// Admissible point from a uniformly random spectrum direction.
fn random_point(dim: usize, rng: &mut ChaCha20Rng) -> ModuliPoint {
    let mut mu: Vec<f64> = (0..dim - 1).map(|_| rng.sample(StandardNormal)).collect();
    let norm = mu.iter().map(|m| m * m).sum::<f64>().sqrt();
    mu.iter_mut().for_each(|m| *m /= norm);
    let mut spec = mu_to_spectrum(dim, &mu).unwrap().into_values();
    spec.sort_by(|a, b| b.total_cmp(a));
    ModuliPoint::from_mu(dim, &spectrum_to_mu(&spec).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let r3 = 3f64.sqrt();
    let want = [(1.0 + r3) / 2.0, (1.0 - r3) / 2.0];
    let start = Instant::now();
    let k = build_kernel(&ModuliPoint::origin(2).unwrap(), &Unitary::identity(2)).unwrap();
    let spec = k.spectrum().values().to_vec();
    let elapsed = start.elapsed();
    let err = max_abs_diff(&spec, &want).max(max_abs_diff(&eigenvalues(k.matrix()), &want));
    outcome(
        err < 1e-12 && elapsed.as_secs_f64() < 1e-3,
        format!("max error {err:.2e}, {:.1} µs", elapsed.as_secs_f64() * 1e6),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for dim in 2..=5 {
        for _ in 0..1000 {
            let p = random_point(dim, &mut rng);
            let u = sample_haar_unitary_with(dim, &mut rng).unwrap();
            let k = build_kernel(&p, &u).unwrap();
            let m = k.matrix().matrix();
            let tr = m.trace().re;
            let tr2 = (m * m).trace().re;
            worst = worst.max((tr - 1.0).abs()).max((tr2 - dim as f64).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-10 && secs < 5.0, format!("max residual {worst:.2e} over 4000 kernels, {secs:.2} s"))
}

fn criterion_3() -> Outcome {
    let luis = eigenvalues(KernelFamily::Qutrit(-1.0).kernel().unwrap().matrix());
    let top = eigenvalues(KernelFamily::Qutrit(-1.0 / 3.0).kernel().unwrap().matrix());
    let e_luis = max_abs_diff(&luis, &[1.0, 1.0, -1.0]);
    let e_top = max_abs_diff(&top, &[5.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]);

    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut worst_inv = 0.0f64;
    let mut worst_nu = 0.0f64;
    for j in 0..100 {
        let zeta = PI / 3.0 * j as f64 / 99.0;
        let p = ModuliPoint::from_angles(3, &[zeta]).unwrap();
        let u = sample_haar_unitary_with(3, &mut rng).unwrap();
        let k = build_kernel(&p, &u).unwrap();
        let shifted = k.matrix().matrix() - DMatrix::<Complex64>::identity(3, 3).scale(1.0 / 3.0);
        let det = shifted.determinant().re;
        worst_inv = worst_inv.max(((3.0 * zeta).cos() + 27.0 / 16.0 * det).abs());
        let nu = k.spectrum().values()[2];
        worst_nu = worst_nu.max((nu - (1.0 / 3.0 - 4.0 / 3.0 * zeta.cos())).abs());
    }
    let pass = e_luis < 1e-12 && e_top < 1e-12 && worst_inv < 1e-9 && worst_nu < 1e-9;
    outcome(
        pass,
        format!(
            "endpoints {e_luis:.1e} / {e_top:.1e}; cos 3ζ residual {worst_inv:.1e}, ν(ζ) residual {worst_nu:.1e} over 100 samples"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut lucas = vec![2.0f64, 1.0];
    for n in 2..=10 {
        lucas.push(lucas[n - 1] + lucas[n - 2]);
    }
    let printed = [3.0, 4.0, 7.0, 11.0, 18.0, 29.0, 47.0, 76.0, 123.0];
    let oracle_ok = lucas[2..] == printed;
    let traces = lucas_traces(10).unwrap();
    let worst = traces
        .iter()
        .filter(|(n, _)| *n >= 2)
        .map(|&(n, t)| ((t - lucas[n as usize]) / lucas[n as usize]).abs())
        .fold(0.0, f64::max);
    outcome(oracle_ok && worst < 1e-8, format!("L2..L10 max relative error {worst:.1e}"))
}

/// Residual of a descending quatrit spectrum `(p, q, a, b)` against the
/// regular formula `{(1-a-b±δ)/2, a, b}`, `δ² = 7+2a-3a²+2b-2ab-3b²`,
/// written as `p + q = 1-a-b` and `(p-q)² = δ²` so it stays well
/// conditioned where `δ → 0`.
fn regular_residual(s: &[f64]) -> f64 {
    let (a, b) = (s[2], s[3]);
    let d2 = 7.0 + 2.0 * a - 3.0 * a * a + 2.0 * b - 2.0 * a * b - 3.0 * b * b;
    let sum = (s[0] + s[1] - (1.0 - a - b)).abs();
    let gap = ((s[0] - s[1]).powi(2) - d2).abs();
    sum.max(gap)
}

fn criterion_5() -> Outcome {
    let (s5, s7, s15, s22) = (5f64.sqrt(), 7f64.sqrt(), 15f64.sqrt(), 22f64.sqrt());
    let lin = |lo: f64, hi: f64| (0..=10).map(move |j| lo + (hi - lo) * j as f64 / 10.0);
    let mut catalog: Vec<KernelFamily> = vec![
        KernelFamily::Quatrit1_2_34,
        KernelFamily::Quatrit12_3_4,
        KernelFamily::Quatrit1_23_4,
        KernelFamily::Quatrit1004,
        KernelFamily::QuatritRegular(-0.3, -0.6),
        KernelFamily::QuatritRegular(-0.35, -0.45),
    ];
    catalog.extend(lin((1.0 - s15) / 4.0, (1.0 + s5) / 4.0).map(KernelFamily::Quatrit1_234));
    catalog.extend(lin((1.0 - s5) / 4.0, (1.0 + s5) / 4.0).map(KernelFamily::Quatrit12_34));
    catalog.extend(lin((1.0 - s15) / 4.0, (1.0 - s5) / 4.0).map(KernelFamily::Quatrit123_4));
    catalog.extend(lin((1.0 - s22) / 3.0, (1.0 - s7) / 2.0).map(KernelFamily::Quatrit1204));
    catalog.extend(lin((2.0 - s22) / 6.0, 0.0).map(KernelFamily::Quatrit1034));

    let mut master_fail = 0;
    let mut curve_err = 0.0f64;
    let mut curve_cond = 0.0f64;
    for f in &catalog {
        let k = match f.kernel() {
            Ok(k) => k,
            Err(_) => {
                master_fail += 1;
                continue;
            }
        };
        if !verify_master(k.matrix()).pass {
            master_fail += 1;
        }
        let spec = family_spectrum(f).unwrap().into_values();
        curve_err = curve_err.max(regular_residual(&spec));
        let cond = match f {
            KernelFamily::Quatrit1_234(_) => spec[0] - spec[1],
            KernelFamily::Quatrit12_34(_) => spec[1] - spec[2],
            KernelFamily::Quatrit123_4(_) => spec[2] - spec[3],
            KernelFamily::Quatrit1204(nu) => spec.iter().map(|v| v.abs()).fold(f64::MAX, f64::min) + (spec[3] - nu),
            KernelFamily::Quatrit1034(nu) => spec[1].abs() + (spec[2] - nu),
            _ => 0.0,
        };
        curve_cond = curve_cond.max(cond.abs());
    }

    let vertices = [
        (KernelFamily::Quatrit12_3_4, "12|3|4", 6),
        (KernelFamily::Quatrit1_2_34, "1|2|34", 6),
        (KernelFamily::Quatrit1_23_4, "1|23|4", 8),
    ];
    let mut strata_ok = true;
    for (f, pattern, orbit) in vertices {
        let s = classify_stratum(&f.kernel().unwrap(), DEFAULT_TOL).unwrap();
        strata_ok &= s.pattern == pattern && s.orbit_dim == orbit;
    }
    let pass = master_fail == 0 && strata_ok && curve_err < 1e-9 && curve_cond < 1e-9;
    outcome(
        pass,
        format!(
            "{} kernels, {master_fail} master failures; vertex strata {}; curve error {curve_err:.1e}, curve condition {curve_cond:.1e}",
            catalog.len(),
            if strata_ok { "ok" } else { "WRONG" }
        ),
    )
}

fn criterion_6() -> Outcome {
    let cases: Vec<(KernelFamily, usize)> = vec![
        (KernelFamily::Qutrit(-0.6), 6),
        (KernelFamily::QutritGolden, 6),
        (KernelFamily::Qutrit(-1.0), 4),
        (KernelFamily::QuatritRegular(-0.3, -0.6), 12),
        (KernelFamily::Quatrit1204(-0.9), 12),
        (KernelFamily::Quatrit1034(-0.2), 12),
        (KernelFamily::Quatrit1_234(0.0), 10),
        (KernelFamily::Quatrit12_34(0.3), 10),
        (KernelFamily::Quatrit123_4(-0.5), 10),
        (KernelFamily::Quatrit1004, 10),
        (KernelFamily::Quatrit1_23_4, 8),
        (KernelFamily::Quatrit12_3_4, 6),
        (KernelFamily::Quatrit1_2_34, 6),
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for (f, want) in &cases {
        let base = f.kernel().unwrap();
        let basis = build_basis(base.dim()).unwrap();
        let stratum = classify_stratum(&base, DEFAULT_TOL).unwrap();
        let mut ok = stratum.orbit_dim == *want;
        for _ in 0..100 {
            let u = sample_haar_unitary_with(base.dim(), &mut rng).unwrap();
            let k = base.conjugated(&u).unwrap();
            ok &= gram_of(k.matrix(), &basis).unwrap().rank == *want;
        }
        if !ok {
            failures.push(f.to_string());
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} families × 100 Haar draws; failures: {:?}", cases.len(), failures),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut parts = Vec::new();
    let mut pass = true;
    for (dim, point) in [
        (2, ModuliPoint::origin(2).unwrap()),
        (3, ModuliPoint::from_angles(3, &[0.5]).unwrap()),
    ] {
        let rho = random_density_with(dim, &mut rng).unwrap();
        let big = reconstruct_mc(&rho, &point, 100_000, 70 + dim as u64).unwrap();
        let budgets = [10_000usize, 40_000, 160_000];
        let medians: Vec<f64> = budgets
            .iter()
            .map(|&m| {
                median((0..20).map(|s| reconstruct_mc(&rho, &point, m, 1000 + s).unwrap().error).collect())
            })
            .collect();
        let ratios = [medians[0] / medians[1], medians[1] / medians[2]];
        let ok = big.error < 0.05 && ratios.iter().all(|r| (4.0 / 3.0..=3.0).contains(r));
        pass &= ok;
        parts.push(format!(
            "N={dim}: error {:.4} at M=1e5, median ratios {:.2}/{:.2}",
            big.error, ratios[0], ratios[1]
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(pass, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let r2 = weingarten_check(2, 100_000, 8).unwrap();
    let r3 = weingarten_check(3, 100_000, 9).unwrap();
    outcome(
        r2.max_deviation < 0.02 && r3.max_deviation < 0.02,
        format!(
            "max deviation {:.2e} (N=2, {} tuples), {:.2e} (N=3, {} tuples)",
            r2.max_deviation, r2.tuples, r3.max_deviation, r3.tuples
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut disagreements = 0;
    let mut inside = 0;
    for _ in 0..10_000 {
        let angles = [rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)];
        let p = ModuliPoint::from_angles(4, &angles).unwrap();
        let spec = mu_to_spectrum(4, p.mu()).unwrap();
        let descending = spec.values().windows(2).all(|w| w[0] >= w[1] - 1e-12);
        let region = classify_region(&p).in_region;
        inside += usize::from(region);
        disagreements += usize::from(region != descending);
    }
    let area = admissible_area_mc(4, 4_000_000, 10).unwrap();
    let want = 4.0 * PI / 24.0;
    let rel = (area.area - want).abs() / want;
    outcome(
        disagreements == 0 && rel < 0.01,
        format!(
            "{disagreements} disagreements ({inside} inside); area {:.5} vs 4π/24 = {want:.5}, relative error {rel:.2e}",
            area.area
        ),
    )
}

/// Rank of the Jacobian of angles ↦ μ by central differences.
fn jacobian_rank(dim: usize, angles: &[f64]) -> usize {
    let h = 1e-6;
    let cols: Vec<Vec<f64>> = (0..angles.len())
        .map(|j| {
            let mut up = angles.to_vec();
            let mut dn = angles.to_vec();
            up[j] += h;
            dn[j] -= h;
            let a = angles_to_mu(dim, &up).unwrap();
            let b = angles_to_mu(dim, &dn).unwrap();
            a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        })
        .collect();
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(dim - 1, cols.len(), |i, j| cols[j][i]);
    m.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-6).count()
}

fn criterion_10() -> Outcome {
    let res = 9;
    let g2 = sample_moduli_grid(2, res).unwrap();
    let g3 = sample_moduli_grid(3, res).unwrap();
    let g4 = sample_moduli_grid(4, res).unwrap();
    let counts_ok = g2.len() == 1 && g3.len() == res && g4.len() == res * (res - 1) + 1;
    let params_ok = g2.iter().all(|p| p.angles().is_empty())
        && g3.iter().all(|p| p.angles().len() == 1)
        && g4.iter().all(|p| p.angles().len() == 2);
    let all_admissible = g2.iter().chain(&g3).chain(&g4).all(|p| classify_region(p).in_region);
    let rank3 = jacobian_rank(3, &[0.5]);
    let rank4 = jacobian_rank(4, &[0.5, 0.4]);
    let round_trip = g4
        .iter()
        .filter(|p| p.angles()[0] > 1e-9)
        .all(|p| max_abs_diff(&mu_to_angles(p.mu()), p.angles()) < 1e-9);
    let pass = counts_ok && params_ok && all_admissible && rank3 == 1 && rank4 == 2 && round_trip;
    outcome(
        pass,
        format!(
            "grid sizes {}/{}/{} at resolution {res}; Jacobian ranks 1/2 → {rank3}/{rank4}",
            g2.len(),
            g3.len(),
            g4.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("qubit kernel spectrum", criterion_1),
        ("master equations on random kernels", criterion_2),
        ("qutrit arc", criterion_3),
        ("golden kernel traces", criterion_4),
        ("quatrit catalog", criterion_5),
        ("Gram rank classification", criterion_6),
        ("Monte-Carlo reconstruction", criterion_7),
        ("Weingarten fourth moments", criterion_8),
        ("admissible region membership and area", criterion_9),
        ("moduli dimension", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
