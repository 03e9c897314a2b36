use swkernel::orbits::gram_of;
use swkernel::{build_basis, build_kernel, ModuliPoint, Unitary};

fn diagonal_kernel_gram(dim: usize, angles: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = ModuliPoint::from_angles(dim, angles).unwrap();
    let k = build_kernel(&p, &Unitary::identity(dim)).unwrap();
    let g = gram_of(k.matrix(), &build_basis(dim).unwrap()).unwrap();
    (p.mu().to_vec(), g.diagonal())
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() < tol, "entry {i}: {a} vs {b}");
    }
}

#[test]
fn qutrit_gram_diagonal() {
    let r3 = 3f64.sqrt();
    for &z in &[0.0, 0.2, 0.7, 1.0] {
        let (mu, d) = diagonal_kernel_gram(3, &[z]);
        let (m3, m8) = (mu[0], mu[1]);
        let g1 = 4.0 * m3 * m3;
        let g2 = (m3 + r3 * m8).powi(2);
        let g3 = (m3 - r3 * m8).powi(2);
        let want: Vec<f64> = [g1, g1, 0.0, g2, g2, g3, g3, 0.0].iter().map(|g| 4.0 / 3.0 * g).collect();
        assert_close(&d, &want, 1e-12);
    }
}

#[test]
fn quatrit_gram_diagonal() {
    let (r2, r3, r6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    for angles in [[0.3, 0.2], [0.9, 0.5], [0.0, 0.0], [1.2, 1.0]] {
        let (mu, d) = diagonal_kernel_gram(4, &angles);
        let (m3, m8, m15) = (mu[0], mu[1], mu[2]);
        let g = [
            3.0 * m3 * m3,
            0.75 * (m3 + r3 * m8).powi(2),
            0.75 * (m3 - r3 * m8).powi(2),
            (r6 * m3 + r2 * m8 + 4.0 * m15).powi(2) / 8.0,
            (-r6 * m3 + r2 * m8 + 4.0 * m15).powi(2) / 8.0,
            (m8 - r2 * m15).powi(2),
        ];
        let want: Vec<f64> = [
            g[0], g[0], 0.0, g[1], g[1], g[2], g[2], 0.0, g[3], g[3], g[4], g[4], g[5], g[5], 0.0,
        ]
        .iter()
        .map(|v| 2.5 * v)
        .collect();
        assert_close(&d, &want, 1e-12);
    }
}

#[test]
fn gram_entries_are_squared_gaps() {
    for dim in 3..=6 {
        let angles: Vec<f64> = (0..dim - 2).map(|j| 0.1 + 0.05 * j as f64).collect();
        let p = ModuliPoint::from_angles(dim, &angles).unwrap();
        let spec = p.spectrum().into_values();
        let (_, d) = diagonal_kernel_gram(dim, &angles);
        let mut want = Vec::new();
        for s in 1..dim {
            for j in 0..s {
                let gap = (spec[j] - spec[s]).powi(2);
                want.push(gap);
                want.push(gap);
            }
            want.push(0.0);
        }
        assert_close(&d, &want, 1e-12);
    }
}

#[test]
fn named_family_ranks_are_tolerance_stable() {
    use swkernel::orbits::{classify_stratum, gram_matrix};
    use swkernel::KernelFamily;
    let families = [
        KernelFamily::Qubit,
        KernelFamily::Qutrit(-0.6),
        KernelFamily::Qutrit(-1.0),
        KernelFamily::QutritGolden,
        KernelFamily::QuatritRegular(-0.3, -0.6),
        KernelFamily::Quatrit1_234(0.0),
        KernelFamily::Quatrit12_34(0.3),
        KernelFamily::Quatrit123_4(-0.5),
        KernelFamily::Quatrit1_2_34,
        KernelFamily::Quatrit12_3_4,
        KernelFamily::Quatrit1_23_4,
        KernelFamily::Quatrit1204(-1.0),
        KernelFamily::Quatrit1034(-0.2),
        KernelFamily::Quatrit1004,
    ];
    for f in families {
        let k = f.kernel().unwrap();
        let basis = build_basis(k.dim()).unwrap();
        let u = swkernel::sample_haar_unitary(k.dim(), 11).unwrap();
        let g = gram_matrix(&k.conjugated(&u).unwrap(), &basis).unwrap();
        for tol in [1e-10, 1e-9, 1e-8, 1e-7] {
            let s = classify_stratum(&k, tol).unwrap();
            assert_eq!(g.rank_at(tol), s.orbit_dim, "{f} at tol {tol}");
            let iso: usize = s.blocks.iter().map(|b| b * b).sum::<usize>() - 1;
            assert_eq!(s.orbit_dim, k.dim() * k.dim() - 1 - iso);
        }
    }
}
