use approx_eq::*;
use proptest::prelude::*;
use qsd_core::linalg::consts::{hadamard, ket0_density, pauli_x, pauli_z, plus_density};
use qsd_core::linalg::io::{format_complex, parse_complex, parse_matrix};
use qsd_core::linalg::*;
use qsd_core::random::{random_density, random_unitary, rng};
use qsd_core::{Error, StateVector};

mod approx_eq {
    use qsd_core::ComplexMatrix;

    pub fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    pub fn mat_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.rows() == b.rows() && a.cols() == b.cols() && a.max_abs_diff(b) <= tol
    }
}

fn bell() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::outer(&[c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)])
}

#[test]
fn tensor_examples() {
    let i2 = ComplexMatrix::identity(2);
    assert!(mat_close(
        &tensor(&i2, &i2).unwrap(),
        &ComplexMatrix::identity(4),
        0.0
    ));
    let d = tensor(
        &ComplexMatrix::from_real_diag(&[1.0, 2.0]),
        &ComplexMatrix::from_real_diag(&[3.0, 4.0]),
    )
    .unwrap();
    assert!(mat_close(
        &d,
        &ComplexMatrix::from_real_diag(&[3.0, 4.0, 6.0, 8.0]),
        0.0
    ));
    let xx = tensor(&pauli_x(), &pauli_x()).unwrap();
    let out = xx.matvec(StateVector::basis(2, 0).amplitudes()).unwrap();
    assert_eq!(out, StateVector::basis(2, 3).amplitudes());
}

#[test]
fn tensor_respects_side_limit() {
    let big = ComplexMatrix::identity(64);
    let err = tensor_with_limit(&big, &big, 1024).unwrap_err();
    assert!(matches!(
        err,
        Error::Capacity {
            requested: 4096,
            limit: 1024,
            ..
        }
    ));
    assert!(tensor(&ComplexMatrix::identity(128), &big).is_err());
}

#[test]
fn partial_trace_examples() {
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    assert!(mat_close(
        &partial_trace_qubits(&bell(), &[0]).unwrap(),
        &half,
        1e-15
    ));

    let rho = plus_density();
    let xi = ket0_density();
    let prod = tensor(&rho, &xi).unwrap();
    assert!(mat_close(
        &partial_trace(&prod, &[2, 2], &[0]).unwrap(),
        &rho,
        1e-15
    ));
    assert!(mat_close(
        &partial_trace(&prod, &[2, 2], &[1]).unwrap(),
        &xi,
        1e-15
    ));

    let s010 = StateVector::basis(3, 0b010).density();
    let kept = partial_trace_qubits(&s010, &[0, 2]).unwrap();
    assert!(mat_close(&kept, &StateVector::basis(2, 0).density(), 0.0));
}

#[test]
fn partial_trace_rejects_inconsistent_dims() {
    let rho = ComplexMatrix::identity(4);
    assert!(matches!(
        partial_trace(&rho, &[2, 3], &[0]),
        Err(Error::Argument(_))
    ));
    assert!(matches!(
        partial_trace(&rho, &[2, 2], &[2]),
        Err(Error::Argument(_))
    ));
}

#[test]
fn permute_qubits_moves_basis_states() {
    let s = StateVector::basis(3, 0b110).density();
    // new qubit i = old qubit order[i]
    let p = permute_qubits(&s, &[2, 0, 1]).unwrap();
    assert!(mat_close(&p, &StateVector::basis(3, 0b011).density(), 0.0));
}

#[test]
fn eig_examples() {
    assert_eq!(eigenvalues_hermitian(&pauli_z()).unwrap(), vec![1.0, -1.0]);
    let e = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
    assert_eq!(e.values, vec![1.0; 4]);
    assert!(e.vectors.is_unitary(1e-12));
    let a = ComplexMatrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]);
    let v = eigenvalues_hermitian(&a).unwrap();
    assert!(close(v[0], 3.0, 1e-14) && close(v[1], 1.0, 1e-14));
}

#[test]
fn eig_rejects_non_hermitian() {
    let a = ComplexMatrix::from_real(&[&[0.0, 2.0], &[1.0, 0.0]]);
    assert!(matches!(hermitian_eig(&a), Err(Error::Argument(_))));
}

#[test]
fn sqrt_examples() {
    let r = matrix_sqrt_psd(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
    assert!(mat_close(
        &r,
        &ComplexMatrix::from_real_diag(&[2.0, 3.0]),
        1e-14
    ));
    let i = ComplexMatrix::identity(3);
    assert!(mat_close(&matrix_sqrt_psd(&i).unwrap(), &i, 1e-14));
    let a = ComplexMatrix::from_real(&[&[2.0, 1.0], &[1.0, 2.0]]);
    let r = matrix_sqrt_psd(&a).unwrap();
    let (p, q) = ((3f64.sqrt() + 1.0) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
    assert!(mat_close(
        &r,
        &ComplexMatrix::from_real(&[&[p, q], &[q, p]]),
        1e-13
    ));
    assert!(mat_close(&(&r * &r), &a, 1e-12));
}

#[test]
fn sqrt_rejects_negative() {
    let a = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
    assert!(matches!(matrix_sqrt_psd(&a), Err(Error::Argument(_))));
    // drift inside the clamp is accepted
    assert!(matrix_sqrt_psd(&ComplexMatrix::from_real_diag(&[1.0, -1e-10])).is_ok());
}

#[test]
fn trace_norm_examples() {
    assert!(close(trace_norm(&pauli_x()).unwrap(), 1.0, 1e-15));
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    assert!(close(
        trace_norm(&(&ket0_density() - &half)).unwrap(),
        0.5,
        1e-15
    ));
    let d = trace_norm(&(&ket0_density() - &plus_density())).unwrap();
    assert!(close(d, std::f64::consts::FRAC_1_SQRT_2, 5e-8));
    assert!(close(d, std::f64::consts::FRAC_1_SQRT_2, 1e-14));
}

#[test]
fn trace_norm_non_hermitian() {
    let a = ComplexMatrix::from_real(&[&[0.0, 2.0], &[1.0, 0.0]]);
    assert!(close(trace_norm(&a).unwrap(), 1.5, 1e-14));
    assert!(trace_norm(&ComplexMatrix::zeros(2, 3)).is_err());
}

#[test]
fn fidelity_examples() {
    let rho = plus_density();
    assert!(close(fidelity(&rho, &rho).unwrap(), 1.0, 1e-12));
    let one = StateVector::basis(1, 1).density();
    assert!(close(fidelity(&ket0_density(), &one).unwrap(), 0.0, 1e-12));
    let f = fidelity(&ket0_density(), &plus_density()).unwrap();
    assert!(close(f, std::f64::consts::FRAC_1_SQRT_2, 5e-8));
    assert!(matches!(
        fidelity(&pauli_x(), &rho),
        Err(Error::Argument(_))
    ));
}

#[test]
fn svd_examples() {
    let s = svd(&ComplexMatrix::from_real_diag(&[3.0, 2.0])).unwrap();
    assert_eq!(s.s, vec![3.0, 2.0]);
    let z = svd(&ComplexMatrix::zeros(3, 3)).unwrap();
    assert!(z.s.iter().all(|&x| x == 0.0));
    assert!(z.u.is_unitary(1e-12) && z.v.is_unitary(1e-12));
    let a = ComplexMatrix::from_real(&[&[0.0, 2.0], &[1.0, 0.0]]);
    let s = svd(&a).unwrap();
    assert!(close(s.s[0], 2.0, 1e-14) && close(s.s[1], 1.0, 1e-14));
    assert!(mat_close(&s.reconstruct(), &a, 1e-12));
}

#[test]
fn svd_rectangular_and_rank_deficient() {
    let mut r = rng(5);
    let u = random_unitary(4, &mut r);
    let mut a = ComplexMatrix::zeros(4, 2);
    for i in 0..4 {
        a[(i, 0)] = u[(i, 0)] * 2.0;
        a[(i, 1)] = u[(i, 0)] * c64(0.0, 1.0);
    }
    let s = svd(&a).unwrap();
    assert_eq!(s.s.len(), 2);
    assert!(s.s[1].abs() < 1e-7);
    assert!(s.u.is_unitary(1e-10) && s.v.is_unitary(1e-10));
    assert!(mat_close(&s.reconstruct(), &a, 1e-7));
}

#[test]
fn positive_projection_attains_trace_norm() {
    let mut r = rng(11);
    for _ in 0..50 {
        let a = random_density(4, &mut r);
        let b = random_density(4, &mut r);
        let x = &a - &b;
        let (pi, value) = positive_part_projection(&x).unwrap();
        assert!(mat_close(&(&pi * &pi), &pi, 1e-10));
        let attained = (&pi * &x).trace().re;
        assert!(close(attained, value, 1e-10));
        assert!(close(value, trace_norm(&x).unwrap(), 1e-10));
    }
}

#[test]
fn complex_literals_round_trip() {
    for s in [
        "1",
        "-2.5",
        "3j",
        "-j",
        "1+j",
        "1/2-3/4j",
        "1e-3+2E+2j",
        "0.5-0.25j",
    ] {
        assert!(parse_complex(s).is_some(), "{s}");
    }
    assert_eq!(parse_complex("1/2-3/4j"), Some(c64(0.5, -0.75)));
    assert_eq!(parse_complex("-j"), Some(c64(0.0, -1.0)));
    assert_eq!(parse_complex("1e-3+2E+2j"), Some(c64(1e-3, 200.0)));
    assert!(parse_complex("1/0").is_none());
    assert!(parse_complex("abc").is_none());
    let z = c64(0.1 + 0.2, -1.0 / 3.0);
    assert_eq!(parse_complex(&format_complex(z)), Some(z));
}

#[test]
fn matrix_file_parsing() {
    let m = parse_matrix("# comment\nmatrix 2 2\n1 -2 # diag\n0 1/3j\n").unwrap();
    assert_eq!(m[(0, 1)], c64(-2.0, 0.0));
    assert_eq!(m[(1, 1)], c64(0.0, 1.0 / 3.0));
    let err = parse_matrix("matrix 2 2\n1 2 x 4\n").unwrap_err();
    assert!(
        matches!(
            err,
            Error::Parse {
                line: 2,
                column: 5,
                ..
            }
        ),
        "{err:?}"
    );
    assert!(parse_matrix("matrix 2 2\n1 2 3\n").is_err());
}

#[test]
fn reconstruction_residual_on_hadamard_conjugates() {
    let h = hadamard();
    let a = ComplexMatrix::from_real_diag(&[0.3, -0.7])
        .conjugate_by(&h)
        .unwrap();
    let e = hermitian_eig(&a).unwrap();
    let back = {
        let d = ComplexMatrix::from_real_diag(&e.values);
        d.conjugate_by(&e.vectors).unwrap()
    };
    assert!(mat_close(&back, &a, 1e-7));
}

#[test]
fn both_eigen_routes_agree() {
    let mut r = rng(21);
    for &n in &[1usize, 2, 5, 33, 70] {
        let x = &random_density(n, &mut r) - &random_density(n, &mut r);
        let j = hermitian_eig_with(&x, EigMethod::Jacobi).unwrap();
        let t = hermitian_eig_with(&x, EigMethod::Tridiagonal).unwrap();
        for (a, b) in j.values.iter().zip(&t.values) {
            assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
        }
        assert!(t.vectors.is_unitary(1e-10));
        let back = ComplexMatrix::from_real_diag(&t.values)
            .conjugate_by(&t.vectors)
            .unwrap();
        assert!(back.max_abs_diff(&x) < 1e-10, "n={n}");
    }
}

#[test]
fn tridiagonal_route_handles_degenerate_spectra() {
    // rank-deficient projector with a 60-fold zero eigenvalue
    let mut r = rng(8);
    let u = random_unitary(64, &mut r);
    let mut d = vec![0.0; 64];
    d[..4].copy_from_slice(&[0.25; 4]);
    let rho = ComplexMatrix::from_real_diag(&d).conjugate_by(&u).unwrap();
    let e = hermitian_eig_with(&rho, EigMethod::Tridiagonal).unwrap();
    assert!(e.values[..4].iter().all(|v| (v - 0.25).abs() < 1e-13));
    assert!(e.values[4..].iter().all(|v| v.abs() < 1e-13));
    assert!(
        ComplexMatrix::from_real_diag(&e.values)
            .conjugate_by(&e.vectors)
            .unwrap()
            .max_abs_diff(&rho)
            < 1e-12
    );
    let diag = ComplexMatrix::from_real_diag(&[3.0, -1.0, 2.0]);
    assert_eq!(
        eigenvalues_hermitian_with(&diag, EigMethod::Tridiagonal).unwrap(),
        vec![3.0, 2.0, -1.0]
    );
}

#[test]
fn tridiagonal_route_survives_tiny_entries() {
    // column entries whose squares underflow: the reflector norm must be scaled
    let mut a =
        ComplexMatrix::from_real_diag(&(0..40).map(|i| i as f64 / 40.0).collect::<Vec<_>>());
    for (i, j, z) in [
        (1, 0, c64(0.0, 1e-170)),
        (2, 0, c64(1e-170, 0.0)),
        (5, 3, c64(3e-200, -4e-200)),
        (7, 6, c64(0.0, 1e-310)),
    ] {
        a[(i, j)] = z;
        a[(j, i)] = z.conj();
    }
    let e = hermitian_eig_with(&a, EigMethod::Tridiagonal).unwrap();
    assert!(e.values.iter().all(|v| v.is_finite()));
    let back = ComplexMatrix::from_real_diag(&e.values)
        .conjugate_by(&e.vectors)
        .unwrap();
    assert!(back.max_abs_diff(&a) < 1e-14);
}

fn density_strategy(max_qubits: u32) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_qubits, any::<u64>()).prop_map(|(q, seed)| random_density(1 << q, &mut rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_residual_and_unitarity(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let a = random_density(n, &mut r);
        let x = &a - &random_density(n, &mut r);
        let e = hermitian_eig(&x).unwrap();
        prop_assert!(e.vectors.is_unitary(1e-8));
        for (i, &lam) in e.values.iter().enumerate() {
            let v = e.vectors.column(i);
            let av = x.matvec(&v).unwrap();
            let res = av.iter().zip(&v).map(|(p, q)| (p - q * lam).norm()).fold(0.0, f64::max);
            prop_assert!(res <= 1e-8);
        }
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn partial_trace_preserves_trace(rho in density_strategy(3), keep_mask in 0u8..8) {
        let n = rho.rows().trailing_zeros() as usize;
        let keep: Vec<usize> = (0..n).filter(|q| keep_mask >> q & 1 == 1).collect();
        let red = partial_trace_qubits(&rho, &keep).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(red.is_density(1e-9));
    }

    #[test]
    fn sqrt_squares_back(rho in density_strategy(3)) {
        let r = matrix_sqrt_psd(&rho).unwrap();
        prop_assert!((&r * &r).max_abs_diff(&rho) <= 1e-7);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..=6, n in 1usize..=6) {
        let mut r = rng(seed);
        let u = random_unitary(m.max(n), &mut r);
        let mut a = ComplexMatrix::zeros(m, n);
        for i in 0..m { for j in 0..n { a[(i, j)] = u[(i, j)] * (1.0 + j as f64); } }
        let s = svd(&a).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&a) <= 1e-7);
        prop_assert!(s.u.is_unitary(1e-8) && s.v.is_unitary(1e-8));
    }

    #[test]
    fn fidelity_symmetric_and_bounded(a in density_strategy(2), seed in any::<u64>()) {
        let b = random_density(a.rows(), &mut rng(seed));
        let f = fidelity(&a, &b).unwrap();
        let g = fidelity(&b, &a).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&f));
        prop_assert!((f - g).abs() <= 1e-8);
    }
}
