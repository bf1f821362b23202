use proptest::prelude::*;
use qsd_core::circuit::{Circuit, Gate};
use qsd_core::linalg::{partial_trace, trace_distance, ComplexMatrix, StateVector, C64};
use qsd_core::polarize::PolarizationParams;
use qsd_core::protocols::{run_closeness_test, ProverStrategy};
use qsd_core::random::{random_unitary, random_unitary_circuit, rng};
use qsd_core::reduction::*;
use qsd_core::states::{prepare_mixed, QsdInstance};
use qsd_core::{Capacity, Error};

fn cap() -> Capacity {
    Capacity::default()
}

fn fixture(name: &str) -> (ProofSystemSpec, SimulatorSpec) {
    let path = format!("{}/fixtures/{name}.qps", env!("CARGO_MANIFEST_DIR"));
    parse_qps(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Two-message system with one verifier output qubit (0), an accept bit (1)
/// and one message qubit (2): the verifier runs `r0` on (0, 2), sends qubit
/// 2, then runs `r1†` and accepts if qubits 0 and 2 both read 0.
fn closeness_system(r0: &Circuit, r1: &Circuit) -> ProofSystemSpec {
    let v1 = r0
        .relabel(&[0, 2], 3)
        .unwrap()
        .with_outputs(vec![0, 1, 2])
        .unwrap();
    let mut v2 = r1
        .adjoint()
        .relabel(&[0, 2], 3)
        .unwrap()
        .with_outputs(vec![0, 1, 2])
        .unwrap();
    // accept bit := (qubit 0 = 0) and (message = 0)
    let mut toffoli = ComplexMatrix::identity(8);
    toffoli[(6, 6)] = C64::new(0.0, 0.0);
    toffoli[(7, 7)] = C64::new(0.0, 0.0);
    toffoli[(6, 7)] = C64::new(1.0, 0.0);
    toffoli[(7, 6)] = C64::new(1.0, 0.0);
    for q in [0, 2] {
        v2.push(Gate::preset("x", &[q]).unwrap()).unwrap();
    }
    v2.push(Gate::new(toffoli, vec![0, 2, 1]).unwrap()).unwrap();
    for q in [0, 2] {
        v2.push(Gate::preset("x", &[q]).unwrap()).unwrap();
    }
    ProofSystemSpec::new(
        2,
        1,
        1,
        2,
        1,
        vec![v1, v2],
        vec![Circuit::identity(2).unwrap()],
    )
    .unwrap()
}

fn qc2(text: &str) -> Circuit {
    qsd_core::circuit::parse_circuit(&format!("qubits 2\noutputs 0\n{text}")).unwrap()
}

#[test]
fn fixtures_parse_and_round_trip() {
    for name in ["bell_handshake", "bell_handshake_reject"] {
        let (ps, sim) = fixture(name);
        assert_eq!(
            (ps.qv, ps.qm, ps.qp, ps.messages, ps.outbit, ps.k()),
            (3, 1, 1, 2, 2, 2)
        );
        let text = to_qps(&ps, &sim);
        assert_eq!(parse_qps(&text).unwrap(), (ps, sim));
    }
    let (_, sim) = fixture("bell_handshake");
    assert!(matches!(sim, SimulatorSpec::Circuits(ref m) if m.len() == 2));
    let (_, sim) = fixture("bell_handshake_reject");
    assert_eq!(sim, SimulatorSpec::Honest);
}

#[test]
fn qps_errors() {
    let base = "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nverifier 1\nend\nverifier 2\nend\n";
    assert!(parse_qps(base).is_ok());
    let cases = [
        ("qv 1\nqm 1\nqp 0\nmessages 3\noutbit 0\n", "even"),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 1\nverifier 1\nend\nverifier 2\nend\n",
            "outbit",
        ),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nverifier 1\nend\n",
            "missing verifier block 2",
        ),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nverifier 1\nh 0\n",
            "missing `end`",
        ),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nbogus 3\n",
            "unknown keyword",
        ),
        ("qv 1\nqv 1\n", "given twice"),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nverifier 1\nend\nverifier 1\nend\n",
            "duplicate",
        ),
        (
            "qv 1\nqm 1\nqp 0\nmessages 2\noutbit 0\nverifier 3\nend\n",
            "outside",
        ),
        ("qv 1\nqm 1\nmessages 2\noutbit 0\n", "missing `qp`"),
        ("end\n", "outside a block"),
    ];
    for (text, want) in cases {
        let err = parse_qps(text).unwrap_err().to_string();
        assert!(err.contains(want), "{text:?}: {err}");
    }
    // gate errors keep their line numbers
    let bad = base.replace("verifier 2\nend", "verifier 2\ncx 0 5\nend");
    match parse_qps(&bad).unwrap_err() {
        Error::Parse { line, .. } => assert_eq!(line, 9),
        e => panic!("{e:?}"),
    }
    let sim = format!("{base}simulator 2\nqubits 3\noutputs 0\nend\n");
    assert!(parse_qps(&sim).unwrap_err().to_string().contains("outputs"));
    let sim = format!("{base}simulator 2\nqubits 3\noutputs 2 0\nh 1\nend\n");
    assert!(parse_qps(&sim).is_ok());
}

#[test]
fn views() {
    let (ps, _) = fixture("bell_handshake");
    let zero = StateVector::zero(4).density();
    assert!(compute_view(&ps, 0, &cap()).unwrap().max_abs_diff(&zero) < 1e-15);
    // Bell pair on qubits 0 and 3, coin qubit 1 set: |0100> + |1101>
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    amps[0b0100] = C64::new(s, 0.0);
    amps[0b1101] = C64::new(s, 0.0);
    let bell = StateVector::new(amps).unwrap().density();
    for j in 1..=2 {
        assert!(compute_view(&ps, j, &cap()).unwrap().max_abs_diff(&bell) < 1e-12);
    }
    assert!(compute_view(&ps, 3, &cap()).is_err());

    let trivial = parse_qps("qv 2\nqm 1\nqp 1\nmessages 4\noutbit 0\nverifier 1\nend\nverifier 2\nend\nverifier 3\nend\n").unwrap().0;
    let zero = StateVector::zero(3).density();
    for j in 0..=4 {
        assert!(
            compute_view(&trivial, j, &cap())
                .unwrap()
                .max_abs_diff(&zero)
                < 1e-15
        );
    }
}

#[test]
fn fixture_acceptance_and_optimum() {
    let (yes, _) = fixture("bell_handshake");
    assert!((yes.acceptance_probability(&cap()).unwrap() - 1.0).abs() < 1e-12);
    assert!((max_accept_exact(&yes, &cap()).unwrap() - 1.0).abs() < 1e-9);
    let (no, _) = fixture("bell_handshake_reject");
    assert!((no.acceptance_probability(&cap()).unwrap() - 0.01).abs() < 1e-12);
    let m = max_accept_certified(&no, &cap()).unwrap();
    assert!((m.value - 0.01).abs() < 1e-9, "{m:?}");
    assert!(m.gap() <= MAX_ACCEPT_GAP);
}

#[test]
fn max_accept_examples() {
    let bell = qc2("h 0\ncx 0 1");
    let m = max_accept_exact(&closeness_system(&bell, &bell), &cap()).unwrap();
    assert!((m - 1.0).abs() < 1e-9);
    let m = max_accept_exact(&closeness_system(&qc2(""), &qc2("x 0")), &cap()).unwrap();
    assert!(m.abs() < 1e-8);
    let m = max_accept_exact(&closeness_system(&qc2(""), &qc2("h 0")), &cap()).unwrap();
    assert!((m - 0.5).abs() < 1e-9);
    // same reduced state, different purifications: the idle prover always
    // fails, the optimal one applies Z to the message
    let twisted = closeness_system(&bell, &qc2("h 0\ncx 0 1\nz 1"));
    assert!(twisted.acceptance_probability(&cap()).unwrap() < 1e-12);
    assert!((max_accept_exact(&twisted, &cap()).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn max_accept_needs_two_messages() {
    let four = parse_qps("qv 1\nqm 1\nqp 0\nmessages 4\noutbit 0\nverifier 1\nend\nverifier 2\nend\nverifier 3\nend\n").unwrap().0;
    assert!(matches!(
        max_accept_exact(&four, &cap()),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn max_accept_matches_closeness_optimum() {
    let mut g = rng(5);
    for _ in 0..20 {
        let r0 = random_unitary_circuit(2, 5, &mut g)
            .with_outputs(vec![0])
            .unwrap();
        let r1 = random_unitary_circuit(2, 5, &mut g)
            .with_outputs(vec![0])
            .unwrap();
        let m = max_accept_exact(&closeness_system(&r0, &r1), &cap()).unwrap();
        let inst = QsdInstance::new(r0, r1, 0.1, 0.9).unwrap();
        let p = PolarizationParams::with_override(1, 1, 1).unwrap();
        let t = run_closeness_test(&inst, &ProverStrategy::HonestOptimal, &p, &cap()).unwrap();
        assert!((m - t.optimum).abs() < 1e-7, "{m} vs {}", t.optimum);
    }
}

#[test]
fn random_provers_never_beat_the_optimum() {
    let mut g = rng(17);
    for _ in 0..40 {
        let v1 = random_unitary_circuit(3, 6, &mut g);
        let v2 = random_unitary_circuit(3, 6, &mut g);
        let idle = Circuit::identity(3).unwrap();
        let ps =
            ProofSystemSpec::new(2, 1, 2, 2, 0, vec![v1.clone(), v2.clone()], vec![idle]).unwrap();
        let m = max_accept_certified(&ps, &cap()).unwrap();
        assert!(m.gap() <= MAX_ACCEPT_GAP, "{m:?}");
        for _ in 0..10 {
            let p = random_unitary_circuit(3, 8, &mut g);
            let cheat =
                ProofSystemSpec::new(2, 1, 2, 2, 0, vec![v1.clone(), v2.clone()], vec![p]).unwrap();
            let a = cheat.acceptance_probability(&cap()).unwrap();
            assert!(a <= m.upper_bound + 1e-8, "{a} > {m:?}");
        }
    }
}

#[test]
fn build_qsd_on_accepting_fixture() {
    let (ps, sim) = fixture("bell_handshake");
    let (q0, q1) = build_qsd(&ps, &sim, &cap()).unwrap();
    assert_eq!((q0.num_outputs(), q1.num_outputs()), (3, 3));
    let g0 = prepare_mixed(&q0, &cap()).unwrap();
    let g1 = prepare_mixed(&q1, &cap()).unwrap();
    let gap = trace_distance(&g0, &g1).unwrap();
    // zero-error system with a perfect simulator: only rounding remains
    assert!(gap < 1e-12, "{gap}");
    // the explicit simulator blocks agree with the honest interaction
    let (h0, _) = build_qsd(&ps, &SimulatorSpec::Honest, &cap()).unwrap();
    assert!(prepare_mixed(&h0, &cap()).unwrap().max_abs_diff(&g0) < 1e-12);
    // single factor: tr_M of the supplied state
    let rhos = reduction_states(&ps, &sim, &cap()).unwrap();
    assert_eq!(rhos.len(), 1);
    let reduced = partial_trace(&rhos[0], &[8, 2], &[0]).unwrap();
    assert!(reduced.max_abs_diff(&g0) < 1e-12);
    let c = check_complete1(&ps, &rhos, 1.0).unwrap();
    assert!(c.lhs < 1e-12 && c.rhs == 0.0 && c.holds);
}

#[test]
fn complete1_on_rejecting_fixture() {
    let (ps, sim) = fixture("bell_handshake_reject");
    let eps = max_accept_exact(&ps, &cap()).unwrap();
    let rhos = reduction_states(&ps, &sim, &cap()).unwrap();
    let c = check_complete1(&ps, &rhos, eps).unwrap();
    assert!((c.rhs - 0.27).abs() < 1e-9, "{}", c.rhs);
    // regression value, reproduced with an independent dense simulation
    assert!((c.lhs - 0.999900980391205).abs() < 1e-12, "{}", c.lhs);
    assert!(c.holds);
    // the circuits prepare the same pair
    let (q0, q1) = build_qsd(&ps, &sim, &cap()).unwrap();
    let gap = trace_distance(
        &prepare_mixed(&q0, &cap()).unwrap(),
        &prepare_mixed(&q1, &cap()).unwrap(),
    )
    .unwrap();
    assert!((gap - c.lhs).abs() < 1e-12);
}

#[test]
fn complete1_extremes_and_errors() {
    let (ps, _) = fixture("bell_handshake");
    // a state V_2 maps to |a=0 c=0 o=1 m=0>: accepted, and its verifier
    // marginal has o = 1 while the first message leaves o = 0
    let u2 = ps.verifiers[1].unitary().unwrap();
    let target = StateVector::basis(4, 0b0010).density();
    let rho = target.conjugate_by(&u2.adjoint()).unwrap();
    let c = check_complete1(&ps, &[rho], 0.0).unwrap();
    assert!((c.rhs - 1.0 / 3.0).abs() < 1e-15);
    assert!((c.lhs - 1.0).abs() < 1e-12 && c.holds);

    // the first message itself is accepted only with probability 0.01
    let (no, _) = fixture("bell_handshake_reject");
    let xi = compute_view(&no, 1, &cap()).unwrap();
    assert!(matches!(
        check_complete1(&no, std::slice::from_ref(&xi), 0.01),
        Err(Error::Precondition(_))
    ));
    assert!(check_complete1(&no, std::slice::from_ref(&xi), 1.5).is_err());
    assert!(check_complete1(&no, &[xi.clone(), xi], 0.01).is_err());
}

#[test]
fn build_qsd_needs_simulator_for_every_even_message() {
    let (ps, _) = fixture("bell_handshake");
    let mut only_one = std::collections::BTreeMap::new();
    only_one.insert(1, Circuit::identity(4).unwrap());
    assert!(build_qsd(&ps, &SimulatorSpec::Circuits(only_one), &cap()).is_err());
}

/// Random two-message system whose honest run accepts with certainty: V_2
/// rotates the support of the final view into the accepting subspace.
fn zero_error_system(seed: u64) -> ProofSystemSpec {
    let mut g = rng(seed);
    let v1 = random_unitary_circuit(3, 6, &mut g);
    let p1 = random_unitary_circuit(2, 4, &mut g);
    let idle_v2 = Circuit::identity(3).unwrap();
    let draft =
        ProofSystemSpec::new(2, 1, 1, 2, 0, vec![v1.clone(), idle_v2], vec![p1.clone()]).unwrap();
    let view = compute_view(&draft, 2, &cap()).unwrap();
    let eig = qsd_core::linalg::hermitian_eig(&view).unwrap();
    // support has rank <= 2 (the prover holds one qubit); send it to o = 1
    let support: Vec<Vec<C64>> = (0..8)
        .filter(|&i| eig.values[i] > 1e-12)
        .map(|i| eig.vectors.column(i))
        .collect();
    assert!(support.len() <= 4);
    let mut cols = support.clone();
    let rest = random_unitary(8, &mut g);
    for j in 0..8 {
        if cols.len() == 8 {
            break;
        }
        let mut v = rest.column(j);
        for b in &cols {
            let p: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(y, x)| *y -= p * x);
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let basis = ComplexMatrix::from_columns(&cols).unwrap();
    // accept basis first: indices with qubit 0 set
    let order = [4, 5, 6, 7, 0, 1, 2, 3];
    let mut perm = ComplexMatrix::zeros(8, 8);
    for (j, &i) in order.iter().enumerate() {
        perm[(i, j)] = C64::new(1.0, 0.0);
    }
    let v2m = &perm * &basis.adjoint();
    let v2 = Circuit::identity(3)
        .unwrap()
        .with_gate(Gate::new(v2m, vec![0, 1, 2]).unwrap())
        .unwrap();
    ProofSystemSpec::new(2, 1, 1, 2, 0, vec![v1, v2], vec![p1]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_error_systems_give_close_pairs(seed in any::<u64>()) {
        let ps = zero_error_system(seed);
        prop_assert!((ps.acceptance_probability(&cap()).unwrap() - 1.0).abs() < 1e-9);
        let (q0, q1) = build_qsd(&ps, &SimulatorSpec::Honest, &cap()).unwrap();
        let gap = trace_distance(&prepare_mixed(&q0, &cap()).unwrap(), &prepare_mixed(&q1, &cap()).unwrap()).unwrap();
        prop_assert!(gap < 1e-7, "{}", gap);
    }

    #[test]
    fn complete1_holds_on_random_systems(seed in any::<u64>()) {
        let mut g = rng(seed);
        let v1 = random_unitary_circuit(3, 6, &mut g);
        let v2 = random_unitary_circuit(3, 6, &mut g);
        let p1 = random_unitary_circuit(2, 4, &mut g);
        let ps = ProofSystemSpec::new(2, 1, 1, 2, 1, vec![v1, v2], vec![p1]).unwrap();
        let eps = max_accept_exact(&ps, &cap()).unwrap();
        let rhos = reduction_states(&ps, &SimulatorSpec::Honest, &cap()).unwrap();
        let c = check_complete1(&ps, &rhos, eps).unwrap();
        prop_assert!(c.holds, "{:?} eps {}", c, eps);
    }
}
