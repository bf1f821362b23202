use proptest::prelude::*;
use qsd_core::circuit::{parse_circuit, Circuit, Gate};
use qsd_core::linalg::{c64, partial_trace_qubits, ComplexMatrix};
use qsd_core::random::{random_circuit, random_unitary, rng};
use qsd_core::states::*;
use qsd_core::{Capacity, Error, StateVector};

fn cap() -> Capacity {
    Capacity::default()
}

fn qc(text: &str) -> Circuit {
    parse_circuit(text).unwrap()
}

#[test]
fn prepare_mixed_examples() {
    let plus = prepare_mixed(&qc("qubits 1\noutputs 0\nh 0"), &cap()).unwrap();
    assert!(plus.max_abs_diff(&ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]])) < 1e-15);
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let bell = prepare_mixed(&qc("qubits 2\noutputs 0\nh 0\ncx 0 1"), &cap()).unwrap();
    assert!(bell.max_abs_diff(&half) < 1e-15);
    let third = prepare_mixed(&qc("qubits 2\noutputs 1\nh 0\ncx 0 1\nh 0"), &cap()).unwrap();
    assert!(third.max_abs_diff(&half) < 1e-15);
}

#[test]
fn output_order_is_respected() {
    let c = qc("qubits 2\noutputs 1 0\nx 0");
    let rho = prepare_mixed(&c, &cap()).unwrap();
    assert!(rho.max_abs_diff(&StateVector::basis(2, 0b01).density()) < 1e-15);
}

#[test]
fn prepare_pure_examples() {
    assert_eq!(
        prepare_pure(&Circuit::identity(2).unwrap(), &cap()).unwrap(),
        StateVector::zero(2)
    );
    assert_eq!(
        prepare_pure(&qc("qubits 1\noutputs 0\nx 0"), &cap()).unwrap(),
        StateVector::basis(1, 1)
    );
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let b = prepare_pure(&qc("qubits 2\noutputs 0\nh 0\ncx 0 1"), &cap()).unwrap();
    let want = [c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)];
    assert!(b
        .amplitudes()
        .iter()
        .zip(&want)
        .all(|(x, y)| (x - y).norm() < 1e-15));
}

#[test]
fn capacity_is_enforced() {
    let c = Circuit::identity(5).unwrap();
    let err = prepare_mixed(&c, &Capacity::with_max_qubits(4)).unwrap_err();
    assert!(matches!(
        err,
        Error::Capacity {
            requested: 5,
            limit: 4,
            ..
        }
    ));
}

#[test]
fn decide_examples() {
    let h = qc("qubits 1\noutputs 0\nh 0");
    let id = Circuit::identity(1).unwrap();
    let x = qc("qubits 1\noutputs 0\nx 0");
    let d = decide_qsd(
        &QsdInstance::new(h.clone(), h.clone(), 0.1, 0.9).unwrap(),
        &cap(),
    )
    .unwrap();
    assert!(matches!(d, QsdDecision::No(v) if v.abs() < 1e-12));
    let d = decide_qsd(&QsdInstance::new(id.clone(), x, 0.1, 0.9).unwrap(), &cap()).unwrap();
    assert!(matches!(d, QsdDecision::Yes(v) if (v - 1.0).abs() < 1e-12));
    let d = decide_qsd(&QsdInstance::new(id, h, 0.1, 0.9).unwrap(), &cap()).unwrap();
    assert!(
        matches!(d, QsdDecision::PromiseViolated(v) if (v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4)
    );
}

#[test]
fn instance_validation() {
    let a = Circuit::identity(1).unwrap();
    let b = Circuit::identity(2).unwrap();
    assert!(QsdInstance::new(a.clone(), b, 0.1, 0.9).is_err());
    assert!(QsdInstance::new(a.clone(), a.clone(), 0.9, 0.1).is_err());
    assert!(QsdInstance::new(a.clone(), a.clone(), -0.1, 0.5).is_err());
    assert!(QsdInstance::new(a.clone(), a.clone(), 0.0, 1.0).is_ok());
    assert!(QsdInstance::new(a.clone(), a, 0.2, 1.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn purification_is_consistent(seed in any::<u64>(), w in 1usize..=5) {
        let c = random_circuit(w, 8, &mut rng(seed));
        let pure = prepare_pure(&c, &cap()).unwrap();
        let full = pure.density();
        let reduced = partial_trace_qubits(&full, c.outputs()).unwrap();
        // partial_trace keeps ascending order; compare on sorted outputs
        let mut sorted = c.outputs().to_vec();
        sorted.sort();
        let c_sorted = c.clone().with_outputs(sorted).unwrap();
        let mixed = prepare_mixed(&c_sorted, &cap()).unwrap();
        prop_assert!(reduced.max_abs_diff(&mixed) <= 1e-8);
        prop_assert!((prepare_mixed(&c, &cap()).unwrap().trace().re - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn gates_on_discarded_qubits_do_not_matter(seed in any::<u64>(), w in 2usize..=5) {
        let mut r = rng(seed);
        let c = random_circuit(w, 8, &mut r);
        let env = c.non_outputs();
        prop_assume!(!env.is_empty());
        let mut d = c.clone();
        let arity = env.len().min(2);
        d.push(Gate::new(random_unitary(1 << arity, &mut r), env[..arity].to_vec()).unwrap()).unwrap();
        let a = prepare_mixed(&c, &cap()).unwrap();
        let b = prepare_mixed(&d, &cap()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-8);
    }
}
