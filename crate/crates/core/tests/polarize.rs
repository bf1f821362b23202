use proptest::prelude::*;
use qsd_core::circuit::{parse_circuit, Circuit};
use qsd_core::linalg::consts::{ket0_density, plus_density};
use qsd_core::linalg::{tensor_all, trace_distance, ComplexMatrix};
use qsd_core::polarize::*;
use qsd_core::random::{random_circuit, random_density, rng};
use qsd_core::states::prepare_mixed;
use qsd_core::{Capacity, Error};

fn cap() -> Capacity {
    Capacity::default()
}

fn qc(text: &str) -> Circuit {
    parse_circuit(text).unwrap()
}

fn id1() -> Circuit {
    Circuit::identity(1).unwrap()
}

fn dist(c0: &Circuit, c1: &Circuit) -> f64 {
    trace_distance(
        &prepare_mixed(c0, &cap()).unwrap(),
        &prepare_mixed(c1, &cap()).unwrap(),
    )
    .unwrap()
}

#[test]
fn derived_params() {
    let p = PolarizationParams::derive(0.1, 0.9, 2).unwrap();
    assert_eq!((p.r, p.s, p.n), (2, 50, 2));
    assert!(!p.s_capped);
    let err = PolarizationParams::derive(0.5, 0.6, 1).unwrap_err();
    assert!(err.to_string().contains("alpha >= beta^2"), "{err}");
    let z = PolarizationParams::derive(0.0, 0.5, 3).unwrap();
    assert_eq!((z.r, z.s), (1, DEFAULT_S_MAX));
    assert!(z.s_capped);
    // tiny s is clamped to one copy
    let p = PolarizationParams::derive(0.6, 1.0, 1).unwrap();
    assert!(p.s >= 1);
    assert!(PolarizationParams::with_override(0, 1, 1).is_err());
}

#[test]
fn header_round_trip() {
    for p in [
        PolarizationParams::derive(0.1, 0.9, 2).unwrap(),
        PolarizationParams::with_override(2, 3, 1).unwrap(),
        PolarizationParams::derive(0.0, 0.5, 1).unwrap(),
    ] {
        let text = format!("{}\nqubits 1\noutputs 0\n", p.to_header());
        assert_eq!(PolarizationParams::from_header(&text).unwrap(), Some(p));
        // header lines are comments to the circuit parser
        assert!(parse_circuit(&text).is_ok());
    }
    assert_eq!(PolarizationParams::from_header("qubits 1").unwrap(), None);
    assert!(PolarizationParams::from_header("# polarization-params n=1 r=0 s=1").is_err());
}

#[test]
fn xor_examples() {
    let h = qc("qubits 1\noutputs 0\nh 0");
    let (a, b) = xor_transform(&id1(), &h, 1).unwrap();
    assert!(
        prepare_mixed(&a, &cap())
            .unwrap()
            .max_abs_diff(&ket0_density())
            < 1e-15
    );
    assert!(
        prepare_mixed(&b, &cap())
            .unwrap()
            .max_abs_diff(&plus_density())
            < 1e-15
    );

    let x = qc("qubits 1\noutputs 0\nx 0");
    let (a, b) = xor_transform(&id1(), &x, 2).unwrap();
    assert!((dist(&a, &b) - 1.0).abs() < 1e-12);

    let (a, b) = xor_transform(&id1(), &h, 2).unwrap();
    assert_eq!(a.width(), 4);
    assert_eq!(a.num_outputs(), 2);
    assert!((dist(&a, &b) - 0.5).abs() < 1e-12);
}

#[test]
fn xor_layout_handles_scattered_outputs() {
    // outputs not at the front and different widths
    let q0 = qc("qubits 3\noutputs 2\nh 0\ncx 0 2");
    let q1 = qc("qubits 2\noutputs 1\nh 1");
    let (c0, c1) = common_layout(&q0, &q1).unwrap();
    assert_eq!(c0.outputs(), &[0]);
    assert_eq!(c1.width(), 3);
    let d = dist(&q0, &q1);
    let (a, b) = xor_transform(&q0, &q1, 2).unwrap();
    assert!((dist(&a, &b) - d * d).abs() < 1e-10);
}

#[test]
fn xor_rejects_mismatched_outputs() {
    let two = Circuit::identity(2).unwrap();
    assert!(matches!(
        xor_transform(&id1(), &two, 2),
        Err(Error::Argument(_))
    ));
}

#[test]
fn amplify_examples() {
    let h = qc("qubits 1\noutputs 0\nh 0");
    let (a, b) = amplify_transform(&id1(), &h, 1).unwrap();
    assert_eq!((a, b), (id1(), h.clone()));

    let x = qc("qubits 1\noutputs 0\nx 0");
    let (a, b) = amplify_transform(&id1(), &x, 3).unwrap();
    assert!((dist(&a, &b) - 1.0).abs() < 1e-12);

    // |0> vs |+> squared: overlap 1/2, distance sqrt(1 - 1/4)
    let (a, b) = amplify_transform(&id1(), &h, 2).unwrap();
    let d = dist(&a, &b);
    assert!((d - 0.8660254037844386).abs() < 1e-12, "{d}");
    let (s0, s1) = amplify_states(&ket0_density(), &plus_density(), 2).unwrap();
    assert!((trace_distance(&s0, &s1).unwrap() - d).abs() < 1e-12);
}

#[test]
fn polarize_examples() {
    let h = qc("qubits 1\noutputs 0\nh 0");
    let x = qc("qubits 1\noutputs 0\nx 0");
    let trivial = PolarizationParams::with_override(1, 1, 1).unwrap();
    let (a, b) = polarize(&id1(), &h, &trivial, &cap()).unwrap();
    assert!((dist(&a, &b) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

    let p = PolarizationParams::with_override(2, 2, 2).unwrap();
    let (a, b) = polarize(&id1(), &x, &p, &cap()).unwrap();
    assert_eq!(a.width(), p.emitted_width(1));
    let (r0, r1) =
        polarize_states(&ket0_density(), &prepare_mixed(&x, &cap()).unwrap(), &p).unwrap();
    assert!((trace_distance(&r0, &r1).unwrap() - 1.0).abs() < 1e-12);
    // 2 + 2*(2*(2 + 2)) = 18 qubits: too wide to simulate by default
    assert_eq!(a.width(), 18);
    assert!(matches!(
        prepare_mixed(&a, &cap()),
        Err(Error::Capacity { .. })
    ));
    let _ = b;

    let q = PolarizationParams::with_override(2, 1, 1).unwrap();
    let (a, b) = polarize(&id1(), &h, &q, &cap()).unwrap();
    assert!((dist(&a, &b) - 0.5).abs() < 1e-12);
}

#[test]
fn polarize_refuses_oversized_emission() {
    let p = PolarizationParams::derive(0.1, 0.9, 2).unwrap();
    let err = polarize(&id1(), &id1(), &p, &cap()).unwrap_err();
    assert!(matches!(err, Error::Capacity { limit: 64, .. }), "{err:?}");
}

#[test]
fn bounds_examples() {
    let p = PolarizationParams::derive(0.1, 0.9, 2).unwrap();
    assert_eq!(polarize_bounds(1.0, &p).unwrap(), (1.0, 1.0));
    assert_eq!(polarize_bounds(0.0, &p).unwrap(), (0.0, 0.0));
    let (lo, hi) = polarize_bounds(0.9, &p).unwrap();
    // regression value: (1 - (1 - 0.81^2)^25)^2, evaluated independently
    assert!((lo - 0.9999999999948497).abs() < 1e-14, "{lo:.17}");
    assert_eq!(hi, 1.0);
    assert!(lo > 1.0 - 0.25);
    // the close side: just below alpha lands below 2^-n
    let (_, hi) = polarize_bounds(0.099, &p).unwrap();
    assert!(hi < 0.25, "{hi}");
    assert!(polarize_bounds(1.5, &p).is_err());
}

#[test]
fn xor_states_match_explicit_mixture() {
    let mut r = rng(3);
    let a = random_density(2, &mut r);
    let b = random_density(2, &mut r);
    let (x0, x1) = xor_states(&a, &b, 3).unwrap();
    let pick = |bits: [usize; 3]| -> ComplexMatrix {
        tensor_all(&bits.map(|bit| if bit == 0 { a.clone() } else { b.clone() })).unwrap()
    };
    let mut even = ComplexMatrix::zeros(8, 8);
    let mut odd = ComplexMatrix::zeros(8, 8);
    for m in 0..8usize {
        let bits = [m >> 2 & 1, m >> 1 & 1, m & 1];
        let t = pick(bits).scale_real(0.25);
        if m.count_ones() % 2 == 0 {
            even = &even + &t;
        } else {
            odd = &odd + &t;
        }
    }
    assert!(x0.max_abs_diff(&even) < 1e-14);
    assert!(x1.max_abs_diff(&odd) < 1e-14);
}

#[test]
fn output_distance_is_monotone_in_input_distance() {
    let p = PolarizationParams::with_override(2, 2, 2).unwrap();
    let mut last = -1.0;
    for i in 0..=20 {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 20.0;
        let (c, s) = (theta.cos(), theta.sin());
        let rho1 = ComplexMatrix::from_real(&[&[c * c, c * s], &[c * s, s * s]]);
        let (r0, r1) = polarize_states(&ket0_density(), &rho1, &p).unwrap();
        let d = trace_distance(&r0, &r1).unwrap();
        assert!(d >= last - 1e-9, "step {i}: {d} < {last}");
        last = d;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circuit_xor_matches_operator_xor(seed in any::<u64>(), r in 1usize..=3) {
        let mut g = rng(seed);
        let q0 = random_circuit(1, 4, &mut g);
        let q1 = random_circuit(1, 4, &mut g);
        let (c0, c1) = xor_transform(&q0, &q1, r).unwrap();
        let rho0 = prepare_mixed(&q0, &cap()).unwrap();
        let rho1 = prepare_mixed(&q1, &cap()).unwrap();
        let (x0, x1) = xor_states(&rho0, &rho1, r).unwrap();
        prop_assert!(prepare_mixed(&c0, &cap()).unwrap().max_abs_diff(&x0) <= 1e-7);
        prop_assert!(prepare_mixed(&c1, &cap()).unwrap().max_abs_diff(&x1) <= 1e-7);
    }

    #[test]
    fn bounds_bracket_exact_distance(seed in any::<u64>(), r in 1usize..=2, s in 1usize..=2, n in 1usize..=2) {
        let mut g = rng(seed);
        let a = random_density(2, &mut g);
        let b = random_density(2, &mut g);
        let p = PolarizationParams::with_override(r, s, n).unwrap();
        let d_in = trace_distance(&a, &b).unwrap();
        let (x0, x1) = polarize_states(&a, &b, &p).unwrap();
        let d = trace_distance(&x0, &x1).unwrap();
        let (lo, hi) = polarize_bounds(d_in, &p).unwrap();
        prop_assert!(lo - 1e-9 <= d && d <= hi + 1e-9, "{lo} {d} {hi}");
    }
}
