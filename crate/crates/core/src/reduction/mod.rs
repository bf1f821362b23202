//! From an honest-verifier proof system with a simulator to a QSD pair.
//!
//! Registers: the verifier's private qubits `V` (`qv`), the message qubits
//! `M` (`qm`) and the prover's private qubits `P` (`qp`), laid out in that
//! order. An `m`-message system runs `V_1, P_1, V_2, …, P_{m/2}, V_k` with
//! `k = m/2 + 1` and accepts when qubit `outbit` of `V` reads 1.
//!
//! [`build_qsd`] emits `Q0` preparing `⊗ tr_M ρ_i` and `Q1` preparing
//! `⊗ tr_M ξ_i` over `i = 1..k−1`, where `ρ_i` is the simulated state after
//! message `2i` and `ξ_i = V_i ρ_{i−1} V_i†`. The last `ρ` is first pushed
//! through `V_k`, has its output qubit replaced by a fresh `|1⟩`, and is
//! pulled back through `V_k†`. A prover never touches `V`, so for a good
//! simulator of an accepting system the two products agree; for a system
//! that rejects they are far apart.

mod max_accept;
mod qps;

pub use max_accept::{max_accept_certified, max_accept_exact, MaxAccept, MAX_ACCEPT_GAP};
pub use qps::{parse_qps, to_qps};

use std::collections::BTreeMap;

use crate::capacity::{Capacity, DEFAULT_MAX_SIDE};
use crate::circuit::{Circuit, Gate, Wire};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, tensor_with_limit, trace_distance, ComplexMatrix};
use crate::states::prepare_mixed;

/// How far below 1 the forced-accept state may sit in [`check_complete1`].
pub const PRECONDITION_TOL: f64 = 1e-8;
/// Slack in the `lhs ≥ rhs` verdict of [`check_complete1`].
pub const COMPLETE1_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ProofSystemSpec {
    pub qv: usize,
    pub qm: usize,
    pub qp: usize,
    /// Even message count `m`.
    pub messages: usize,
    /// Index within `V` of the accept qubit.
    pub outbit: usize,
    /// `V_1 … V_k`, each `qv + qm` wide.
    pub verifiers: Vec<Circuit>,
    /// `P_1 … P_{m/2}`, each `qm + qp` wide with the message qubits as outputs.
    pub provers: Vec<Circuit>,
}

impl ProofSystemSpec {
    pub fn new(
        qv: usize,
        qm: usize,
        qp: usize,
        messages: usize,
        outbit: usize,
        verifiers: Vec<Circuit>,
        provers: Vec<Circuit>,
    ) -> Result<Self> {
        if qv == 0 || qm == 0 {
            return Err(Error::arg("qv and qm must be at least 1"));
        }
        if messages < 2 || !messages.is_multiple_of(2) {
            return Err(Error::arg(format!(
                "message count must be even and at least 2, got {messages}"
            )));
        }
        if outbit >= qv {
            return Err(Error::arg(format!(
                "outbit {outbit} is not a verifier qubit"
            )));
        }
        let k = messages / 2 + 1;
        if verifiers.len() != k || provers.len() != k - 1 {
            return Err(Error::arg(format!(
                "{messages} messages need {k} verifier and {} prover circuits, got {} and {}",
                k - 1,
                verifiers.len(),
                provers.len()
            )));
        }
        if let Some(v) = verifiers.iter().find(|v| v.width() != qv + qm) {
            return Err(Error::arg(format!(
                "verifier circuits must be {} qubits wide, got {}",
                qv + qm,
                v.width()
            )));
        }
        if let Some(p) = provers.iter().find(|p| p.width() != qm + qp) {
            return Err(Error::arg(format!(
                "prover circuits must be {} qubits wide, got {}",
                qm + qp,
                p.width()
            )));
        }
        let verifiers = verifiers
            .into_iter()
            .map(|v| v.with_outputs((0..qv + qm).collect()))
            .collect::<Result<_>>()?;
        let provers = provers
            .into_iter()
            .map(|p| p.with_outputs((0..qm).collect()))
            .collect::<Result<_>>()?;
        Ok(ProofSystemSpec {
            qv,
            qm,
            qp,
            messages,
            outbit,
            verifiers,
            provers,
        })
    }

    /// Number of verifier circuits, `m/2 + 1`.
    pub fn k(&self) -> usize {
        self.messages / 2 + 1
    }

    pub fn total_qubits(&self) -> usize {
        self.qv + self.qm + self.qp
    }

    /// The honest interaction up to message `j`, on `V ⊗ M ⊗ P` with the
    /// `V ⊗ M` qubits as outputs.
    pub fn interaction(&self, j: usize) -> Result<Circuit> {
        if j > self.messages {
            return Err(Error::arg(format!(
                "message index {j} exceeds message count {}",
                self.messages
            )));
        }
        let vm = self.qv + self.qm;
        let mut c = Circuit::new(self.total_qubits(), (0..vm).collect())?;
        let v_wires: Vec<Wire> = (0..vm).map(Wire::To).collect();
        let p_wires: Vec<Wire> = (self.qv..self.total_qubits()).map(Wire::To).collect();
        for step in 0..j {
            c = if step % 2 == 0 {
                c.compose(&self.verifiers[step / 2], &v_wires)?
            } else {
                c.compose(&self.provers[step / 2], &p_wires)?
            };
        }
        Ok(c)
    }

    /// Probability that the honest run ends with the output qubit at 1.
    pub fn acceptance_probability(&self, cap: &Capacity) -> Result<f64> {
        let vm = self.qv + self.qm;
        let c = self
            .interaction(self.messages)?
            .compose(
                &self.verifiers[self.k() - 1],
                &(0..vm).map(Wire::To).collect::<Vec<_>>(),
            )?
            .with_outputs(vec![self.outbit])?;
        Ok(prepare_mixed(&c, cap)?[(1, 1)].re.clamp(0.0, 1.0))
    }

    /// `Π_acc` on `V ⊗ M`: the projector onto the output qubit reading 1.
    pub fn accept_projector(&self) -> ComplexMatrix {
        let w = self.qv + self.qm;
        let diag: Vec<f64> = (0..1usize << w)
            .map(|i| ((i >> (w - 1 - self.outbit)) & 1) as f64)
            .collect();
        ComplexMatrix::from_real_diag(&diag)
    }
}

/// Where the simulated views `σ_j` come from.
#[derive(Clone, Debug, PartialEq)]
pub enum SimulatorSpec {
    /// The honest interaction itself: a perfect simulator.
    Honest,
    /// Circuits indexed by message number `j`, each with `qv + qm` outputs.
    /// Only even `j` are used by [`build_qsd`].
    Circuits(BTreeMap<usize, Circuit>),
}

impl SimulatorSpec {
    pub(crate) fn check(&self, ps: &ProofSystemSpec) -> Result<()> {
        if let SimulatorSpec::Circuits(map) = self {
            for (&j, c) in map {
                if j == 0 || j > ps.messages {
                    return Err(Error::arg(format!(
                        "simulator index {j} outside 1..={}",
                        ps.messages
                    )));
                }
                if c.num_outputs() != ps.qv + ps.qm {
                    return Err(Error::arg(format!(
                        "simulator {j} has {} outputs, expected {}",
                        c.num_outputs(),
                        ps.qv + ps.qm
                    )));
                }
            }
        }
        Ok(())
    }

    /// Circuit preparing `σ_j`; `σ_0` is the all-zero state.
    pub fn circuit(&self, ps: &ProofSystemSpec, j: usize) -> Result<Circuit> {
        if j == 0 {
            return Circuit::identity(ps.qv + ps.qm);
        }
        match self {
            SimulatorSpec::Honest => ps.interaction(j),
            SimulatorSpec::Circuits(map) => map
                .get(&j)
                .cloned()
                .ok_or_else(|| Error::arg(format!("no simulator circuit for message {j}"))),
        }
    }
}

/// The honest verifier's view after `j` messages, on `V ⊗ M`.
pub fn compute_view(ps: &ProofSystemSpec, j: usize, cap: &Capacity) -> Result<ComplexMatrix> {
    prepare_mixed(&ps.interaction(j)?, cap)
}

fn wires_onto(c: &Circuit) -> Vec<Wire> {
    c.outputs().iter().map(|&q| Wire::To(q)).collect()
}

/// Per-factor circuits `(ρ_1..ρ_{k−1}, ξ_1..ξ_{k−1})`, each with the
/// `V ⊗ M` qubits as outputs.
pub fn factor_circuits(
    ps: &ProofSystemSpec,
    sim: &SimulatorSpec,
) -> Result<(Vec<Circuit>, Vec<Circuit>)> {
    sim.check(ps)?;
    let k = ps.k();
    let vm = ps.qv + ps.qm;
    let mut rhos = Vec::with_capacity(k - 1);
    for i in 1..k - 1 {
        rhos.push(sim.circuit(ps, 2 * i)?);
    }
    // last factor: through V_k, force the output qubit to |1>, back through V_k†
    let last = sim.circuit(ps, ps.messages)?;
    let vk = &ps.verifiers[k - 1];
    let wires = wires_onto(&last);
    let mut flip = Circuit::new(vm + 1, (0..vm).collect())?;
    flip.push(Gate::preset("x", &[vm])?)?;
    flip.push(Gate::preset("swap", &[ps.outbit, vm])?)?;
    let mut flip_wires = wires.clone();
    flip_wires.push(Wire::Fresh);
    let last = last
        .compose(vk, &wires)?
        .compose(&flip, &flip_wires)?
        .compose(&vk.adjoint(), &wires)?;
    rhos.push(last);

    let mut xis = Vec::with_capacity(k - 1);
    for i in 1..k {
        let prev = sim.circuit(ps, 2 * (i - 1))?;
        let w = wires_onto(&prev);
        xis.push(prev.compose(&ps.verifiers[i - 1], &w)?);
    }
    Ok((rhos, xis))
}

/// `(Q0, Q1)` preparing `⊗ tr_M ρ_i` and `⊗ tr_M ξ_i`.
pub fn build_qsd(
    ps: &ProofSystemSpec,
    sim: &SimulatorSpec,
    cap: &Capacity,
) -> Result<(Circuit, Circuit)> {
    let (rhos, xis) = factor_circuits(ps, sim)?;
    let join = |factors: Vec<Circuit>| -> Result<Circuit> {
        let mut it = factors.into_iter().map(|c| {
            let keep = c.outputs()[..ps.qv].to_vec();
            c.with_outputs(keep)
        });
        let mut acc = it.next().expect("k >= 2")?;
        for c in it {
            acc = acc.parallel(&c?)?;
        }
        Ok(acc)
    };
    let (q0, q1) = (join(rhos)?, join(xis)?);
    let widest = q0.width().max(q1.width());
    if widest > cap.max_emit_qubits {
        return Err(Error::Capacity {
            what: "reduction output circuit (qubits)",
            requested: widest,
            limit: cap.max_emit_qubits,
        });
    }
    Ok((q0, q1))
}

/// Exact `ρ_1..ρ_{k−1}` on `V ⊗ M` as used by [`build_qsd`].
pub fn reduction_states(
    ps: &ProofSystemSpec,
    sim: &SimulatorSpec,
    cap: &Capacity,
) -> Result<Vec<ComplexMatrix>> {
    let (rhos, _) = factor_circuits(ps, sim)?;
    rhos.iter().map(|c| prepare_mixed(c, cap)).collect()
}

/// Both sides of the inequality `‖⊗tr_M ξ_i − ⊗tr_M ρ_i‖tr ≥ (1 − √ε)² / (3(k−1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complete1 {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check the inequality for supplied `ρ_1..ρ_{k−1}` on `V ⊗ M`, with
/// `ξ_i = V_i ρ_{i−1} V_i†` and `ρ_0 = |0⟩⟨0|`. The state `V_k ρ_{k−1} V_k†`
/// must accept with certainty; `epsilon` is the claimed bound on the
/// system's maximum acceptance.
pub fn check_complete1(
    ps: &ProofSystemSpec,
    rhos: &[ComplexMatrix],
    epsilon: f64,
) -> Result<Complete1> {
    let k = ps.k();
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::arg(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    if rhos.len() != k - 1 {
        return Err(Error::arg(format!(
            "need {} states, got {}",
            k - 1,
            rhos.len()
        )));
    }
    let d = 1usize << (ps.qv + ps.qm);
    for r in rhos {
        if r.rows() != d || !r.is_density(1e-8) {
            return Err(Error::arg(format!(
                "states must be {d}x{d} density matrices"
            )));
        }
    }
    let us: Vec<ComplexMatrix> = ps
        .verifiers
        .iter()
        .map(|v| v.unitary())
        .collect::<Result<_>>()?;
    let forced = rhos[k - 2].conjugate_by(&us[k - 1])?;
    let acc = (&ps.accept_projector() * &forced).trace().re;
    if acc < 1.0 - PRECONDITION_TOL {
        return Err(Error::Precondition(format!(
            "V_k applied to the last state accepts with probability {acc}, not 1"
        )));
    }
    let dv = 1usize << ps.qv;
    let dm = 1usize << ps.qm;
    let reduce = |m: &ComplexMatrix| partial_trace(m, &[dv, dm], &[0]);
    let mut prev = ComplexMatrix::zeros(d, d);
    prev[(0, 0)] = crate::linalg::ONE;
    let mut gamma0: Option<ComplexMatrix> = None;
    let mut gamma1: Option<ComplexMatrix> = None;
    let push = |acc: &mut Option<ComplexMatrix>, f: ComplexMatrix| -> Result<()> {
        *acc = Some(match acc.take() {
            None => f,
            Some(a) => tensor_with_limit(&a, &f, DEFAULT_MAX_SIDE)?,
        });
        Ok(())
    };
    for i in 0..k - 1 {
        let xi = prev.conjugate_by(&us[i])?;
        push(&mut gamma1, reduce(&xi)?)?;
        push(&mut gamma0, reduce(&rhos[i])?)?;
        prev = rhos[i].clone();
    }
    let lhs = trace_distance(&gamma1.expect("k >= 2"), &gamma0.expect("k >= 2"))?;
    let rhs = (1.0 - epsilon.sqrt()).powi(2) / (3.0 * (k - 1) as f64);
    Ok(Complete1 {
        lhs,
        rhs,
        holds: lhs >= rhs - COMPLETE1_TOL,
    })
}
