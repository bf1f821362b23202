//! From circuits to states: the pure state `Q|0^m⟩`, the mixed state on the
//! output qubits, and the QSD promise problem over pairs of circuits.

use crate::capacity::Capacity;
use crate::circuit::{apply_circuit, Circuit};
use crate::error::{Error, Result};
use crate::linalg::{trace_distance, ComplexMatrix, StateVector};

/// Distances this close to a threshold count as meeting it.
pub const DECISION_TOL: f64 = 1e-12;

/// `c|0^m⟩`.
pub fn prepare_pure(c: &Circuit, cap: &Capacity) -> Result<StateVector> {
    cap.check_simulation(c.width())?;
    apply_circuit(c, &StateVector::zero(c.width()))
}

/// Reshape a full-width state into the `2^k × 2^(m−k)` matrix `Ψ` with rows
/// indexed by the output qubits (in the listed order, first most significant)
/// and columns by the remaining qubits (ascending). The output density is
/// `Ψ Ψ†`.
pub fn purification_matrix_of(c: &Circuit, psi: &StateVector) -> Result<ComplexMatrix> {
    let m = c.width();
    if psi.dim() != 1usize << m {
        return Err(Error::arg("state does not match circuit width"));
    }
    let outs = c.outputs();
    let env = c.non_outputs();
    let mut out = ComplexMatrix::zeros(1 << outs.len(), 1 << env.len());
    for (idx, &a) in psi.amplitudes().iter().enumerate() {
        let bit = |q: usize| (idx >> (m - 1 - q)) & 1;
        let r = outs.iter().fold(0, |acc, &q| (acc << 1) | bit(q));
        let s = env.iter().fold(0, |acc, &q| (acc << 1) | bit(q));
        out[(r, s)] = a;
    }
    Ok(out)
}

/// [`purification_matrix_of`] applied to `c|0^m⟩`.
pub fn purification_matrix(c: &Circuit, cap: &Capacity) -> Result<ComplexMatrix> {
    purification_matrix_of(c, &prepare_pure(c, cap)?)
}

/// Density matrix of the output qubits after running `c` on `|0^m⟩`.
pub fn prepare_mixed(c: &Circuit, cap: &Capacity) -> Result<ComplexMatrix> {
    let psi = purification_matrix(c, cap)?;
    Ok((&psi * &psi.adjoint()).hermitian_part())
}

/// A pair of state-preparing circuits with thresholds `α < β`.
#[derive(Clone, Debug, PartialEq)]
pub struct QsdInstance {
    pub q0: Circuit,
    pub q1: Circuit,
    pub alpha: f64,
    pub beta: f64,
}

impl QsdInstance {
    pub fn new(q0: Circuit, q1: Circuit, alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::arg(format!("alpha must lie in [0, 1), got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::arg(format!("beta must lie in (0, 1], got {beta}")));
        }
        if alpha >= beta {
            return Err(Error::arg(format!(
                "alpha must be below beta, got alpha={alpha} beta={beta}"
            )));
        }
        if q0.num_outputs() != q1.num_outputs() {
            return Err(Error::arg(format!(
                "circuits have {} and {} output qubits",
                q0.num_outputs(),
                q1.num_outputs()
            )));
        }
        Ok(QsdInstance {
            q0,
            q1,
            alpha,
            beta,
        })
    }

    /// `(ρ0, ρ1)`.
    pub fn states(&self, cap: &Capacity) -> Result<(ComplexMatrix, ComplexMatrix)> {
        Ok((prepare_mixed(&self.q0, cap)?, prepare_mixed(&self.q1, cap)?))
    }

    /// `‖ρ0 − ρ1‖tr`.
    pub fn distance(&self, cap: &Capacity) -> Result<f64> {
        let (r0, r1) = self.states(cap)?;
        trace_distance(&r0, &r1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QsdDecision {
    /// Distance at least `β`.
    Yes(f64),
    /// Distance at most `α`.
    No(f64),
    /// Distance strictly between the thresholds.
    PromiseViolated(f64),
}

impl QsdDecision {
    pub fn distance(&self) -> f64 {
        match *self {
            QsdDecision::Yes(d) | QsdDecision::No(d) | QsdDecision::PromiseViolated(d) => d,
        }
    }
}

/// Brute-force oracle: compute the distance and compare with the thresholds.
pub fn decide_qsd(inst: &QsdInstance, cap: &Capacity) -> Result<QsdDecision> {
    let d = inst.distance(cap)?;
    Ok(if d >= inst.beta - DECISION_TOL {
        QsdDecision::Yes(d)
    } else if d <= inst.alpha + DECISION_TOL {
        QsdDecision::No(d)
    } else {
        QsdDecision::PromiseViolated(d)
    })
}
