//! The two zero-knowledge protocols for QSD, simulated exactly.
//!
//! * Distance test: the verifier sends `ξ_b` for a random bit `b` and accepts
//!   if the prover names `b`. The best prover measures the Helstrom
//!   projections and wins with probability `½ + ½‖ξ0 − ξ1‖tr`.
//! * Closeness test: the verifier prepares a purification of `ξ0`, hands over
//!   the purifying qubits, and accepts if undoing the preparation of `ξ1`
//!   returns all zeros. The best prover applies the Uhlmann unitary and wins
//!   with probability `F(ξ0, ξ1)²`.
//!
//! Acceptance probabilities come from density matrices, not sampling;
//! [`sample_acceptance`] exists only to show what a finite run would report.

mod closeness;
mod distance;
mod helstrom;
mod uhlmann;

pub use closeness::{
    closeness_test_on_circuits, run_closeness_test, simulator_views_closeness,
    simulator_views_closeness_on_circuits,
};
pub use distance::{
    distance_test_on_states, run_distance_test, simulator_views_distance,
    simulator_views_distance_on_states,
};
pub use helstrom::{helstrom, Helstrom};
pub use uhlmann::{uhlmann_unitary, uhlmann_unitary_matrices, Uhlmann};

use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::polarize::PolarizationParams;
use crate::random::rng;

/// Slack allowed when checking prover unitaries.
pub const PROVER_UNITARY_TOL: f64 = 1e-9;
/// Slack allowed in `Σ K†K = I` for prover channels.
pub const KRAUS_TOL: f64 = 1e-8;

/// What the prover does with the message it receives.
#[derive(Clone, Debug, PartialEq)]
pub enum ProverStrategy {
    /// Helstrom measurement (distance test) or Uhlmann unitary (closeness).
    HonestOptimal,
    /// A fixed unitary. In the distance test it acts on the message plus an
    /// equally wide private register starting in `|0…0⟩`, and the answer is
    /// the first message qubit. In the closeness test it acts on the
    /// returned qubits directly.
    FixedUnitary(ComplexMatrix),
    /// A channel given by Kraus operators. Distance test: message to any
    /// power-of-two output whose first qubit is the answer. Closeness test:
    /// returned qubits to themselves.
    FixedChannel(Vec<ComplexMatrix>),
    /// A Haar-random unitary of the `FixedUnitary` shape, drawn from the seed.
    Random(u64),
}

impl ProverStrategy {
    /// Kraus operators for a prover acting on `d_in`-dimensional input,
    /// where unitaries are on `d_in · extra` with `extra` private dimensions.
    pub(crate) fn kraus(&self, d_in: usize, private: usize) -> Result<Vec<ComplexMatrix>> {
        let unitary_kraus = |u: &ComplexMatrix| -> Result<Vec<ComplexMatrix>> {
            let d = d_in * private;
            if u.rows() != d || u.cols() != d {
                return Err(Error::arg(format!(
                    "prover unitary must be {d}x{d}, got {}x{}",
                    u.rows(),
                    u.cols()
                )));
            }
            if !u.is_unitary(PROVER_UNITARY_TOL) {
                return Err(Error::arg("prover matrix is not unitary"));
            }
            // U (· ⊗ |0⟩): keep the columns whose private index is zero
            let mut k = ComplexMatrix::zeros(d, d_in);
            for i in 0..d {
                for j in 0..d_in {
                    k[(i, j)] = u[(i, j * private)];
                }
            }
            Ok(vec![k])
        };
        match self {
            ProverStrategy::HonestOptimal => Err(Error::arg("honest prover has no fixed channel")),
            ProverStrategy::FixedUnitary(u) => unitary_kraus(u),
            ProverStrategy::Random(seed) => {
                let u = crate::random::random_unitary(d_in * private, &mut rng(*seed));
                unitary_kraus(&u)
            }
            ProverStrategy::FixedChannel(ks) => {
                check_kraus(ks, d_in)?;
                Ok(ks.clone())
            }
        }
    }
}

/// `Σ K†K = I` on the input space, all operators of one shape.
pub fn check_kraus(ks: &[ComplexMatrix], d_in: usize) -> Result<()> {
    let Some(first) = ks.first() else {
        return Err(Error::arg("channel needs at least one Kraus operator"));
    };
    let d_out = first.rows();
    if ks.iter().any(|k| k.cols() != d_in || k.rows() != d_out) {
        return Err(Error::arg(format!(
            "Kraus operators must all be {d_out}x{d_in}"
        )));
    }
    let mut sum = ComplexMatrix::zeros(d_in, d_in);
    for k in ks {
        sum = &sum + &(&k.adjoint() * k);
    }
    if sum.max_abs_diff(&ComplexMatrix::identity(d_in)) > KRAUS_TOL {
        return Err(Error::arg("Kraus operators are not trace preserving"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    Distance,
    Closeness,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Distance => "distance",
            ProtocolKind::Closeness => "closeness",
        }
    }
}

/// Record of one exact protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolTranscript {
    pub protocol: ProtocolKind,
    pub params: PolarizationParams,
    /// Verifier-plus-message state after each of the two messages.
    pub views: Vec<ComplexMatrix>,
    pub acceptance: f64,
    /// Best acceptance any prover can reach: Helstrom `p_opt` for the
    /// distance test, `F²` for the closeness test.
    pub optimum: f64,
    /// Closeness test only: `(1 − ½‖R1|0⟩ − (I⊗U)R0|0⟩‖²)²` for the
    /// prover's unitary, when the prover is unitary.
    pub completeness_bound: Option<f64>,
}

impl ProtocolTranscript {
    /// `1 − acceptance`.
    pub fn completeness_error(&self) -> f64 {
        (1.0 - self.acceptance).max(0.0)
    }
}

/// Fraction of `shots` Bernoulli(`p`) trials that accept, for demonstration.
pub fn sample_acceptance(p: f64, shots: u64, seed: u64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-9).contains(&p) {
        return Err(Error::arg(format!(
            "acceptance probability {p} outside [0, 1]"
        )));
    }
    if shots == 0 {
        return Err(Error::arg("need at least one shot"));
    }
    let hits = Binomial::new(shots, p.min(1.0))
        .map_err(|e| Error::arg(e.to_string()))?
        .sample(&mut rng(seed));
    Ok(hits as f64 / shots as f64)
}
