use super::{helstrom, ProtocolKind, ProtocolTranscript, ProverStrategy};
use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::polarize::{polarize, PolarizationParams};
use crate::states::{prepare_mixed, QsdInstance};

/// `ξ0, ξ1` prepared by the polarized circuits.
fn polarized_states(
    inst: &QsdInstance,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (r0, r1) = polarize(&inst.q0, &inst.q1, params, cap)?;
    Ok((prepare_mixed(&r0, cap)?, prepare_mixed(&r1, cap)?))
}

/// Distance test on the polarized instance.
pub fn run_distance_test(
    inst: &QsdInstance,
    prover: &ProverStrategy,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<ProtocolTranscript> {
    let (xi0, xi1) = polarized_states(inst, params, cap)?;
    distance_test_on_states(&xi0, &xi1, prover, params)
}

/// Distance test once the two states are known.
pub fn distance_test_on_states(
    xi0: &ComplexMatrix,
    xi1: &ComplexMatrix,
    prover: &ProverStrategy,
    params: &PolarizationParams,
) -> Result<ProtocolTranscript> {
    let h = helstrom(xi0, xi1)?;
    let d = xi0.rows();
    let xis = [xi0, xi1];
    // answer[b][a] = Pr(prover answers a | verifier sent ξ_b)
    let mut answer = [[0.0; 2]; 2];
    match prover {
        ProverStrategy::HonestOptimal => {
            for (b, xi) in xis.iter().enumerate() {
                let p0 = (&h.pi0 * *xi).trace().re.clamp(0.0, 1.0);
                answer[b] = [p0, 1.0 - p0];
            }
        }
        other => {
            let ks = other.kraus(d, d)?;
            let d_out = ks[0].rows();
            if d_out < 2 || !d_out.is_power_of_two() {
                return Err(Error::arg(format!(
                    "prover output dimension {d_out} is not a power of two of at least 2"
                )));
            }
            for (b, xi) in xis.iter().enumerate() {
                let mut p0 = 0.0;
                for k in &ks {
                    p0 += leading_trace(&(&(k * *xi) * &k.adjoint()), d_out / 2);
                }
                let p0 = p0.clamp(0.0, 1.0);
                answer[b] = [p0, 1.0 - p0];
            }
        }
    }
    let acceptance = 0.5 * (answer[0][0] + answer[1][1]);
    let view2 = ComplexMatrix::from_real_diag(&[
        0.5 * answer[0][0],
        0.5 * answer[0][1],
        0.5 * answer[1][0],
        0.5 * answer[1][1],
    ]);
    Ok(ProtocolTranscript {
        protocol: ProtocolKind::Distance,
        params: *params,
        views: vec![first_view(xi0, xi1), view2],
        acceptance,
        optimum: h.p_opt,
        completeness_bound: None,
    })
}

/// `½ (|0⟩⟨0| ⊗ ξ0 + |1⟩⟨1| ⊗ ξ1)`: coin bit and message.
fn first_view(xi0: &ComplexMatrix, xi1: &ComplexMatrix) -> ComplexMatrix {
    let d = xi0.rows();
    let mut v = ComplexMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            v[(i, j)] = xi0[(i, j)] * 0.5;
            v[(d + i, d + j)] = xi1[(i, j)] * 0.5;
        }
    }
    v
}

/// The simulator flips the coin, prepares `ξ_b` itself, and writes the
/// correct answer: views `½ Σ |b⟩⟨b| ⊗ ξ_b` and `½ (|00⟩⟨00| + |11⟩⟨11|)`.
pub fn simulator_views_distance_on_states(
    xi0: &ComplexMatrix,
    xi1: &ComplexMatrix,
) -> Result<Vec<ComplexMatrix>> {
    xi0.check_same_shape(xi1)?;
    Ok(vec![
        first_view(xi0, xi1),
        ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]),
    ])
}

pub fn simulator_views_distance(
    inst: &QsdInstance,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<Vec<ComplexMatrix>> {
    let (xi0, xi1) = polarized_states(inst, params, cap)?;
    simulator_views_distance_on_states(&xi0, &xi1)
}

/// Real part of the sum of the first `n` diagonal entries.
fn leading_trace(m: &ComplexMatrix, n: usize) -> f64 {
    (0..n).map(|i| m[(i, i)].re).sum()
}
