use super::uhlmann::{overlap_of, uhlmann_unitary_matrices};
use super::{check_kraus, ProtocolKind, ProtocolTranscript, ProverStrategy, PROVER_UNITARY_TOL};
use crate::capacity::Capacity;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{fidelity, ComplexMatrix};
use crate::polarize::{common_layout, polarize, PolarizationParams};
use crate::random::{random_unitary, rng};
use crate::states::{purification_matrix, QsdInstance};

/// Closeness test on the polarized instance.
pub fn run_closeness_test(
    inst: &QsdInstance,
    prover: &ProverStrategy,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<ProtocolTranscript> {
    let (r0, r1) = polarize(&inst.q0, &inst.q1, params, cap)?;
    closeness_test_on_circuits(&r0, &r1, prover, params, cap)
}

/// `Ψ0, Ψ1`: both circuits in the outputs-first layout, as
/// `outputs × rest` coefficient matrices.
fn purifications(
    r0: &Circuit,
    r1: &Circuit,
    cap: &Capacity,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (c0, c1) = common_layout(r0, r1)?;
    Ok((
        purification_matrix(&c0, cap)?,
        purification_matrix(&c1, cap)?,
    ))
}

/// The verifier runs `R0`, sends every non-output qubit, applies `R1†` to
/// what it holds after the reply and accepts on all zeros. The acceptance
/// is `Σ_j |⟨ψ1|(I⊗K_j)|ψ0⟩|²` over the prover's Kraus operators.
pub fn closeness_test_on_circuits(
    r0: &Circuit,
    r1: &Circuit,
    prover: &ProverStrategy,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<ProtocolTranscript> {
    let (psi0, psi1) = purifications(r0, r1, cap)?;
    let env = psi0.cols();
    let xi0 = (&psi0 * &psi0.adjoint()).hermitian_part();
    let xi1 = (&psi1 * &psi1.adjoint()).hermitian_part();
    let f = fidelity(&xi0, &xi1)?.min(1.0);
    let m = &psi1.adjoint() * &psi0;

    let check_unitary = |u: &ComplexMatrix| -> Result<()> {
        if u.rows() != env || u.cols() != env {
            return Err(Error::arg(format!(
                "prover unitary must be {env}x{env}, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        if !u.is_unitary(PROVER_UNITARY_TOL) {
            return Err(Error::arg("prover matrix is not unitary"));
        }
        Ok(())
    };
    let kraus: Vec<ComplexMatrix> = match prover {
        ProverStrategy::HonestOptimal => vec![uhlmann_unitary_matrices(&psi0, &psi1)?.unitary],
        ProverStrategy::FixedUnitary(u) => {
            check_unitary(u)?;
            vec![u.clone()]
        }
        ProverStrategy::Random(seed) => vec![random_unitary(env, &mut rng(*seed))],
        ProverStrategy::FixedChannel(ks) => {
            check_kraus(ks, env)?;
            if ks[0].rows() != env {
                return Err(Error::arg(format!(
                    "prover must return {env}-dimensional messages, got {}",
                    ks[0].rows()
                )));
            }
            ks.clone()
        }
    };

    let acceptance: f64 = kraus.iter().map(|k| overlap_of(&m, k).norm_sqr()).sum();
    let completeness_bound = (kraus.len() == 1).then(|| {
        // ‖ψ1 − (I⊗U)ψ0‖² from the coefficient matrices
        let moved = &psi0 * &kraus[0].transpose();
        let delta: f64 = psi1
            .as_slice()
            .iter()
            .zip(moved.as_slice())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (1.0 - 0.5 * delta).powi(2)
    });

    let mut view2 = ComplexMatrix::zeros(psi0.rows() * env, psi0.rows() * env);
    for k in &kraus {
        let moved = &psi0 * &k.transpose();
        view2 = &view2 + &ComplexMatrix::outer(moved.as_slice());
    }
    Ok(ProtocolTranscript {
        protocol: ProtocolKind::Closeness,
        params: *params,
        views: vec![ComplexMatrix::outer(psi0.as_slice()), view2],
        acceptance: acceptance.min(1.0),
        optimum: f * f,
        completeness_bound,
    })
}

/// The simulator prepares `R0|0⟩` for the first view and `R1|0⟩` for the
/// second, in the outputs-then-rest qubit order the verifier holds.
pub fn simulator_views_closeness_on_circuits(
    r0: &Circuit,
    r1: &Circuit,
    cap: &Capacity,
) -> Result<Vec<ComplexMatrix>> {
    let (psi0, psi1) = purifications(r0, r1, cap)?;
    Ok(vec![
        ComplexMatrix::outer(psi0.as_slice()),
        ComplexMatrix::outer(psi1.as_slice()),
    ])
}

pub fn simulator_views_closeness(
    inst: &QsdInstance,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<Vec<ComplexMatrix>> {
    let (r0, r1) = polarize(&inst.q0, &inst.q1, params, cap)?;
    simulator_views_closeness_on_circuits(&r0, &r1, cap)
}
