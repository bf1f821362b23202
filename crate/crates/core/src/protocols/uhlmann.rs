use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, StateVector, C64};

/// Environment unitary aligning two purifications.
#[derive(Clone, Debug)]
pub struct Uhlmann {
    /// `U` on the environment factor.
    pub unitary: ComplexMatrix,
    /// `⟨ψ|(I⊗U)|φ⟩`, real and nonnegative; equals the fidelity of the two
    /// reduced states.
    pub overlap: f64,
}

/// `U` maximizing `|⟨ψ|(I⊗U)|φ⟩|` for states written `|keep⟩|env⟩`, keep
/// index major.
pub fn uhlmann_unitary(
    phi: &StateVector,
    psi: &StateVector,
    keep_dim: usize,
    env_dim: usize,
) -> Result<Uhlmann> {
    if keep_dim * env_dim != phi.dim() || phi.dim() != psi.dim() {
        return Err(Error::arg(format!(
            "split {keep_dim}x{env_dim} does not match states of dimension {} and {}",
            phi.dim(),
            psi.dim()
        )));
    }
    let as_matrix = |s: &StateVector| {
        ComplexMatrix::from_vec(keep_dim, env_dim, s.amplitudes().to_vec()).expect("sized")
    };
    uhlmann_unitary_matrices(&as_matrix(phi), &as_matrix(psi))
}

/// Same as [`uhlmann_unitary`] with each state given as its `keep × env`
/// coefficient matrix.
///
/// With `M = Ψ†Φ = W Σ V†`, the overlap is `tr(M Uᵀ)`, maximized by
/// `Uᵀ = V W†`, giving `tr Σ`.
pub fn uhlmann_unitary_matrices(phi: &ComplexMatrix, psi: &ComplexMatrix) -> Result<Uhlmann> {
    if phi.rows() != psi.rows() || phi.cols() != psi.cols() {
        return Err(Error::arg("purifications have different shapes"));
    }
    let m = &psi.adjoint() * phi;
    let dec = svd(&m)?;
    let unitary = &dec.u.conj() * &dec.v.transpose();
    let overlap = overlap_of(&m, &unitary).re.max(0.0);
    Ok(Uhlmann { unitary, overlap })
}

/// `tr(M Uᵀ) = Σ M∘U`, which is `⟨ψ|(I⊗U)|φ⟩` for `M = Ψ†Φ`.
pub(crate) fn overlap_of(m: &ComplexMatrix, u: &ComplexMatrix) -> C64 {
    m.as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(a, b)| a * b)
        .sum()
}
