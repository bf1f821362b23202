use crate::error::{Error, Result};
use crate::linalg::{positive_part_projection, ComplexMatrix, DENSITY_TOL};

/// Optimal two-outcome measurement for telling `ξ0` from `ξ1` given with
/// equal prior probability.
#[derive(Clone, Debug)]
pub struct Helstrom {
    /// Projection onto the eigenspace of `ξ0 − ξ1` with eigenvalues `≥ 0`;
    /// the zero eigenspace goes here.
    pub pi0: ComplexMatrix,
    /// `I − Π0`.
    pub pi1: ComplexMatrix,
    /// `½ + ½‖ξ0 − ξ1‖tr`.
    pub p_opt: f64,
}

pub fn helstrom(xi0: &ComplexMatrix, xi1: &ComplexMatrix) -> Result<Helstrom> {
    if xi0.rows() != xi1.rows() || xi0.cols() != xi1.cols() {
        return Err(Error::arg(format!(
            "states have shapes {}x{} and {}x{}",
            xi0.rows(),
            xi0.cols(),
            xi1.rows(),
            xi1.cols()
        )));
    }
    xi0.check_density("first state", DENSITY_TOL)?;
    xi1.check_density("second state", DENSITY_TOL)?;
    let (pi0, positive) = positive_part_projection(&(xi0 - xi1))?;
    let pi1 = &ComplexMatrix::identity(xi0.rows()) - &pi0;
    Ok(Helstrom {
        pi0,
        pi1,
        p_opt: 0.5 + 0.5 * positive,
    })
}
