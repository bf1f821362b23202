//! Dense complex linear algebra.
//!
//! Everything here is a pure function of its inputs. The trace norm follows
//! the halved convention `‖X‖tr = ½ tr √(X†X)`.

mod eig;
pub mod io;
mod matrix;
mod norms;
mod ops;

pub(crate) use eig::orthonormalize_against;
pub use eig::{
    eigenvalues_hermitian, eigenvalues_hermitian_with, hermitian_eig, hermitian_eig_with,
    matrix_sqrt_psd, svd, EigMethod, HermitianEig, Svd, HERMITIAN_TOL, JACOBI_MAX_DIM, PSD_CLAMP,
};
pub use matrix::{ComplexMatrix, StateVector, C64, NORM_TOL};
pub(crate) use matrix::{ONE, ZERO};
pub use norms::{fidelity, positive_part_projection, trace_distance, trace_norm, DENSITY_TOL};
pub use ops::{
    partial_trace, partial_trace_qubits, permute_qubits, tensor, tensor_all, tensor_power,
    tensor_with_limit,
};

/// `C64::new(re, im)`.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli and friends, used by tests and fixtures.
pub mod consts {
    use super::{c64, ComplexMatrix};

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![c64(0.0, 0.0), c64(0.0, -1.0)],
            vec![c64(0.0, 1.0), c64(0.0, 0.0)],
        ])
        .expect("2x2")
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(&[&[h, h], &[h, -h]])
    }

    /// `|0⟩⟨0|`.
    pub fn ket0_density() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]])
    }

    /// `|1⟩⟨1|`.
    pub fn ket1_density() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, 1.0]])
    }

    /// `|+⟩⟨+|`.
    pub fn plus_density() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]])
    }
}
