//! Trace norm (halved convention) and fidelity.

use super::eig::{clamp_psd, eigenvalues_hermitian, hermitian_eig, spectral_map};
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::Result;

/// Tolerance used when validating density-matrix arguments.
pub const DENSITY_TOL: f64 = 1e-9;

/// `‖X‖tr = ½ tr √(X†X)`, half the sum of the singular values.
///
/// Hermitian input is handled through its eigenvalues. Otherwise the singular
/// values are read off the Hermitian dilation `[[0, X], [X†, 0]]`, whose
/// spectrum is `±s_i`; this keeps small singular values accurate to absolute
/// rounding rather than to its square root.
pub fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    x.check_square("trace-norm argument")?;
    let n = x.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let scale = x.max_abs().max(f64::MIN_POSITIVE);
    if x.is_hermitian(1e-13 * scale) {
        let vals = eigenvalues_hermitian(&x.hermitian_part())?;
        return Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>());
    }
    let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = x[(i, j)];
            h[(i, n + j)] = z;
            h[(n + j, i)] = z.conj();
        }
    }
    let vals = eigenvalues_hermitian(&h)?;
    Ok(0.25 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// `‖a − b‖tr`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    trace_norm(&(a - b))
}

/// `F(ρ, ξ) = tr √(√ρ ξ √ρ)`, evaluated as the Schatten-1 norm of `√ρ √ξ`.
///
/// Eigenvalues below the eigensolver's backward error are set to zero before
/// taking square roots. Otherwise a rounding-level `1e-17` turns into `3e-9`,
/// and rank-deficient states pick up errors near `1e-8`.
pub fn fidelity(rho: &ComplexMatrix, xi: &ComplexMatrix) -> Result<f64> {
    rho.check_same_shape(xi)?;
    rho.check_density("first fidelity argument", DENSITY_TOL)?;
    xi.check_density("second fidelity argument", DENSITY_TOL)?;
    let product = &denoised_sqrt(rho)? * &denoised_sqrt(xi)?;
    Ok(2.0 * trace_norm(&product)?)
}

fn denoised_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut eig = hermitian_eig(&rho.hermitian_part())?;
    clamp_psd(&mut eig.values)?;
    let top = eig.values.iter().cloned().fold(0.0, f64::max);
    let floor = 8.0 * eig.values.len() as f64 * f64::EPSILON * top;
    Ok(spectral_map(
        &eig,
        |v| if v <= floor { 0.0 } else { v.sqrt() },
    ))
}

/// `tr(ΠX)` maximized over projections: the positive-eigenspace projection of a
/// Hermitian `x`, returned with the attained value.
pub fn positive_part_projection(x: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let eig = hermitian_eig(&x.hermitian_part())?;
    let n = eig.values.len();
    let mut p = ComplexMatrix::zeros(n, n);
    let mut value = 0.0;
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam < 0.0 {
            continue;
        }
        value += lam;
        let v = eig.vectors.column(k);
        for i in 0..n {
            if v[i] == ZERO {
                continue;
            }
            for j in 0..n {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok((p, value))
}
