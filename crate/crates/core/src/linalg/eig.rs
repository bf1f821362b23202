//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! decompositions derived from it.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative Hermiticity slack accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues at or above `-PSD_CLAMP` are treated as zero when a square root
/// is taken; anything lower is rejected.
pub const PSD_CLAMP: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × rows` unitary.
    pub u: ComplexMatrix,
    /// `min(rows, cols)` values, descending.
    pub s: Vec<f64>,
    /// `cols × cols` unitary.
    pub v: ComplexMatrix,
}

impl Svd {
    /// `U · diag(s) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, &s) in self.s.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.u[(i, k)] * s;
            }
        }
        &us * &self.v.adjoint()
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    a.check_square("eigendecomposition input")?;
    let tol = HERMITIAN_TOL * a.max_abs().max(1.0);
    if !a.is_hermitian(tol) {
        return Err(Error::arg("matrix is not Hermitian"));
    }
    Ok(())
}

/// Which algorithm [`hermitian_eig_with`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    /// Jacobi up to [`JACOBI_MAX_DIM`], tridiagonal QL above.
    Auto,
    Jacobi,
    Tridiagonal,
}

/// Largest side handled by Jacobi under [`EigMethod::Auto`]. Jacobi keeps
/// small eigenvalues accurate relative to themselves but costs several times
/// more than the tridiagonal route on large inputs.
pub const JACOBI_MAX_DIM: usize = 32;

fn resolve(method: EigMethod, n: usize) -> EigMethod {
    match method {
        EigMethod::Auto if n <= JACOBI_MAX_DIM => EigMethod::Jacobi,
        EigMethod::Auto => EigMethod::Tridiagonal,
        m => m,
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    hermitian_eig_with(a, EigMethod::Auto)
}

pub fn hermitian_eig_with(a: &ComplexMatrix, method: EigMethod) -> Result<HermitianEig> {
    check_hermitian(a)?;
    let (values, vectors) = match resolve(method, a.rows()) {
        EigMethod::Jacobi => jacobi(a, true)?,
        _ => tridiagonal_ql(a, true)?,
    };
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let n = values.len();
    let mut sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            sorted[(r, dst)] = vectors[(r, src)];
        }
    }
    Ok(HermitianEig {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: sorted,
    })
}

/// Eigenvalues only, descending.
pub fn eigenvalues_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    eigenvalues_hermitian_with(a, EigMethod::Auto)
}

pub fn eigenvalues_hermitian_with(a: &ComplexMatrix, method: EigMethod) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let (mut values, _) = match resolve(method, a.rows()) {
        EigMethod::Jacobi => jacobi(a, false)?,
        _ => tridiagonal_ql(a, false)?,
    };
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// QL iterations with implicit Wilkinson shifts.
///
/// Each reflector `H = I − τ v v†` is chosen so that `H† x = β e₁` with `β`
/// real, which leaves real off-diagonals and makes the QL stage purely real.
fn tridiagonal_ql(
    a: &ComplexMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.rows();
    let mut m = a.hermitian_part().into_vec();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n).into_vec());
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![ZERO; n];
    let mut r = vec![ZERO; n];

    for k in 0..n.saturating_sub(1) {
        let len = n - k - 1;
        let alpha = m[(k + 1) * n + k];
        d[k] = m[k * n + k].re;
        // scaled, so entries near 1e-170 do not square to zero
        let colmax = (k + 1..n)
            .map(|i| m[i * n + k].l1_norm())
            .fold(0.0, f64::max);
        if colmax <= f64::MIN_POSITIVE / f64::EPSILON {
            // too small to reflect without overflow; dropping it is a
            // perturbation far below rounding
            e[k] = 0.0;
            continue;
        }
        let tail: f64 = (k + 2..n).map(|i| (m[i * n + k] / colmax).norm_sqr()).sum();
        if tail == 0.0 && alpha.im == 0.0 {
            e[k] = alpha.re;
            continue;
        }
        let norm = colmax * ((alpha / colmax).norm_sqr() + tail).sqrt();
        let beta = if alpha.re >= 0.0 { -norm } else { norm };
        let tau = (C64::new(beta, 0.0) - alpha) / beta;
        // complex division would square |alpha - beta| and underflow
        let gap = alpha - beta;
        let scale = gap.conj() / gap.norm() / gap.norm();
        let mut v = vec![ZERO; len];
        v[0] = ONE;
        for i in 1..len {
            v[i] = m[(k + 1 + i) * n + k] * scale;
        }
        e[k] = beta;
        for i in k + 1..n {
            m[i * n + k] = ZERO;
            m[k * n + i] = ZERO;
        }
        m[(k + 1) * n + k] = C64::new(beta, 0.0);
        m[k * n + k + 1] = C64::new(beta, 0.0);

        // trailing block B ← H† B H, via B − τ p v† then − τ̄ v (v† ·)
        let off = k + 1;
        for i in 0..len {
            let row = &m[(off + i) * n + off..(off + i) * n + n];
            p[i] = row.iter().zip(&v).map(|(x, y)| x * y).sum();
        }
        for i in 0..len {
            let pi = p[i] * tau;
            let row = &mut m[(off + i) * n + off..(off + i) * n + n];
            for (x, vj) in row.iter_mut().zip(&v) {
                *x -= pi * vj.conj();
            }
        }
        for rj in r.iter_mut().take(len) {
            *rj = ZERO;
        }
        for i in 0..len {
            let vi = v[i].conj();
            let row = &m[(off + i) * n + off..(off + i) * n + n];
            for (rj, x) in r.iter_mut().zip(row) {
                *rj += vi * x;
            }
        }
        let tc = tau.conj();
        for i in 0..len {
            let vi = v[i] * tc;
            let row = &mut m[(off + i) * n + off..(off + i) * n + n];
            for (x, rj) in row.iter_mut().zip(&r) {
                *x -= vi * rj;
            }
        }

        if let Some(q) = q.as_mut() {
            // Q ← Q H on columns off..n
            for row in q.chunks_mut(n) {
                let s: C64 = row[off..].iter().zip(&v).map(|(x, y)| x * y).sum::<C64>() * tau;
                for (x, vj) in row[off..].iter_mut().zip(&v) {
                    *x -= s * vj.conj();
                }
            }
        }
    }
    if n > 0 {
        d[n - 1] = m[(n - 1) * n + n - 1].re;
        e[n - 1] = 0.0;
    }

    ql_implicit(&mut d, &mut e, q.as_mut().map(|z| (z.as_mut_slice(), n)))?;
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "tridiagonal QL produced a non-finite eigenvalue (dimension {n})"
        )));
    }
    let q = q.map(|z| ComplexMatrix::from_vec(n, n, z).expect("square"));
    Ok((d, q))
}

/// Symmetric tridiagonal QL with implicit shifts; `e[i]` couples `i` and
/// `i+1`. Rotations are applied to the columns of `z` when given.
///
/// A coupling is dropped once it is negligible next to its two diagonal
/// entries or below `ε·‖T‖`; the second test keeps clusters of rounding-level
/// eigenvalues from stalling and costs nothing in backward error.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<(&mut [C64], usize)>) -> Result<()> {
    let n = d.len();
    let tnorm = (0..n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    let floor = f64::EPSILON * tnorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(format!(
                    "tridiagonal QL did not converge (dimension {n})"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some((z, stride)) = z.as_mut() {
                    for row in z.chunks_mut(*stride) {
                        let f = row[i + 1];
                        row[i + 1] = row[i] * s + f * c;
                        row[i] = row[i] * c - f * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Cyclic Jacobi on the Hermitian part of `a`.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the
/// combined similarity is `G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` acting on
/// rows/columns `p, q`. A pivot is skipped once it is negligible relative to
/// its diagonal entries, which keeps small eigenvalues accurate in relative
/// terms.
fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.rows();
    let mut m = a.hermitian_part().into_vec();
    for i in 0..n {
        m[i * n + i] = C64::new(m[i * n + i].re, 0.0);
    }
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n).into_vec());
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n <= 1 || scale == 0.0 {
        let values = (0..n).map(|i| m[i * n + i].re).collect();
        let v = v.map(|d| ComplexMatrix::from_vec(n, n, d).expect("square"));
        return Ok((values, v));
    }
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;

    for _sweep in 0..MAX_SWEEPS {
        // Weyl's bound: once the off-diagonal mass is this small the diagonal
        // is within rounding of the spectrum.
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q].norm_sqr();
            }
        }
        let active = off.sqrt() > 1e-18 * scale;
        let mut rotated = false;
        for p in 0..n - 1 {
            if !active {
                break;
            }
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                if r <= tiny || r <= 0.5 * f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    if r != 0.0 && r <= 1e-300 {
                        m[p * n + q] = ZERO;
                        m[q * n + p] = ZERO;
                    }
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * gpp + akq * gqp;
                    m[k * n + q] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    m[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                m[p * n + p] = C64::new(app - t * r, 0.0);
                m[q * n + q] = C64::new(aqq + t * r, 0.0);
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * gpp + vkq * gqp;
                        v[k * n + q] = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
        if !rotated {
            let values = (0..n).map(|i| m[i * n + i].re).collect();
            let v = v.map(|d| ComplexMatrix::from_vec(n, n, d).expect("square"));
            return Ok((values, v));
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dimension {n})"
    )))
}

/// Clamp eigenvalues in `[-PSD_CLAMP, 0)` to zero; reject anything lower.
pub(crate) fn clamp_psd(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -PSD_CLAMP {
            return Err(Error::arg(format!(
                "matrix is not positive semidefinite (eigenvalue {v:e})"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// `V · diag(f(λ)) · V†`.
pub(crate) fn spectral_map(eig: &HermitianEig, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (k, &lam) in eig.values.iter().enumerate() {
        let fk = f(lam);
        for i in 0..n {
            scaled[(i, k)] *= fk;
        }
    }
    &scaled * &eig.vectors.adjoint()
}

/// The unique PSD square root.
pub fn matrix_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut eig = hermitian_eig(a)?;
    clamp_psd(&mut eig.values)?;
    Ok(spectral_map(&eig, f64::sqrt))
}

/// Singular value decomposition from the eigendecomposition of `A†A`.
///
/// Left singular vectors for the numerically nonzero singular values are
/// `A v_i / s_i`; the rest of `U` is completed by Gram–Schmidt against the
/// standard basis.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let ata = &a.adjoint() * a;
    let eig = hermitian_eig(&ata)?;
    let p = m.min(n);
    let s: Vec<f64> = eig.values[..p].iter().map(|&l| l.max(0.0).sqrt()).collect();
    let s_max = s.first().copied().unwrap_or(0.0);
    let v = eig.vectors;

    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m);
    for (i, &si) in s.iter().enumerate() {
        if si <= s_max * 1e-10 || si == 0.0 {
            break;
        }
        let av = a.matvec(&v.column(i))?;
        let u: Vec<C64> = av.iter().map(|z| z / si).collect();
        if let Some(u) = orthonormalize_against(&cols, u) {
            cols.push(u);
        } else {
            break;
        }
    }
    complete_basis(&mut cols, m);
    Ok(Svd {
        u: ComplexMatrix::from_columns(&cols)?,
        s,
        v,
    })
}

/// Project `x` off `basis` (twice, for stability) and normalize; `None` if
/// nothing substantial remains.
pub(crate) fn orthonormalize_against(basis: &[Vec<C64>], mut x: Vec<C64>) -> Option<Vec<C64>> {
    let before = norm(&x);
    if before == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let proj: C64 = b.iter().zip(&x).map(|(bi, xi)| bi.conj() * xi).sum();
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= proj * bi;
            }
        }
    }
    let after = norm(&x);
    if after <= 1e-6 * before {
        return None;
    }
    for xi in x.iter_mut() {
        *xi /= after;
    }
    Some(x)
}

/// Extend an orthonormal list to a basis of `C^dim`.
pub(crate) fn complete_basis(cols: &mut Vec<Vec<C64>>, dim: usize) {
    let mut j = 0;
    while cols.len() < dim && j < dim {
        let mut e = vec![ZERO; dim];
        e[j] = ONE;
        if let Some(u) = orthonormalize_against(cols, e) {
            cols.push(u);
        }
        j += 1;
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
