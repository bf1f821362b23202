//! Tensor products and partial traces.

use super::matrix::{ComplexMatrix, ZERO};
use crate::capacity::DEFAULT_MAX_SIDE;
use crate::error::{Error, Result};

/// Kronecker product, `a`'s indices major, limited to sides of
/// [`DEFAULT_MAX_SIDE`].
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_with_limit(a, b, DEFAULT_MAX_SIDE)
}

pub fn tensor_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_side: usize,
) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= max_side && c <= max_side => (r, c),
        (r, c) => {
            return Err(Error::Capacity {
                what: "tensor product side",
                requested: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
                limit: max_side,
            })
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (br, bc) = (b.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of a list, left to right.
pub fn tensor_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1);
    for f in factors {
        acc = tensor(&acc, f)?;
    }
    Ok(acc)
}

/// `ρ^{⊗s}`.
pub fn tensor_power(a: &ComplexMatrix, s: usize) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1);
    for _ in 0..s {
        acc = tensor(&acc, a)?;
    }
    Ok(acc)
}

/// Trace out every subsystem not listed in `keep`. Subsystem 0 is the most
/// significant; kept subsystems stay in ascending order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    rho.check_square("partial-trace argument")?;
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::arg("subsystem dimensions overflow"))?;
    if dims.contains(&0) || total != rho.rows() {
        return Err(Error::arg(format!(
            "subsystem dimensions {dims:?} do not match matrix side {}",
            rho.rows()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(Error::arg(format!(
            "keep set {keep:?} is invalid for {} subsystems",
            dims.len()
        )));
    }
    let is_kept: Vec<bool> = (0..dims.len()).map(|i| kept.contains(&i)).collect();
    let d_keep: usize = kept.iter().map(|&k| dims[k]).product();
    let d_trace = total / d_keep;

    // positions[t * d_keep + a] = full index with kept digits a, traced digits t.
    let mut positions = vec![0usize; total];
    for full in 0..total {
        let (mut a, mut t, mut rem) = (0usize, 0usize, full);
        let mut digits = vec![0usize; dims.len()];
        for s in (0..dims.len()).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        for (s, &dig) in digits.iter().enumerate() {
            if is_kept[s] {
                a = a * dims[s] + dig;
            } else {
                t = t * dims[s] + dig;
            }
        }
        positions[t * d_keep + a] = full;
    }
    let mut out = ComplexMatrix::zeros(d_keep, d_keep);
    for t in 0..d_trace {
        let pos = &positions[t * d_keep..(t + 1) * d_keep];
        for (a, &ia) in pos.iter().enumerate() {
            for (b, &ib) in pos.iter().enumerate() {
                out[(a, b)] += rho[(ia, ib)];
            }
        }
    }
    Ok(out)
}

/// Partial trace over qubits, keeping those in `keep`.
pub fn partial_trace_qubits(rho: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    if !rho.rows().is_power_of_two() {
        return Err(Error::arg("matrix side is not a power of two"));
    }
    let n = rho.rows().trailing_zeros() as usize;
    partial_trace(rho, &vec![2; n], keep)
}

/// Reorder the qubits of a `2^n`-dimensional operator: qubit `i` of the result
/// is qubit `order[i]` of the input.
pub fn permute_qubits(rho: &ComplexMatrix, order: &[usize]) -> Result<ComplexMatrix> {
    rho.check_square("permutation argument")?;
    let n = order.len();
    if rho.rows() != 1 << n {
        return Err(Error::arg("permutation length does not match qubit count"));
    }
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || std::mem::replace(&mut seen[o], true) {
            return Err(Error::arg(format!("{order:?} is not a permutation")));
        }
    }
    let map: Vec<usize> = (0..1usize << n)
        .map(|idx| {
            let mut src = 0;
            for (i, &o) in order.iter().enumerate() {
                let bit = (idx >> (n - 1 - i)) & 1;
                src |= bit << (n - 1 - o);
            }
            src
        })
        .collect();
    let dim = 1 << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = rho[(map[i], map[j])];
        }
    }
    Ok(out)
}
