use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::arg(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::arg("ragged rows"));
        }
        Ok(ComplexMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Real-valued matrix from row slices. Panics on ragged input; intended for
    /// literals.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        ComplexMatrix {
            rows: rows.len(),
            cols,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
                .collect(),
        }
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` (no normalization applied).
    pub fn outer(psi: &[C64]) -> Self {
        let n = psi.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::arg("columns of unequal length"));
        }
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_column(j, c);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j])
            .collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, &x) in v.iter().enumerate().take(self.rows) {
            self.data[i * self.cols + j] = x;
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Checked product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::arg(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * p..(k + 1) * p];
                for (o, &b) in row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexMatrix {
            rows: n,
            cols: p,
            data: out,
        })
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::arg(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        let mut m = self.clone();
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        for i in 0..n {
            for j in i..n {
                if (self.data[i * n + j] - self.data[j * n + i].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        // Column inner products, without forming U†U explicitly.
        for a in 0..n {
            for b in a..n {
                let mut s = ZERO;
                for i in 0..n {
                    s += self.data[i * n + a].conj() * self.data[i * n + b];
                }
                let target = if a == b { ONE } else { ZERO };
                if (s - target).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Hermitian, unit trace and positive semidefinite, each within `tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        match super::eig::eigenvalues_hermitian(&self.hermitian_part()) {
            Ok(vals) => vals.last().is_none_or(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    pub(crate) fn check_square(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::arg(format!(
                "{what} must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::arg(format!(
                "dimension mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub(crate) fn check_density(&self, what: &str, tol: f64) -> Result<()> {
        if !self.is_density(tol) {
            return Err(Error::arg(format!("{what} is not a density matrix")));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "shape mismatch: {}x{} vs {}x{}",
        a.rows,
        a.cols,
        b.rows,
        b.cols
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::check_same_shape`] first when
/// shapes come from user input.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Panics on inner-dimension mismatch.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        match self.matmul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self.data[i * self.cols + j];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Normalized pure state on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

/// Normalization slack accepted by [`StateVector::new`].
pub const NORM_TOL: f64 = 1e-9;

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::arg(format!(
                "state dimension {} is not a power of two",
                amps.len()
            )));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::arg(format!("state has squared norm {norm2}, not 1")));
        }
        Ok(StateVector { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::arg("cannot normalize a zero vector"));
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        debug_assert!(amps.len().is_power_of_two());
        StateVector { amps }
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps)
    }
}

impl Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.amps[i]
    }
}
