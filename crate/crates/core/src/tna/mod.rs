//! Trace norm approximation through the characteristic polynomial.
//!
//! For a square `X` the route is: form `Y = XX†`, compute `det(λI − Y)` by
//! Faddeev–LeVerrier, find its roots by Aberth iteration and return
//! `½ Σ √λ_j`. Everything runs in double-double with running error bounds,
//! so [`tna`] either meets the requested `2^-k` or says it cannot.
//!
//! Faddeev–LeVerrier loses accuracy quickly as the side grows, so inputs are
//! capped at [`MAX_SIDE`]. Clustered spectra (repeated singular values) give
//! wide root enclosures and therefore [`Error::Precision`] at high `k`.

mod poly;
mod sturm;

pub use poly::{poly_roots, CharPoly, RootEnclosure, MAX_PRECISION_BITS};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{trace_norm, ComplexMatrix};
use poly::{abs_dd, dd, enclose_roots, gamma, sqrt_dd, Cdd, Dd, DD_EPS};
use sturm::Tridiagonal;

/// Largest accepted matrix side.
pub const MAX_SIDE: usize = 64;
/// Hermiticity slack accepted by [`char_poly`].
pub const HERMITIAN_TOL: f64 = 1e-9;

/// How [`trace_norm_approx`] computes the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TnaMethod {
    /// Characteristic polynomial and its roots, with a certified bound.
    CharPoly,
    /// Hermitian eigendecomposition of `XX†`.
    Eig,
}

impl std::str::FromStr for TnaMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "charpoly" => Ok(TnaMethod::CharPoly),
            "eig" => Ok(TnaMethod::Eig),
            _ => Err(Error::arg(format!(
                "unknown method `{s}` (expected charpoly or eig)"
            ))),
        }
    }
}

/// A trace norm value and the bound it was certified to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TnaResult {
    pub value: f64,
    /// `|value − ‖X‖tr|` is at most this. For the eigendecomposition route
    /// it is a heuristic `n·ε·‖X‖` estimate, not a proof.
    pub error_bound: f64,
}

fn check_side(x: &ComplexMatrix) -> Result<usize> {
    if !x.is_square() {
        return Err(Error::arg(format!(
            "matrix must be square, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.rows();
    if n > MAX_SIDE {
        return Err(Error::Capacity {
            what: "trace-norm approximation matrix side",
            requested: n,
            limit: MAX_SIDE,
        });
    }
    if x.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::arg("matrix entries must be finite"));
    }
    Ok(n)
}

fn check_bits(k: u32) -> Result<()> {
    if k > MAX_PRECISION_BITS {
        return Err(Error::Precision {
            requested: k,
            bound: (-(MAX_PRECISION_BITS as f64)).exp2(),
        });
    }
    Ok(())
}

/// Hermitian matrix in double-double, row-major, with its ∞-norm.
struct DdMatrix {
    n: usize,
    a: Vec<Cdd>,
}

impl DdMatrix {
    fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| abs_dd(self.a[i * self.n + j]))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn scale_pow2(&mut self, s: f64) {
        let f = dd(s);
        for z in &mut self.a {
            *z = Complex::new(z.re * f, z.im * f);
        }
    }
}

fn power_of_two_at_least(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        x.log2().ceil().exp2()
    }
}

/// Faddeev–LeVerrier on `A` with `‖A‖∞ ≤ 1`. Coefficient errors follow the
/// recurrence `M_k = A M_{k−1} + c_{n−k+1} I`, `c_{n−k} = −tr(A M_k)/k`.
fn faddeev_leverrier(a: &DdMatrix) -> (Vec<Dd>, Vec<f64>) {
    let n = a.n;
    let zero = Complex::new(dd(0.0), dd(0.0));
    let na = a.inf_norm();
    let g_mul = gamma(n);
    let g_tr = gamma(n * n);
    let mut coeffs = vec![dd(0.0); n + 1];
    let mut errors = vec![0.0; n + 1];
    coeffs[n] = dd(1.0);
    let mut m = vec![zero; n * n];
    let mut m_norm = 0.0;
    let mut e_m = 0.0;
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![zero; n * n];
        if k > 1 {
            for i in 0..n {
                for l in 0..n {
                    let ail = a.a[i * n + l];
                    if ail == zero {
                        continue;
                    }
                    for j in 0..n {
                        next[i * n + j] += ail * m[l * n + j];
                    }
                }
            }
        }
        let c_prev = coeffs[n - k + 1];
        for i in 0..n {
            next[i * n + i] += Complex::new(c_prev, dd(0.0));
        }
        if k > 1 {
            e_m = na * e_m + errors[n - k + 1] + g_mul * na * m_norm;
        }
        m = next;
        m_norm = (0..n)
            .map(|i| (0..n).map(|j| abs_dd(m[i * n + j])).sum::<f64>())
            .fold(0.0, f64::max);
        // tr(A M_k)
        let mut tr = zero;
        for i in 0..n {
            for l in 0..n {
                tr += a.a[i * n + l] * m[l * n + i];
            }
        }
        let c = -tr.re / k as f64;
        coeffs[n - k] = c;
        let kf = k as f64;
        errors[n - k] =
            (n as f64 * na * e_m + g_tr * n as f64 * na * m_norm) / kf + DD_EPS * c.hi().abs();
    }
    (coeffs, errors)
}

/// `det(λI − Y)` for Hermitian `Y`, computed on `Y / 2^e` and rescaled.
fn hermitian_char_poly(mut y: DdMatrix) -> CharPoly {
    let n = y.n;
    let s = power_of_two_at_least(y.inf_norm());
    y.scale_pow2(1.0 / s);
    let (coeffs, errors) = faddeev_leverrier(&y);
    let spectrum = Tridiagonal::reduce(&y.a, n).scaled(s);
    // c_i of Y is s^(n−i) times c_i of Y/s
    let coeffs = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| *c * dd(s).powi((n - i) as i32))
        .collect();
    let errors = errors
        .iter()
        .enumerate()
        .map(|(i, e)| e * s.powi((n - i) as i32))
        .collect();
    CharPoly::from_parts(coeffs, errors, Some(spectrum))
}

fn hermitian_dd(y: &ComplexMatrix) -> DdMatrix {
    let n = y.rows();
    let mut a = vec![Complex::new(dd(0.0), dd(0.0)); n * n];
    for i in 0..n {
        a[i * n + i] = Complex::new(dd(y[(i, i)].re), dd(0.0));
        for j in i + 1..n {
            let (u, w) = (y[(i, j)], y[(j, i)]);
            let re = (dd(u.re) + dd(w.re)) * dd(0.5);
            let im = (dd(u.im) - dd(w.im)) * dd(0.5);
            a[i * n + j] = Complex::new(re, im);
            a[j * n + i] = Complex::new(re, -im);
        }
    }
    DdMatrix { n, a }
}

/// Characteristic polynomial `det(λI − Y)` of a Hermitian matrix.
///
/// The input must be Hermitian within [`HERMITIAN_TOL`]; its Hermitian part
/// is used, which makes every coefficient real.
pub fn char_poly(y: &ComplexMatrix) -> Result<CharPoly> {
    let n = check_side(y)?;
    let scale = y.max_abs().max(1.0);
    if !y.is_hermitian(HERMITIAN_TOL * scale) {
        return Err(Error::Precondition(
            "characteristic polynomial needs a Hermitian matrix".into(),
        ));
    }
    if n == 0 {
        return CharPoly::from_coeffs(&[1.0]);
    }
    Ok(hermitian_char_poly(hermitian_dd(y)))
}

/// `Y = XX†` in double-double, exactly Hermitian, with a bound on
/// `‖Y_true − Y‖₂`.
fn gram(x: &ComplexMatrix) -> (DdMatrix, f64) {
    let n = x.rows();
    let mut a = vec![Complex::new(dd(0.0), dd(0.0)); n * n];
    let to = |z: crate::linalg::C64| Complex::new(dd(z.re), dd(z.im));
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex::new(dd(0.0), dd(0.0));
            for l in 0..n {
                acc += to(x[(i, l)]) * to(x[(j, l)].conj());
            }
            if i == j {
                acc.im = dd(0.0);
            }
            a[i * n + j] = acc;
            a[j * n + i] = Complex::new(acc.re, -acc.im);
        }
    }
    let row = |i: usize| (0..n).map(|l| x[(i, l)].norm()).sum::<f64>();
    let col = |l: usize| (0..n).map(|i| x[(i, l)].norm()).sum::<f64>();
    let inf = (0..n).map(row).fold(0.0, f64::max);
    let one = (0..n).map(col).fold(0.0, f64::max);
    (DdMatrix { n, a }, gamma(2 * n) * inf * one)
}

/// Trace norm `½ tr √(X†X)` within `2^-k`, through the characteristic
/// polynomial of `XX†`. Fails with [`Error::Precision`] when the certified
/// bound does not reach `2^-k`.
pub fn tna(x: &ComplexMatrix, k: u32) -> Result<f64> {
    Ok(tna_certified(x, k)?.value)
}

/// [`tna`] with the certified error bound.
pub fn tna_certified(x: &ComplexMatrix, k: u32) -> Result<TnaResult> {
    check_bits(k)?;
    let n = check_side(x)?;
    if n == 0 {
        return Ok(TnaResult {
            value: 0.0,
            error_bound: 0.0,
        });
    }
    let (y, gram_err) = gram(x);
    let p = hermitian_char_poly(y);
    let enc = enclose_roots(&p)?;
    let mut sum = dd(0.0);
    let mut err = 0.0;
    for (&lam, &rho) in enc.roots.iter().zip(&enc.radii) {
        // Y is positive semidefinite, so the matched eigenvalue is in
        // [max(λ − ρ, 0), λ + ρ]
        let lam = lam.max(0.0);
        let rho = rho + gram_err;
        let root = sqrt_dd(dd(lam));
        let r = root.hi();
        // √ moves further going down, so bound √λ − √(λ − ρ) without
        // cancellation
        err += if lam >= rho {
            rho / (r + (lam - rho).sqrt())
        } else {
            r.max((lam + rho).sqrt() - r)
        } * (1.0 + 4.0 * f64::EPSILON);
        sum += root;
    }
    let value = (sum * dd(0.5)).hi();
    let bound = 0.5 * err + f64::EPSILON * value;
    let target = (-(k as f64)).exp2();
    if bound.is_nan() || bound >= target {
        return Err(Error::Precision {
            requested: k,
            bound,
        });
    }
    Ok(TnaResult {
        value,
        error_bound: bound,
    })
}

/// Trace norm by either route. The `Eig` route ignores `k` beyond the
/// [`MAX_PRECISION_BITS`] check.
pub fn trace_norm_approx(x: &ComplexMatrix, k: u32, method: TnaMethod) -> Result<TnaResult> {
    match method {
        TnaMethod::CharPoly => tna_certified(x, k),
        TnaMethod::Eig => {
            check_bits(k)?;
            let n = check_side(x)?;
            let value = trace_norm(x)?;
            Ok(TnaResult {
                value,
                error_bound: 16.0 * n.max(1) as f64 * f64::EPSILON * x.frobenius_norm().max(value),
            })
        }
    }
}
