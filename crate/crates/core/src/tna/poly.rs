//! Monic real polynomials in double-double and their certified roots.

use num_complex::Complex;
use twofloat::TwoFloat;

use super::sturm::Tridiagonal;
use crate::error::{Error, Result};

pub(crate) type Dd = TwoFloat;
pub(crate) type Cdd = Complex<TwoFloat>;

/// Unit roundoff assumed for double-double arithmetic. TwoFloat carries
/// about 106 bits but its operations are not correctly rounded, so the
/// bounds use a few bits of margin.
pub(crate) const DD_EPS: f64 = 1.0 / (1u128 << 100) as f64;
/// Largest accepted precision request, in bits.
pub const MAX_PRECISION_BITS: u32 = 40;
const ABERTH_MAX_ITERS: usize = 2000;

pub(crate) fn gamma(n: usize) -> f64 {
    4.0 * (n as f64 + 2.0) * DD_EPS
}

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

fn cdd(re: f64, im: f64) -> Cdd {
    Complex::new(dd(re), dd(im))
}

/// `a / b` by two steps of long division. TwoFloat's own quotient of two
/// double-doubles forms its residual without a fused multiply-add and is only
/// accurate to about double precision.
pub(crate) fn ddiv(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    dd(q1) + dd(q2) + dd(q3)
}

pub(crate) fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let n2 = b.re * b.re + b.im * b.im;
    let num = a * b.conj();
    Complex::new(ddiv(num.re, n2), ddiv(num.im, n2))
}

pub(crate) fn cdd_zero() -> Cdd {
    Complex::new(dd(0.0), dd(0.0))
}

/// Square root with one Newton correction in double-double.
pub(crate) fn sqrt_dd(x: Dd) -> Dd {
    if x.hi() <= 0.0 {
        return dd(0.0);
    }
    let s = x.hi().sqrt();
    let r = x - TwoFloat::new_mul(s, s);
    dd(s) + r / (2.0 * s)
}

pub(crate) fn abs_dd(z: Cdd) -> f64 {
    let n2 = z.re * z.re + z.im * z.im;
    n2.hi().max(0.0).sqrt()
}

/// `det(λI − Y)` as `c_0 + c_1 λ + … + λ^n`, each coefficient with an
/// a priori absolute error bound.
///
/// The a priori bounds grow roughly like `4^n` and are far above the actual
/// errors for most inputs. A polynomial built from a matrix therefore keeps
/// a tridiagonal reduction of it, and root enclosures are certified against
/// that instead.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    coeffs: Vec<Dd>,
    errors: Vec<f64>,
    spectrum: Option<Tridiagonal>,
}

impl CharPoly {
    /// Exact monic polynomial from `c_0..c_n`.
    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self> {
        match coeffs.last() {
            Some(1.0) => {}
            _ => return Err(Error::arg("polynomial must be monic with c_n = 1")),
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::arg("coefficients must be finite"));
        }
        Ok(CharPoly {
            coeffs: coeffs.iter().map(|&c| dd(c)).collect(),
            errors: vec![0.0; coeffs.len()],
            spectrum: None,
        })
    }

    pub(crate) fn from_parts(
        coeffs: Vec<Dd>,
        errors: Vec<f64>,
        spectrum: Option<Tridiagonal>,
    ) -> Self {
        CharPoly {
            coeffs,
            errors,
            spectrum,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c_0..c_n` rounded to double.
    pub fn coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.hi() + c.lo()).collect()
    }

    pub fn coeffs_dd(&self) -> &[TwoFloat] {
        &self.coeffs
    }

    /// Absolute error bound on each coefficient.
    pub fn error_bounds(&self) -> &[f64] {
        &self.errors
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = dd(0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * dd(x) + *c;
        }
        acc.hi()
    }

    /// `p(z)` and `p'(z)` by Horner.
    fn eval_with_derivative(&self, z: Cdd) -> (Cdd, Cdd) {
        let mut p = cdd(0.0, 0.0);
        let mut dp = cdd(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + Complex::new(*c, dd(0.0));
        }
        (p, dp)
    }

    /// Bound on `|p_true(z) − p̂(z)|` from coefficient errors and Horner
    /// rounding.
    fn eval_error(&self, z: f64) -> f64 {
        let mut pow = 1.0;
        let mut err = 0.0;
        for e in &self.errors {
            err += e * pow;
            pow *= z;
        }
        err + self.rounding_noise(z)
    }

    /// Horner rounding alone: the level below which `|p̂(z)|` carries no
    /// information about the computed coefficients.
    fn rounding_noise(&self, z: f64) -> f64 {
        let n = self.degree();
        let mut pow = 1.0;
        let mut err = 0.0;
        for c in &self.coeffs {
            err += gamma(2 * n) * c.hi().abs() * pow;
            pow *= z;
        }
        err
    }
}

/// Root approximations with inclusion radii.
#[derive(Clone, Debug)]
pub struct RootEnclosure {
    /// Real parts of the approximations, ascending.
    pub roots: Vec<f64>,
    /// Each true root is within `radii[i]` of `roots[i]` (matched within
    /// clusters).
    pub radii: Vec<f64>,
    pub iterations: usize,
}

/// Fujiwara's bound on the root moduli.
fn root_bound(p: &CharPoly) -> f64 {
    let n = p.degree();
    let c = p.coeffs();
    let mut b: f64 = 0.0;
    for i in 1..=n {
        let mut v = c[n - i].abs();
        if i == n {
            v /= 2.0;
        }
        b = b.max(v.powf(1.0 / i as f64));
    }
    (2.0 * b).max(f64::MIN_POSITIVE)
}

/// Aberth iteration from points on a circle of radius equal to the root
/// bound. A point stops moving once `|p̂(z)|` is within the Horner rounding
/// noise or its correction falls below `tol`; inside a cluster of roots that
/// is as far as the computed coefficients can resolve.
fn aberth(p: &CharPoly, tol: f64) -> Result<(Vec<Cdd>, usize)> {
    let n = p.degree();
    let r = root_bound(p);
    let mut z: Vec<Cdd> = (0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * j as f64 / n as f64 + 0.4;
            cdd(r * t.cos(), r * t.sin())
        })
        .collect();
    let mut done = vec![false; n];
    let one = cdd(1.0, 0.0);
    for it in 1..=ABERTH_MAX_ITERS {
        for j in 0..n {
            if done[j] {
                continue;
            }
            let (pv, dpv) = p.eval_with_derivative(z[j]);
            if abs_dd(pv) <= 4.0 * p.rounding_noise(abs_dd(z[j])) {
                done[j] = true;
                continue;
            }
            let w = cdiv(pv, dpv);
            let mut s = cdd(0.0, 0.0);
            for (i, zi) in z.iter().enumerate() {
                if i != j {
                    s += cdiv(one, z[j] - *zi);
                }
            }
            let corr = cdiv(w, one - w * s);
            let a = abs_dd(corr);
            if !a.is_finite() {
                return Err(Error::Numeric("root iteration diverged".into()));
            }
            z[j] -= corr;
            if a <= tol {
                done[j] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok((z, it));
        }
    }
    Err(Error::Numeric(format!(
        "root iteration did not settle within {ABERTH_MAX_ITERS} steps"
    )))
}

/// Weierstrass inclusion radii `n |W_j|`, merged over overlapping disks so
/// each radius covers the root matched to that approximation.
fn inclusion(p: &CharPoly, z: &[Cdd]) -> Vec<f64> {
    let n = z.len();
    // coincident approximations make the products vanish; spread them first
    let tiny = 1e-26 * root_bound(p).max(1.0);
    let orig = z;
    let mut z = z.to_vec();
    for j in 1..n {
        while (0..j).any(|i| abs_dd(z[j] - z[i]) < tiny) {
            let t = j as f64 * 2.399963;
            z[j] += cdd(tiny * t.cos(), tiny * t.sin());
        }
    }
    let mut radius = vec![f64::INFINITY; n];
    for j in 0..n {
        let (pv, _) = p.eval_with_derivative(z[j]);
        let mut denom = 1.0;
        for (i, zi) in z.iter().enumerate() {
            if i != j {
                denom *= abs_dd(z[j] - *zi);
            }
        }
        let num = abs_dd(pv) + p.eval_error(abs_dd(z[j]));
        radius[j] = n as f64 * num / denom;
        if !radius[j].is_finite() {
            radius[j] = f64::INFINITY;
        }
    }
    // connected components of the disk union
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for a in 0..n {
        for b in a + 1..n {
            if abs_dd(z[a] - z[b]) <= radius[a] + radius[b] {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra] = rb;
            }
        }
    }
    let mut out = vec![0.0f64; n];
    for j in 0..n {
        let cj = find(&mut comp, j);
        let mut reach: f64 = radius[j];
        for i in 0..n {
            if find(&mut comp, i) == cj {
                reach = reach.max(abs_dd(z[j] - z[i]) + radius[i]);
            }
        }
        out[j] = reach + abs_dd(z[j] - orig[j]);
    }
    out
}

/// Approximations and radii, with iteration down to double-double level.
pub(crate) fn enclose_roots(p: &CharPoly) -> Result<RootEnclosure> {
    let n = p.degree();
    if n == 0 {
        return Ok(RootEnclosure {
            roots: vec![],
            radii: vec![],
            iterations: 0,
        });
    }
    let scale = root_bound(p).max(1.0);
    let (z, iterations) = aberth(p, 1e-30 * scale)?;
    let radii = inclusion(p, &z);
    let mut pairs: Vec<(f64, f64)> = z
        .iter()
        .zip(&radii)
        .map(|(zi, &r)| {
            let re = zi.re.hi() + zi.re.lo();
            // the rounding to double counts against the radius
            (re, r + (zi.re - dd(re)).hi().abs())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let roots: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut radii: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    // each set of radii comes with its own matching, so take one whole
    if let Some(certified) = p.spectrum.as_ref().and_then(|t| t.certify(&roots)) {
        if certified.iter().sum::<f64>() < radii.iter().sum::<f64>() {
            radii = certified;
        }
    }
    Ok(RootEnclosure {
        roots,
        radii,
        iterations,
    })
}

/// The roots of a monic polynomial with real, nonnegative roots, each within
/// `2^-k` of a true root. Values in `[−2^-k, 0)` are clamped to 0.
pub fn poly_roots(p: &CharPoly, k: u32) -> Result<Vec<f64>> {
    if k > MAX_PRECISION_BITS {
        return Err(Error::Precision {
            requested: k,
            bound: (-(MAX_PRECISION_BITS as f64)).exp2(),
        });
    }
    let target = (-(k as f64)).exp2();
    let enc = enclose_roots(p)?;
    let worst = enc.radii.iter().cloned().fold(0.0, f64::max);
    if worst >= target {
        return Err(Error::Precision {
            requested: k,
            bound: worst,
        });
    }
    let mut out = Vec::with_capacity(enc.roots.len());
    for r in enc.roots {
        if r < -target {
            return Err(Error::arg(format!("root {r} is negative")));
        }
        out.push(r.max(0.0));
    }
    Ok(out)
}
