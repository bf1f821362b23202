//! A posteriori checks of characteristic-polynomial roots by inertia counts.
//!
//! The matrix is reduced to a real-diagonal Hermitian tridiagonal `T` in
//! double-double. A Sturm count at `t` gives the number of eigenvalues below
//! `t` of a matrix within `δ` of `T`, so the count difference over an
//! interval widened by `δ` is a lower bound on the eigenvalues it holds. When
//! the intervals around the root approximations are disjoint and their lower
//! bounds add up to `n`, every interval holds exactly as many eigenvalues as
//! approximations.

use num_complex::Complex;

use super::poly::{abs_dd, cdd_zero, dd, ddiv, sqrt_dd, Cdd, Dd, DD_EPS};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Tridiagonal {
    diag: Vec<Dd>,
    /// `|e_i|²` for the off-diagonal entries.
    off2: Vec<Dd>,
    /// Distance from the spectrum the counts describe to the true one,
    /// before the per-count rounding term.
    delta: f64,
}

impl Tridiagonal {
    /// Householder reduction of the row-major Hermitian `a` (side `n`).
    pub(crate) fn reduce(a: &[Cdd], n: usize) -> Self {
        let mut a = a.to_vec();
        let fro: f64 = a.iter().map(|z| abs_dd(*z).powi(2)).sum::<f64>().sqrt();
        let mut off2 = Vec::with_capacity(n.saturating_sub(1));
        for j in 0..n.saturating_sub(1) {
            let x: Vec<Cdd> = (j + 1..n).map(|i| a[i * n + j]).collect();
            let norm2 = x.iter().fold(dd(0.0), |s, z| s + z.re * z.re + z.im * z.im);
            if norm2.hi() == 0.0 {
                off2.push(dd(0.0));
                continue;
            }
            let alpha = sqrt_dd(norm2);
            let x0 = x[0];
            let r0 = abs_dd(x0);
            let phase = if r0 == 0.0 {
                Complex::new(dd(1.0), dd(0.0))
            } else {
                let m = sqrt_dd(x0.re * x0.re + x0.im * x0.im);
                Complex::new(ddiv(x0.re, m), ddiv(x0.im, m))
            };
            // v = x + phase·α·e1, H = I − β v v†
            let mut v = x;
            v[0] += phase * Complex::new(alpha, dd(0.0));
            let vnorm2 = v.iter().fold(dd(0.0), |s, z| s + z.re * z.re + z.im * z.im);
            let beta = ddiv(dd(2.0), vnorm2);
            let m = n - j - 1;
            // w = β A₂₂ v on the trailing block
            let mut w = vec![cdd_zero(); m];
            for (r, wr) in w.iter_mut().enumerate() {
                let mut s = cdd_zero();
                for (c, vc) in v.iter().enumerate() {
                    s += a[(j + 1 + r) * n + j + 1 + c] * *vc;
                }
                *wr = s * Complex::new(beta, dd(0.0));
            }
            // q = w − (β/2)(v†w) v
            let mut vw = cdd_zero();
            for (vc, wc) in v.iter().zip(&w) {
                vw += vc.conj() * *wc;
            }
            let k = vw * Complex::new(beta * dd(0.5), dd(0.0));
            let q: Vec<Cdd> = w.iter().zip(&v).map(|(wc, vc)| *wc - k * *vc).collect();
            for r in 0..m {
                for c in 0..m {
                    let idx = (j + 1 + r) * n + j + 1 + c;
                    a[idx] = a[idx] - v[r] * q[c].conj() - q[r] * v[c].conj();
                }
            }
            off2.push(norm2);
        }
        let diag = (0..n).map(|i| a[i * n + i].re).collect();
        let n2 = (n * n) as f64;
        Tridiagonal {
            diag,
            off2,
            delta: 64.0 * n2.max(1.0) * DD_EPS * fro,
        }
    }

    /// The same reduction for `s·A`, `s` a power of two.
    pub(crate) fn scaled(&self, s: f64) -> Self {
        Tridiagonal {
            diag: self.diag.iter().map(|d| *d * s).collect(),
            off2: self.off2.iter().map(|e| *e * (s * s)).collect(),
            delta: self.delta * s,
        }
    }

    fn norm_inf(&self) -> f64 {
        let n = self.diag.len();
        let e: Vec<f64> = self.off2.iter().map(|b| b.hi().max(0.0).sqrt()).collect();
        (0..n)
            .map(|i| {
                self.diag[i].hi().abs()
                    + if i > 0 { e[i - 1] } else { 0.0 }
                    + e.get(i).copied().unwrap_or(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvalues below `t` of a matrix within `slack(t)` of this one.
    fn count_below(&self, t: f64) -> usize {
        let pivmin = (DD_EPS * DD_EPS * self.norm_inf()).max(f64::MIN_POSITIVE);
        let mut count = 0;
        let mut q = dd(0.0);
        for (i, d) in self.diag.iter().enumerate() {
            let mut next = *d - dd(t);
            if i > 0 {
                next -= ddiv(self.off2[i - 1], q);
            }
            if next.hi().abs() < pivmin {
                next = dd(-pivmin);
            }
            if next.hi() < 0.0 {
                count += 1;
            }
            q = next;
        }
        count
    }

    fn slack(&self, t: f64) -> f64 {
        self.delta + 16.0 * DD_EPS * (t.abs() + self.norm_inf())
    }

    /// Radii around the sorted `roots` such that the true eigenvalues can be
    /// matched one to one within them, or `None` if no radius up to the
    /// spectral spread works.
    pub(crate) fn certify(&self, roots: &[f64]) -> Option<Vec<f64>> {
        let n = roots.len();
        if n != self.diag.len() {
            return None;
        }
        if n == 0 {
            return Some(vec![]);
        }
        let norm = self.norm_inf().max(f64::MIN_POSITIVE);
        let mut rho = DD_EPS * norm;
        while rho <= 4.0 * norm {
            if let Some(r) = self.try_radius(roots, rho) {
                return Some(r);
            }
            rho *= 4.0;
        }
        None
    }

    fn try_radius(&self, roots: &[f64], rho: f64) -> Option<Vec<f64>> {
        let n = roots.len();
        let far = roots[n - 1].abs() + rho;
        let gap = 2.0 * self.slack(far);
        // clusters of indices whose widened intervals touch
        let mut clusters: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            if i == n || roots[i] - rho > roots[i - 1] + rho + gap {
                clusters.push((start, i));
                start = i;
            }
        }
        let mut radii = vec![0.0; n];
        let mut total = 0;
        for &(lo, hi) in &clusters {
            let a = roots[lo] - rho;
            let b = roots[hi - 1] + rho;
            let found = self.count_below(b).saturating_sub(self.count_below(a));
            if found < hi - lo {
                return None;
            }
            total += found;
            let (a, b) = (a - self.slack(a), b + self.slack(b));
            for j in lo..hi {
                radii[j] = (roots[j] - a).max(b - roots[j]);
            }
        }
        (total == n).then_some(radii)
    }
}
