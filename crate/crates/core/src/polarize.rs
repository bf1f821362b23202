//! Polarization: XOR, tensor-power amplification and their composition, both
//! as circuit-to-circuit transforms and on density matrices directly.
//!
//! With input distance `d`, the XOR transform with `r` blocks yields distance
//! exactly `d^r`, and `s`-fold amplification yields a distance in
//! `[1 − (1 − d²)^{s/2}, min(1, s·d)]`. Running XOR(`r`), then amplification
//! (`s`), then XOR(`n`) pushes far pairs towards distance 1 and close pairs
//! towards 0.
//!
//! Classical random choices are realized with coherent controls on ancillas
//! that are never outputs. Tracing the ancillas out turns the superposition
//! over choices into the corresponding classical mixture, so the prepared
//! states are exactly the sampled ones.

use crate::capacity::{Capacity, DEFAULT_MAX_SIDE};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{tensor_with_limit, ComplexMatrix};

/// Cap on `s` when it is derived with `α = 0`, where the formula diverges.
pub const DEFAULT_S_MAX: usize = 1_000_000;

/// Slack against rounding when the derived `r` and `s` land on an integer.
const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationParams {
    pub n: usize,
    pub r: usize,
    pub s: usize,
    /// Thresholds the parameters were derived from, if any.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// `s` was cut down to a configured maximum.
    pub s_capped: bool,
}

impl PolarizationParams {
    /// `r = ⌈ln(8n) / ln(β²/α)⌉`, `s = ⌊α^{−r}/2⌋` (at least 1).
    ///
    /// Requires `0 ≤ α < β² ≤ 1`. With `α = 0` the ratio is infinite, so
    /// `r = 1` and `s` is capped at [`DEFAULT_S_MAX`].
    pub fn derive(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        Self::derive_with_cap(alpha, beta, n, DEFAULT_S_MAX)
    }

    pub fn derive_with_cap(alpha: f64, beta: f64, n: usize, s_max: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n must be at least 1"));
        }
        if !(alpha >= 0.0 && beta > 0.0 && beta <= 1.0) {
            return Err(Error::arg(format!(
                "need 0 <= alpha and 0 < beta <= 1, got alpha={alpha} beta={beta}"
            )));
        }
        if alpha >= beta * beta {
            return Err(Error::arg(format!(
                "alpha >= beta^2 ({alpha} >= {})",
                beta * beta
            )));
        }
        let s_max = s_max.max(1);
        let (r, s, s_capped) = if alpha == 0.0 {
            (1, s_max, true)
        } else {
            let ratio = ((8 * n) as f64).ln() / (beta * beta / alpha).ln();
            let r = ((ratio - ROUNDING_SLACK).ceil() as usize).max(1);
            let raw = (alpha.powi(-(r as i32)) / 2.0 + ROUNDING_SLACK).floor();
            if raw >= s_max as f64 {
                (r, s_max, true)
            } else {
                (r, (raw as usize).max(1), false)
            }
        };
        Ok(PolarizationParams {
            n,
            r,
            s,
            alpha: Some(alpha),
            beta: Some(beta),
            s_capped,
        })
    }

    /// Derived parameters for the closeness test, which polarizes with
    /// `n + 1` so the far side lands within `2^{-(n+1)}` of distance 1.
    pub fn for_closeness(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        Self::derive(alpha, beta, n + 1)
    }

    /// Explicit `(r, s, n)`, all at least 1.
    pub fn with_override(r: usize, s: usize, n: usize) -> Result<Self> {
        if r == 0 || s == 0 || n == 0 {
            return Err(Error::arg(format!(
                "r, s and n must be at least 1, got r={r} s={s} n={n}"
            )));
        }
        Ok(PolarizationParams {
            n,
            r,
            s,
            alpha: None,
            beta: None,
            s_capped: false,
        })
    }

    /// Single comment line recording the parameters, placed at the top of
    /// emitted `.qc` files.
    pub fn to_header(&self) -> String {
        let mut h = format!(
            "# polarization-params n={} r={} s={}",
            self.n, self.r, self.s
        );
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            h.push_str(&format!(" alpha={a} beta={b}"));
        }
        if self.s_capped {
            h.push_str(" s_capped=true");
        }
        h
    }

    /// Recover parameters from the first header line in `text`, if present.
    pub fn from_header(text: &str) -> Result<Option<Self>> {
        let Some(line) = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# polarization-params"))
        else {
            return Ok(None);
        };
        let mut p = PolarizationParams {
            n: 0,
            r: 0,
            s: 0,
            alpha: None,
            beta: None,
            s_capped: false,
        };
        for field in line.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("bad header field `{field}`")))?;
            let bad = || Error::arg(format!("bad value in header field `{field}`"));
            match k {
                "n" => p.n = v.parse().map_err(|_| bad())?,
                "r" => p.r = v.parse().map_err(|_| bad())?,
                "s" => p.s = v.parse().map_err(|_| bad())?,
                "alpha" => p.alpha = Some(v.parse().map_err(|_| bad())?),
                "beta" => p.beta = Some(v.parse().map_err(|_| bad())?),
                "s_capped" => p.s_capped = v.parse().map_err(|_| bad())?,
                _ => return Err(Error::arg(format!("unknown header field `{k}`"))),
            }
        }
        if p.n == 0 || p.r == 0 || p.s == 0 {
            return Err(Error::arg("header must give n, r and s of at least 1"));
        }
        Ok(Some(p))
    }

    /// Width of the circuits [`polarize`] emits for inputs of common width `w`.
    pub fn emitted_width(&self, w: usize) -> usize {
        let after_r = xor_width(w, self.r);
        xor_width(after_r.saturating_mul(self.s), self.n)
    }
}

fn xor_width(w: usize, r: usize) -> usize {
    if r == 1 {
        w
    } else {
        r.saturating_add(r.saturating_mul(w))
    }
}

/// Relabel both circuits so that outputs come first (in order) and the other
/// qubits follow, on the common width `max(w0, w1)`.
pub fn common_layout(q0: &Circuit, q1: &Circuit) -> Result<(Circuit, Circuit)> {
    if q0.num_outputs() != q1.num_outputs() {
        return Err(Error::arg(format!(
            "circuits have {} and {} output qubits",
            q0.num_outputs(),
            q1.num_outputs()
        )));
    }
    let w = q0.width().max(q1.width());
    let place = |c: &Circuit| -> Result<Circuit> {
        let k = c.num_outputs();
        let mut map = vec![0; c.width()];
        for (i, &o) in c.outputs().iter().enumerate() {
            map[o] = i;
        }
        for (j, q) in c.non_outputs().into_iter().enumerate() {
            map[q] = k + j;
        }
        c.relabel(&map, w)
    };
    Ok((place(q0)?, place(q1)?))
}

/// XOR transform with `r` blocks.
///
/// Qubits `0..r−1` are control ancillas, `r−1` holds the parity, and block `i`
/// occupies `r + i·w .. r + (i+1)·w`. Each block runs `Q0` when its control
/// is `|0⟩` and `Q1` when it is `|1⟩`; the parity ancilla is flipped by an
/// extra X in the second circuit, so the first circuit prepares the
/// even-parity mixture and the second the odd one.
pub fn xor_transform(q0: &Circuit, q1: &Circuit, r: usize) -> Result<(Circuit, Circuit)> {
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    let (c0, c1) = common_layout(q0, q1)?;
    if r == 1 {
        return Ok((c0, c1));
    }
    let w = c0.width();
    let k = c0.num_outputs();
    let width = r + r * w;
    let parity = r - 1;

    let build = |flip: bool| -> Result<Circuit> {
        let mut c = Circuit::new(width, Vec::new())?;
        for a in 0..parity {
            c.push(Gate::h(a))?;
            c.push(Gate::cx(a, parity))?;
        }
        if flip {
            c.push(Gate::x(parity))?;
        }
        for i in 0..r {
            let offset = r + i * w;
            let ctrl = if i < parity { i } else { parity };
            let map: Vec<usize> = (offset..offset + w).collect();
            let b0 = c0.relabel(&map, width)?.add_control(ctrl)?;
            let b1 = c1.relabel(&map, width)?.add_control(ctrl)?;
            c.push(Gate::x(ctrl))?;
            c.append(&b0)?;
            c.push(Gate::x(ctrl))?;
            c.append(&b1)?;
        }
        let outputs = (0..r).flat_map(|i| (r + i * w)..(r + i * w + k)).collect();
        c.with_outputs(outputs)
    };
    Ok((build(false)?, build(true)?))
}

/// `s` independent copies of each circuit side by side.
pub fn amplify_transform(q0: &Circuit, q1: &Circuit, s: usize) -> Result<(Circuit, Circuit)> {
    if s == 0 {
        return Err(Error::arg("s must be at least 1"));
    }
    if q0.num_outputs() != q1.num_outputs() {
        return Err(Error::arg("circuits have different output counts"));
    }
    let power = |c: &Circuit| -> Result<Circuit> {
        let mut acc = c.clone();
        for _ in 1..s {
            acc = acc.parallel(c)?;
        }
        Ok(acc)
    };
    Ok((power(q0)?, power(q1)?))
}

/// XOR(`r`), then amplification (`s`), then XOR(`n`).
///
/// Fails with a capacity error before building anything if the emitted width
/// would exceed `cap.max_emit_qubits`.
pub fn polarize(
    q0: &Circuit,
    q1: &Circuit,
    params: &PolarizationParams,
    cap: &Capacity,
) -> Result<(Circuit, Circuit)> {
    let w = q0.width().max(q1.width());
    let width = params.emitted_width(w);
    if width > cap.max_emit_qubits {
        return Err(Error::Capacity {
            what: "polarized circuit width (qubits)",
            requested: width,
            limit: cap.max_emit_qubits,
        });
    }
    let (a0, a1) = xor_transform(q0, q1, params.r)?;
    let (b0, b1) = amplify_transform(&a0, &a1, params.s)?;
    xor_transform(&b0, &b1, params.n)
}

/// XOR transform on density matrices: `ξ_b = 2^{−(r−1)} Σ ρ_{b1}⊗⋯⊗ρ_{br}`
/// over bit strings of parity `b`.
pub fn xor_states(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    r: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    xor_states_with_limit(rho0, rho1, r, DEFAULT_MAX_SIDE)
}

pub fn xor_states_with_limit(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    r: usize,
    max_side: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    rho0.check_same_shape(rho1)?;
    let (mut even, mut odd) = (rho0.clone(), rho1.clone());
    for _ in 1..r {
        let e0 = tensor_with_limit(&even, rho0, max_side)?;
        let o1 = tensor_with_limit(&odd, rho1, max_side)?;
        let e1 = tensor_with_limit(&even, rho1, max_side)?;
        let o0 = tensor_with_limit(&odd, rho0, max_side)?;
        even = (&e0 + &o1).scale_real(0.5);
        odd = (&e1 + &o0).scale_real(0.5);
    }
    Ok((even, odd))
}

/// `(ρ0^{⊗s}, ρ1^{⊗s})`.
pub fn amplify_states(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    s: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    amplify_states_with_limit(rho0, rho1, s, DEFAULT_MAX_SIDE)
}

pub fn amplify_states_with_limit(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    s: usize,
    max_side: usize,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if s == 0 {
        return Err(Error::arg("s must be at least 1"));
    }
    rho0.check_same_shape(rho1)?;
    let power = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
        let mut acc = m.clone();
        for _ in 1..s {
            acc = tensor_with_limit(&acc, m, max_side)?;
        }
        Ok(acc)
    };
    Ok((power(rho0)?, power(rho1)?))
}

/// The full pipeline on density matrices.
pub fn polarize_states(
    rho0: &ComplexMatrix,
    rho1: &ComplexMatrix,
    params: &PolarizationParams,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (a0, a1) = xor_states(rho0, rho1, params.r)?;
    let (b0, b1) = amplify_states(&a0, &a1, params.s)?;
    xor_states(&b0, &b1, params.n)
}

/// Interval guaranteed to contain the output distance of [`polarize`] for
/// input distance `d_in`.
///
/// The XOR steps are exact (`d ↦ d^r`). For the amplification step the lower
/// end is the larger of `d` itself (discarding copies cannot increase
/// distance) and the fidelity bound `1 − (1 − d²)^{s/2}`, which is never
/// below `1 − e^{−s d²/2}`. The upper end is the smaller of `s·d` and the
/// fidelity bound `√(1 − (1 − d)^{2s})`.
pub fn polarize_bounds(d_in: f64, params: &PolarizationParams) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&d_in) {
        return Err(Error::arg(format!(
            "input distance must lie in [0, 1], got {d_in}"
        )));
    }
    let d = d_in.powi(params.r as i32);
    let s = params.s as f64;
    let lower = d.max(1.0 - (1.0 - d * d).powf(s / 2.0));
    let upper = (s * d)
        .min((1.0 - (1.0 - d).powf(2.0 * s)).max(0.0).sqrt())
        .min(1.0);
    let n = params.n as i32;
    Ok((lower.powi(n), upper.powi(n)))
}
