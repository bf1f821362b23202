//! Maximum acceptance of a two-message system over all provers.
//!
//! With `|φ⟩ = V_1|0⟩` on `V ⊗ M` and `Π = V_2† Π_acc V_2`, a prover can
//! reach exactly the states `σ` on `V ⊗ M` with `tr_M σ = tr_M φ`, so the
//! optimum is `max tr(Πσ)` over that set. It is found by alternating two
//! exact steps: for a fixed prover isometry the best target is the accepted
//! part of the current state, and for a fixed target the best isometry is
//! the Uhlmann one. Each step cannot lower the acceptance. The result is
//! certified by a feasible point of the dual problem
//! `min tr Y` subject to `Y ⊗ I ≥ (√ρ ⊗ I) Π (√ρ ⊗ I)`.

use super::ProofSystemSpec;
use crate::capacity::Capacity;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, orthonormalize_against, partial_trace, svd, tensor, ComplexMatrix, C64, ZERO,
};
use crate::random::{random_kraus, rng};
use crate::states::prepare_pure;

/// Largest certified gap accepted by [`max_accept_exact`].
pub const MAX_ACCEPT_GAP: f64 = 1e-8;
/// `qv + qm` limit: the prover workspace squares the `V ⊗ M` dimension.
const MAX_VM_QUBITS: usize = 5;
const MAX_ITERS: usize = 20_000;
const CHECK_EVERY: usize = 20;
/// Gap at which the search stops early.
const TARGET_GAP: f64 = 1e-10;
const RESTARTS: u64 = 6;
/// Steps each start gets before the best one is continued.
const SCOUT_ITERS: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxAccept {
    /// Acceptance reached by the best prover found.
    pub value: f64,
    /// Dual bound: no prover exceeds this.
    pub upper_bound: f64,
    pub iterations: usize,
}

impl MaxAccept {
    pub fn gap(&self) -> f64 {
        (self.upper_bound - self.value).max(0.0)
    }
}

/// The two-message optimum, failing if the certified gap exceeds
/// [`MAX_ACCEPT_GAP`].
pub fn max_accept_exact(ps: &ProofSystemSpec, cap: &Capacity) -> Result<f64> {
    let m = max_accept_certified(ps, cap)?;
    if m.gap() > MAX_ACCEPT_GAP {
        return Err(Error::Numeric(format!(
            "maximum acceptance only bracketed to [{}, {}]",
            m.value, m.upper_bound
        )));
    }
    Ok(m.value)
}

struct Problem {
    phi: ComplexMatrix,
    pi: ComplexMatrix,
    dv: usize,
    dm: usize,
    dp: usize,
}

impl Problem {
    /// `(I ⊗ W)|φ⟩` reshaped to `(V⊗M) × P`.
    fn state(&self, w: &ComplexMatrix) -> ComplexMatrix {
        let omega = &self.phi * &w.transpose();
        ComplexMatrix::from_vec(self.dv * self.dm, self.dp, omega.into_vec()).expect("sized")
    }

    fn accepted(&self, w: &ComplexMatrix) -> (f64, ComplexMatrix, ComplexMatrix) {
        let st = self.state(w);
        let acc = &self.pi * &st;
        let f = acc.frobenius_norm();
        (f * f, st, acc)
    }

    /// Best isometry `M → M ⊗ P` towards the unit target `x` on `V ⊗ M ⊗ P`.
    fn uhlmann_step(&self, target: &ComplexMatrix) -> Result<ComplexMatrix> {
        let e = self.dm * self.dp;
        let x = ComplexMatrix::from_vec(self.dv, e, target.as_slice().to_vec())?;
        let n = &x.adjoint() * &self.phi;
        let dec = svd(&n)?;
        // thin left factor, completed to an isometry where N has no support
        let s_max = dec.s.first().copied().unwrap_or(0.0);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(self.dm);
        for (i, &s) in dec.s.iter().enumerate() {
            if s <= 1e-12 * s_max.max(1e-300) {
                break;
            }
            let u: Vec<C64> = n.matvec(&dec.v.column(i))?.iter().map(|z| z / s).collect();
            match orthonormalize_against(&cols, u) {
                Some(u) => cols.push(u),
                None => break,
            }
        }
        let mut j = 0;
        while cols.len() < self.dm {
            let mut unit = vec![ZERO; e];
            unit[j] = C64::new(1.0, 0.0);
            if let Some(u) = orthonormalize_against(&cols, unit) {
                cols.push(u);
            }
            j += 1;
        }
        let u = ComplexMatrix::from_columns(&cols)?;
        Ok(&u.conj() * &dec.v.transpose())
    }

    /// Dual-feasible bound built from the primal state `st`.
    fn dual_bound(&self, st: &ComplexMatrix) -> Result<f64> {
        let rho = (&self.phi * &self.phi.adjoint()).hermitian_part();
        let eig = hermitian_eig(&rho)?;
        let top = eig.values.iter().cloned().fold(0.0, f64::max);
        let mut sq = ComplexMatrix::zeros(self.dv, self.dv);
        let mut inv_sq = ComplexMatrix::zeros(self.dv, self.dv);
        for (i, &l) in eig.values.iter().enumerate() {
            if l <= 1e-13 * top.max(1e-300) {
                continue;
            }
            let p = ComplexMatrix::outer(&eig.vectors.column(i));
            sq = &sq + &p.scale_real(l.sqrt());
            inv_sq = &inv_sq + &p.scale_real(1.0 / l.sqrt());
        }
        let id_m = ComplexMatrix::identity(self.dm);
        let sq_m = tensor(&sq, &id_m)?;
        let a = (&(&sq_m * &self.pi) * &sq_m).hermitian_part();
        let sigma = st * &st.adjoint();
        let t = partial_trace(&(&self.pi * &sigma), &[self.dv, self.dm], &[0])?;
        let y = (&(&sq * &t) * &inv_sq).hermitian_part();
        let slack = &a - &tensor(&y, &id_m)?;
        let top_slack = hermitian_eig(&slack.hermitian_part())?
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((y.trace().re + self.dv as f64 * top_slack.max(0.0)).min(1.0))
    }
}

/// The two-message optimum with its dual certificate.
pub fn max_accept_certified(ps: &ProofSystemSpec, cap: &Capacity) -> Result<MaxAccept> {
    if ps.messages != 2 {
        return Err(Error::Unsupported(format!(
            "maximum acceptance is only computed for 2 messages, got {}",
            ps.messages
        )));
    }
    let vm = ps.qv + ps.qm;
    if vm > MAX_VM_QUBITS {
        return Err(Error::Capacity {
            what: "maximum-acceptance search (verifier plus message qubits)",
            requested: vm,
            limit: MAX_VM_QUBITS,
        });
    }
    let (dv, dm) = (1usize << ps.qv, 1usize << ps.qm);
    let psi = prepare_pure(&ps.verifiers[0], cap)?;
    let phi = ComplexMatrix::from_vec(dv, dm, psi.into_amplitudes())?;
    let u2 = ps.verifiers[1].unitary()?;
    let pi = (&(&u2.adjoint() * &ps.accept_projector()) * &u2).hermitian_part();
    let prob = Problem {
        phi,
        pi,
        dv,
        dm,
        dp: dv * dm,
    };

    let mut best = MaxAccept {
        value: 0.0,
        upper_bound: 1.0,
        iterations: 0,
    };
    // short runs from several starts, then the most promising one continues
    let mut runs = Vec::new();
    for start in 0..=RESTARTS {
        let mut run = Ascent::new(&prob, start);
        if run.advance(&prob, SCOUT_ITERS, &mut best)? {
            return Ok(best.finish());
        }
        runs.push(run);
    }
    let lead = runs
        .iter_mut()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    lead.advance(&prob, MAX_ITERS, &mut best)?;
    Ok(best.finish())
}

/// One alternating-ascent trajectory.
struct Ascent {
    w: ComplexMatrix,
    value: f64,
    st: ComplexMatrix,
    acc: ComplexMatrix,
    g: rand_chacha::ChaCha8Rng,
    steps: usize,
}

impl Ascent {
    fn new(prob: &Problem, start: u64) -> Self {
        let e = prob.dm * prob.dp;
        let mut g = rng(start);
        let w = if start == 0 {
            // the prover that does nothing
            let mut w = ComplexMatrix::zeros(e, prob.dm);
            for j in 0..prob.dm {
                w[(j * prob.dp, j)] = C64::new(1.0, 0.0);
            }
            w
        } else {
            random_kraus(prob.dm, e, 1, &mut g).remove(0)
        };
        let (value, st, acc) = prob.accepted(&w);
        Ascent {
            w,
            value,
            st,
            acc,
            g,
            steps: 0,
        }
    }

    /// Run up to `iters` steps, folding values and bounds into `best`.
    /// Returns whether the certified gap reached the stopping target.
    fn advance(&mut self, prob: &Problem, iters: usize, best: &mut MaxAccept) -> Result<bool> {
        for _ in 0..iters {
            best.iterations += 1;
            self.steps += 1;
            let norm = self.acc.frobenius_norm();
            let target = if norm > 1e-12 {
                self.acc.scale_real(1.0 / norm)
            } else {
                // nothing accepted yet: aim at a random accepted direction
                let d = prob.dv * prob.dm * prob.dp;
                let probe = random_kraus(1, d, 1, &mut self.g).remove(0);
                let probe = ComplexMatrix::from_vec(prob.dv * prob.dm, prob.dp, probe.into_vec())?;
                let p = &prob.pi * &probe;
                let pn = p.frobenius_norm();
                if pn <= 1e-12 {
                    // Π = 0: nothing is ever accepted
                    best.value = 0.0;
                    best.upper_bound = 0.0;
                    return Ok(true);
                }
                p.scale_real(1.0 / pn)
            };
            self.w = prob.uhlmann_step(&target)?;
            let (v, st, acc) = prob.accepted(&self.w);
            if v < self.value - 1e-12 {
                return Err(Error::Numeric("alternating ascent lost acceptance".into()));
            }
            (self.value, self.st, self.acc) = (v, st, acc);
            if self.steps.is_multiple_of(CHECK_EVERY) {
                best.value = best.value.max(self.value);
                best.upper_bound = best.upper_bound.min(prob.dual_bound(&self.st)?);
                if best.gap() <= TARGET_GAP {
                    return Ok(true);
                }
            }
        }
        best.value = best.value.max(self.value);
        best.upper_bound = best.upper_bound.min(prob.dual_bound(&self.st)?);
        Ok(best.gap() <= TARGET_GAP)
    }
}

impl MaxAccept {
    fn finish(mut self) -> Self {
        self.value = self.value.clamp(0.0, 1.0);
        self.upper_bound = self.upper_bound.max(self.value);
        self
    }
}
