//! Seeded random states, unitaries, channels and circuits for tests and
//! adversarial provers.
//!
//! Every generator takes the RNG explicitly; [`rng`] builds the ChaCha
//! generator used throughout so runs are reproducible from a `u64` seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, PRESETS};
use crate::linalg::{orthonormalize_against, ComplexMatrix, StateVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix of independent standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("sized")
}

/// Columns of a Gaussian matrix orthonormalized in order, which is
/// Haar-distributed (Gram–Schmidt fixes the phases of the implicit `R`).
fn haar_columns<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while out.len() < cols {
        let g: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        if let Some(v) = orthonormalize_against(&out, g) {
            out.push(v);
        }
    }
    out
}

/// Haar-random `dim × dim` unitary.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_columns(&haar_columns(dim, dim, rng)).expect("square")
}

/// Haar-random unit vector on `num_qubits` qubits.
pub fn random_pure_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> StateVector {
    let amps = (0..1usize << num_qubits).map(|_| gaussian(rng)).collect();
    StateVector::normalized(amps).expect("nonzero with probability one")
}

/// `G G† / tr(G G†)` for a `dim × rank` Ginibre matrix `G`.
pub fn random_density_rank<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rank.max(1), rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}

/// Full-rank random density matrix of side `dim`, except that with
/// probability 1/4 the rank is drawn uniformly so that pure and low-rank
/// states are exercised too.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let rank = if rng.gen_bool(0.25) {
        rng.gen_range(1..=dim)
    } else {
        dim
    };
    random_density_rank(dim, rank, rng)
}

/// Random channel `C^{d_in} → C^{d_out}` as Kraus operators, cut from a Haar
/// isometry so that `Σ K†K = I`. At least `⌈d_in/d_out⌉` operators are
/// returned, since fewer cannot preserve trace.
pub fn random_kraus<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    count: usize,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let count = count.max(d_in.div_ceil(d_out.max(1))).max(1);
    let cols = haar_columns(d_out * count, d_in, rng);
    let iso = ComplexMatrix::from_columns(&cols).expect("sized");
    (0..count)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(d_out, d_in);
            for i in 0..d_out {
                for j in 0..d_in {
                    m[(i, j)] = iso[(k * d_out + i, j)];
                }
            }
            m
        })
        .collect()
}

/// Random circuit mixing preset gates with generic Haar unitaries on one or
/// two qubits. Outputs are a random nonempty ordered subset.
pub fn random_circuit<R: Rng + ?Sized>(width: usize, gates: usize, rng: &mut R) -> Circuit {
    let mut qubits: Vec<usize> = (0..width).collect();
    qubits.shuffle(rng);
    let k = rng.gen_range(1..=width);
    let mut c = Circuit::new(width, qubits[..k].to_vec()).expect("valid outputs");
    for _ in 0..gates {
        let g = if rng.gen_bool(0.3) {
            let arity = if width >= 2 { rng.gen_range(1..=2) } else { 1 };
            qubits.shuffle(rng);
            Gate::new(random_unitary(1 << arity, rng), qubits[..arity].to_vec())
                .expect("Haar unitary")
        } else {
            let usable: Vec<_> = PRESETS.iter().filter(|(_, a)| *a <= width).collect();
            let &&(name, arity) = usable.choose(rng).expect("one-qubit presets exist");
            qubits.shuffle(rng);
            Gate::preset(name, &qubits[..arity]).expect("valid preset")
        };
        c.push(g).expect("targets in range");
    }
    c
}

/// Random circuit whose output is every qubit, for unitary-level checks.
pub fn random_unitary_circuit<R: Rng + ?Sized>(width: usize, gates: usize, rng: &mut R) -> Circuit {
    random_circuit(width, gates, rng)
        .with_outputs((0..width).collect())
        .expect("all qubits")
}
