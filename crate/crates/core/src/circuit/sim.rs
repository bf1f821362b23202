use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{StateVector, C64, ZERO};

/// Apply `c` to `psi`, gates in list order.
pub fn apply_circuit(c: &Circuit, psi: &StateVector) -> Result<StateVector> {
    if psi.dim() != 1usize << c.width() {
        return Err(Error::arg(format!(
            "state of dimension {} does not match circuit width {}",
            psi.dim(),
            c.width()
        )));
    }
    let mut amps = psi.amplitudes().to_vec();
    for g in c.gates() {
        apply_gate_in_place(&mut amps, c.width(), g);
    }
    Ok(StateVector::from_raw(amps))
}

/// Apply one gate to a `2^width` amplitude vector. Qubit 0 is the most
/// significant bit of the basis index.
pub fn apply_gate_in_place(amps: &mut [C64], width: usize, gate: &Gate) {
    debug_assert_eq!(amps.len(), 1usize << width);
    let a = gate.arity();
    let local = 1usize << a;
    // bit position of each target inside the global index, local MSB first
    let shifts: Vec<usize> = gate.targets().iter().map(|&t| width - 1 - t).collect();
    let mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            (0..a)
                .filter(|&k| l >> (a - 1 - k) & 1 == 1)
                .map(|k| 1usize << shifts[k])
                .sum()
        })
        .collect();
    let m = gate.matrix().as_slice();
    let mut buf = vec![ZERO; local];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, &off) in offsets.iter().enumerate() {
            buf[l] = amps[base | off];
        }
        for (i, &off) in offsets.iter().enumerate() {
            let row = &m[i * local..(i + 1) * local];
            amps[base | off] = row.iter().zip(&buf).map(|(x, y)| x * y).sum();
        }
    }
}
