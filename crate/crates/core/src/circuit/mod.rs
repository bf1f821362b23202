//! Circuit representation, the `.qc` text format, statevector application and
//! the combinators the other modules build constructions from.
//!
//! A circuit acts on `width` qubits that all start in `|0⟩`. Its `outputs`
//! list names the qubits that form the prepared mixed state, in order; the
//! remaining qubits are traced out.

mod gate;
mod sim;
mod text;

use std::collections::BTreeSet;
use std::fmt;

pub use gate::{preset_arity, preset_matrix, Gate, GENERIC_LABEL, PRESETS, UNITARY_TOL};
pub use sim::{apply_circuit, apply_gate_in_place};
pub(crate) use text::{lex, parse_gate, parse_header, serialize_gate};
pub use text::{parse_circuit, Statement, Token};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Widest circuit whose full unitary [`Circuit::unitary`] will build.
pub const MAX_UNITARY_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    outputs: Vec<usize>,
}

/// Where a qubit of the second circuit goes in [`Circuit::compose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wire {
    /// Onto an existing qubit of the first circuit.
    To(usize),
    /// Onto a new qubit appended after the first circuit's qubits.
    Fresh,
}

impl Circuit {
    pub fn new(width: usize, outputs: Vec<usize>) -> Result<Self> {
        if width == 0 {
            return Err(Error::arg("circuit width must be at least 1"));
        }
        check_outputs(&outputs, width)?;
        Ok(Circuit {
            width,
            gates: Vec::new(),
            outputs,
        })
    }

    /// Empty circuit whose outputs are all qubits in order.
    pub fn identity(width: usize) -> Result<Self> {
        Self::new(width, (0..width).collect())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&t) = gate.targets().iter().find(|&&t| t >= self.width) {
            return Err(Error::arg(format!(
                "gate target {t} outside circuit of width {}",
                self.width
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Builder form of [`Circuit::push`].
    pub fn with_gate(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    /// Append all gates of `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::arg(format!(
                "cannot append width-{} circuit to width-{} circuit",
                other.width, self.width
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Qubits not in `outputs`, ascending.
    pub fn non_outputs(&self) -> Vec<usize> {
        (0..self.width)
            .filter(|q| !self.outputs.contains(q))
            .collect()
    }

    pub fn set_outputs(&mut self, outputs: Vec<usize>) -> Result<()> {
        check_outputs(&outputs, self.width)?;
        self.outputs = outputs;
        Ok(())
    }

    pub fn with_outputs(mut self, outputs: Vec<usize>) -> Result<Self> {
        self.set_outputs(outputs)?;
        Ok(self)
    }

    /// Same gates on a wider register; new qubits are idle and not outputs.
    pub fn widened(&self, width: usize) -> Result<Self> {
        if width < self.width {
            return Err(Error::arg("widened circuit cannot be narrower"));
        }
        Ok(Circuit {
            width,
            gates: self.gates.clone(),
            outputs: self.outputs.clone(),
        })
    }

    /// Qubits touched by at least one gate.
    pub fn used_qubits(&self) -> BTreeSet<usize> {
        self.gates
            .iter()
            .flat_map(|g| g.targets().iter().copied())
            .collect()
    }

    /// Gate list reversed and each gate inverted; outputs unchanged.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            width: self.width,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
            outputs: self.outputs.clone(),
        }
    }

    /// Every gate `G` becomes `|0⟩⟨0|⊗I + |1⟩⟨1|⊗G` on `[control, targets…]`.
    ///
    /// The control must not be acted on by the circuit or be one of its
    /// outputs; the width grows to include it if needed.
    pub fn add_control(&self, control: usize) -> Result<Circuit> {
        if self.outputs.contains(&control) || self.used_qubits().contains(&control) {
            return Err(Error::arg(format!(
                "control qubit {control} collides with a qubit of the circuit"
            )));
        }
        Ok(Circuit {
            width: self.width.max(control + 1),
            gates: self
                .gates
                .iter()
                .map(|g| g.controlled(control))
                .collect::<Result<_>>()?,
            outputs: self.outputs.clone(),
        })
    }

    /// Move qubit `i` to `map[i]` in a circuit of the given width.
    pub fn relabel(&self, map: &[usize], width: usize) -> Result<Circuit> {
        if map.len() != self.width {
            return Err(Error::arg(format!(
                "relabeling needs {} entries, got {}",
                self.width,
                map.len()
            )));
        }
        check_injective(map, width)?;
        Ok(Circuit {
            width,
            gates: self.gates.iter().map(|g| g.retarget(|t| map[t])).collect(),
            outputs: self.outputs.iter().map(|&o| map[o]).collect(),
        })
    }

    /// `self` followed by `b`, with `b`'s qubit `i` placed per `wiring[i]`.
    ///
    /// Fresh qubits are appended in `b`'s order. Outputs are `self`'s outputs
    /// followed by those of `b`'s outputs not already listed.
    pub fn compose(&self, b: &Circuit, wiring: &[Wire]) -> Result<Circuit> {
        if wiring.len() != b.width {
            return Err(Error::arg(format!(
                "wiring needs {} entries, got {}",
                b.width,
                wiring.len()
            )));
        }
        let mut next = self.width;
        let map: Vec<usize> = wiring
            .iter()
            .map(|w| match *w {
                Wire::To(q) => q,
                Wire::Fresh => {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        for (w, &q) in wiring.iter().zip(&map) {
            if matches!(w, Wire::To(_)) && q >= self.width {
                return Err(Error::arg(format!(
                    "wiring target {q} outside circuit of width {}",
                    self.width
                )));
            }
        }
        check_injective(&map, next)?;
        let moved = b.relabel(&map, next)?;
        let mut out = self.widened(next)?;
        out.gates.extend(moved.gates);
        for o in moved.outputs {
            if !out.outputs.contains(&o) {
                out.outputs.push(o);
            }
        }
        Ok(out)
    }

    /// `b` on fresh qubits after `self`; outputs concatenated.
    pub fn parallel(&self, b: &Circuit) -> Result<Circuit> {
        self.compose(b, &vec![Wire::Fresh; b.width])
    }

    /// Full `2^width` unitary, assembled column by column.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        if self.width > MAX_UNITARY_QUBITS {
            return Err(Error::Capacity {
                what: "full circuit unitary (qubits)",
                requested: self.width,
                limit: MAX_UNITARY_QUBITS,
            });
        }
        let dim = 1usize << self.width;
        let mut u = ComplexMatrix::zeros(dim, dim);
        let mut col = vec![crate::linalg::ZERO; dim];
        for j in 0..dim {
            col.iter_mut().for_each(|z| *z = crate::linalg::ZERO);
            col[j] = crate::linalg::ONE;
            for g in &self.gates {
                apply_gate_in_place(&mut col, self.width, g);
            }
            u.set_column(j, &col);
        }
        Ok(u)
    }

    /// Canonical `.qc` text.
    pub fn to_text(&self) -> String {
        text::serialize(self)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_outputs(outputs: &[usize], width: usize) -> Result<()> {
    for (i, &o) in outputs.iter().enumerate() {
        if o >= width {
            return Err(Error::arg(format!(
                "output qubit {o} outside circuit of width {width}"
            )));
        }
        if outputs[..i].contains(&o) {
            return Err(Error::arg(format!("output qubit {o} listed twice")));
        }
    }
    Ok(())
}

fn check_injective(map: &[usize], width: usize) -> Result<()> {
    let mut seen = vec![false; width];
    for &q in map {
        if q >= width {
            return Err(Error::arg(format!("qubit {q} outside width {width}")));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::arg(format!("two qubits mapped onto {q}")));
        }
    }
    Ok(())
}
