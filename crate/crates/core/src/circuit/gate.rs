use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, C64, ONE, ZERO};

/// Unitarity slack accepted for gate matrices.
pub const UNITARY_TOL: f64 = 1e-9;

/// Label carried by gates given by an explicit matrix.
pub const GENERIC_LABEL: &str = "u";

/// Preset mnemonics and their arities.
pub const PRESETS: &[(&str, usize)] = &[
    ("h", 1),
    ("x", 1),
    ("y", 1),
    ("z", 1),
    ("s", 1),
    ("sdg", 1),
    ("t", 1),
    ("tdg", 1),
    ("cx", 2),
    ("cz", 2),
    ("swap", 2),
];

pub fn preset_arity(mnemonic: &str) -> Option<usize> {
    PRESETS
        .iter()
        .find(|(m, _)| *m == mnemonic)
        .map(|&(_, a)| a)
}

/// Matrix of a preset gate; for two-qubit gates the first target is the
/// control (most significant).
pub fn preset_matrix(mnemonic: &str) -> Option<ComplexMatrix> {
    let r = |rows: &[&[f64]]| ComplexMatrix::from_real(rows);
    let diag = |d: &[C64]| ComplexMatrix::from_diag(d);
    let h = FRAC_1_SQRT_2;
    Some(match mnemonic {
        "h" => r(&[&[h, h], &[h, -h]]),
        "x" => r(&[&[0.0, 1.0], &[1.0, 0.0]]),
        "y" => ComplexMatrix::from_rows(&[vec![ZERO, c64(0.0, -1.0)], vec![c64(0.0, 1.0), ZERO]])
            .ok()?,
        "z" => r(&[&[1.0, 0.0], &[0.0, -1.0]]),
        "s" => diag(&[ONE, c64(0.0, 1.0)]),
        "sdg" => diag(&[ONE, c64(0.0, -1.0)]),
        "t" => diag(&[ONE, c64(h, h)]),
        "tdg" => diag(&[ONE, c64(h, -h)]),
        "cx" => r(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
        "cz" => ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -1.0]),
        "swap" => r(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        _ => return None,
    })
}

/// A unitary acting on an ordered list of qubits; `targets[0]` is the most
/// significant qubit of the gate's local index.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    matrix: ComplexMatrix,
    targets: Vec<usize>,
    label: String,
}

impl Gate {
    /// Generic gate from an explicit matrix.
    pub fn new(matrix: ComplexMatrix, targets: Vec<usize>) -> Result<Self> {
        check_targets(&targets)?;
        let dim = 1usize
            .checked_shl(targets.len() as u32)
            .ok_or_else(|| Error::arg("gate arity too large"))?;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::arg(format!(
                "gate on {} qubits needs a {dim}x{dim} matrix, got {}x{}",
                targets.len(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_unitary(UNITARY_TOL) {
            return Err(Error::arg("gate matrix is not unitary"));
        }
        Ok(Gate {
            matrix,
            targets,
            label: GENERIC_LABEL.to_string(),
        })
    }

    pub fn preset(mnemonic: &str, targets: &[usize]) -> Result<Self> {
        let matrix = preset_matrix(mnemonic)
            .ok_or_else(|| Error::arg(format!("unknown gate `{mnemonic}`")))?;
        let arity = preset_arity(mnemonic).expect("preset listed");
        if targets.len() != arity {
            return Err(Error::arg(format!(
                "`{mnemonic}` takes {arity} qubit(s), got {}",
                targets.len()
            )));
        }
        check_targets(targets)?;
        Ok(Gate {
            matrix,
            targets: targets.to_vec(),
            label: mnemonic.to_string(),
        })
    }

    pub fn h(q: usize) -> Self {
        Self::preset("h", &[q]).expect("valid preset")
    }

    pub fn x(q: usize) -> Self {
        Self::preset("x", &[q]).expect("valid preset")
    }

    pub fn z(q: usize) -> Self {
        Self::preset("z", &[q]).expect("valid preset")
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::preset("cx", &[control, target]).expect("distinct qubits")
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::preset("swap", &[a, b]).expect("distinct qubits")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn arity(&self) -> usize {
        self.targets.len()
    }

    pub fn is_preset(&self) -> bool {
        self.label != GENERIC_LABEL
    }

    pub fn adjoint(&self) -> Gate {
        let label = match self.label.as_str() {
            "s" => "sdg",
            "sdg" => "s",
            "t" => "tdg",
            "tdg" => "t",
            other => other,
        };
        Gate {
            matrix: self.matrix.adjoint(),
            targets: self.targets.clone(),
            label: label.to_string(),
        }
    }

    pub(crate) fn retarget(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            matrix: self.matrix.clone(),
            targets: self.targets.iter().map(|&t| map(t)).collect(),
            label: self.label.clone(),
        }
    }

    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ G` on `[control, targets…]`.
    pub fn controlled(&self, control: usize) -> Result<Gate> {
        if self.targets.contains(&control) {
            return Err(Error::arg(format!(
                "control qubit {control} is also a gate target"
            )));
        }
        let d = self.matrix.rows();
        let mut m = ComplexMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            m[(i, i)] = ONE;
            for j in 0..d {
                m[(d + i, d + j)] = self.matrix[(i, j)];
            }
        }
        let mut targets = Vec::with_capacity(self.targets.len() + 1);
        targets.push(control);
        targets.extend_from_slice(&self.targets);
        Ok(Gate {
            matrix: m,
            targets,
            label: GENERIC_LABEL.to_string(),
        })
    }
}

fn check_targets(targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::arg("gate needs at least one target"));
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(Error::arg(format!("repeated target qubit {t}")));
        }
    }
    Ok(())
}
