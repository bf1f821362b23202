//! Size limits that make the simulator fail fast instead of allocating blindly.

use crate::error::{Error, Result};

/// Environment variable that overrides [`Capacity::max_qubits`].
pub const MAX_QUBITS_ENV: &str = "QSD_MAX_QUBITS";

/// Largest matrix side produced by [`crate::linalg::tensor`] unless a limit is
/// passed explicitly.
pub const DEFAULT_MAX_SIDE: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    /// Widest circuit that may be simulated as a statevector.
    pub max_qubits: usize,
    /// Widest circuit the polarization transforms will materialize.
    pub max_emit_qubits: usize,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity {
            max_qubits: 12,
            max_emit_qubits: 64,
        }
    }
}

impl Capacity {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Capacity {
            max_qubits,
            ..Capacity::default()
        }
    }

    /// Defaults, with `max_qubits` taken from `QSD_MAX_QUBITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_QUBITS_ENV) {
            Ok(v) => {
                let n = v.trim().parse::<usize>().map_err(|_| {
                    Error::arg(format!("{MAX_QUBITS_ENV} must be a qubit count, got `{v}`"))
                })?;
                if n == 0 || n > 30 {
                    return Err(Error::arg(format!(
                        "{MAX_QUBITS_ENV} must lie in 1..=30, got {n}"
                    )));
                }
                Ok(Capacity::with_max_qubits(n))
            }
            Err(_) => Ok(Capacity::default()),
        }
    }

    pub(crate) fn check_simulation(&self, width: usize) -> Result<()> {
        if width > self.max_qubits {
            return Err(Error::Capacity {
                what: "statevector simulation (qubits)",
                requested: width,
                limit: self.max_qubits,
            });
        }
        Ok(())
    }
}
