//! Resource caps shared by the statevector engine and the dense oracles.

use crate::error::{Error, Result};

pub const DEFAULT_QUBIT_CAP: usize = 24;
pub const DEFAULT_DENSE_CAP: usize = 12;
pub const DEFAULT_ENUMERATION_CAP: usize = 4096;

pub const QUBIT_CAP_ENV: &str = "DQSIM_QUBIT_CAP";
pub const DENSE_CAP_ENV: &str = "DQSIM_DENSE_CAP";

fn env_or(name: &str, default: usize) -> usize {
    std::env::var(name)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

/// Global statevector cap in qubits.
pub fn qubit_cap() -> usize {
    env_or(QUBIT_CAP_ENV, DEFAULT_QUBIT_CAP)
}

/// Cap on the qubit count of any dense matrix built by an oracle.
pub fn dense_cap() -> usize {
    env_or(DENSE_CAP_ENV, DEFAULT_DENSE_CAP)
}

pub fn check_qubits(what: &str, requested: usize) -> Result<()> {
    let cap = qubit_cap();
    if requested > cap {
        return Err(Error::Capability {
            what: what.to_string(),
            requested,
            cap,
        });
    }
    Ok(())
}

pub fn check_dense(what: &str, requested: usize) -> Result<()> {
    let cap = dense_cap();
    if requested > cap {
        return Err(Error::Capability {
            what: what.to_string(),
            requested,
            cap,
        });
    }
    Ok(())
}

/// `⌈log₂ n⌉`, with `log2_ceil(0) = log2_ceil(1) = 0`.
pub fn log2_ceil(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_ceil_values() {
        let expect = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)];
        for (n, w) in expect {
            assert_eq!(log2_ceil(n), w, "n={n}");
        }
    }
}
