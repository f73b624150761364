use crate::linalg::{Mat, C64, ONE, ZERO};
use crate::pauli::PauliString;

/// A gate together with the global qubit indices it acts on.
#[derive(Debug, Clone)]
pub enum UnitarySpec {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    /// `diag(1, e^{iφ})`.
    Phase { qubit: usize, phi: f64 },
    Cnot { control: usize, target: usize },
    Mcx { controls: Vec<usize>, target: usize },
    /// `exp(−i·angle·P)` with the string's qubit 0 placed at `offset`.
    PauliRotation {
        string: PauliString,
        offset: usize,
        angle: f64,
    },
    /// Dense matrix; `qubits[0]` is the least significant bit of its index.
    Dense { qubits: Vec<usize>, matrix: Mat },
}

pub fn hadamard() -> Mat {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Mat::from_row_slice(2, 2, &[h, h, h, -h])
}

pub fn phase_gate(phi: f64) -> Mat {
    Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::from_polar(1.0, phi)])
}

pub fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}
