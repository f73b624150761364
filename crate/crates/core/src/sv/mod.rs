//! Dense statevector simulation over named registers.

mod dump;
mod gate;
mod layout;
mod state;

pub use dump::{read_state, write_state};
pub use gate::{hadamard, pauli_x, phase_gate, UnitarySpec};
pub use layout::{Condition, Owner, Register, RegisterLayout};
pub use state::{StateVector, MIN_POSTSELECT_PROBABILITY};

use crate::error::Result;
use crate::linalg::{self, Mat};
use crate::pauli::OperatorSum;

/// `exp(−iHt)` as a dense matrix.
pub fn exact_evolution(h: &OperatorSum, t: f64) -> Result<Mat> {
    let m = h.dense_matrix()?;
    Ok(linalg::expm_hermitian(&m, t))
}

pub use linalg::operator_distance;

/// Runs `f` on every basis input of an `n`-qubit register and collects the
/// returned output vectors as matrix columns.
pub fn operator_from_columns<F>(n: usize, mut f: F) -> Result<Mat>
where
    F: FnMut(usize) -> Result<Vec<linalg::C64>>,
{
    let dim = 1usize << n;
    let mut out = Mat::zeros(dim, dim);
    for j in 0..dim {
        let col = f(j)?;
        for (k, v) in col.into_iter().enumerate() {
            out[(k, j)] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_entry_distance, C64};
    use crate::pauli::parse_pauli_sum;
    use std::f64::consts::PI;

    #[test]
    fn evolution_examples() {
        let z = parse_pauli_sum("1 Z").unwrap();
        let u = exact_evolution(&z, PI).unwrap();
        assert!(max_entry_distance(&u, &(-identity(2))) < 1e-14);
        let u = exact_evolution(&z, 0.0).unwrap();
        assert!(max_entry_distance(&u, &identity(2)) < 1e-15);
        let x = parse_pauli_sum("1 X").unwrap();
        let u = exact_evolution(&x, PI / 2.0).unwrap();
        let want = x.dense_matrix().unwrap() * C64::new(0.0, -1.0);
        assert!(max_entry_distance(&u, &want) < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let i = identity(4);
        assert_eq!(operator_distance(&i, &i).unwrap(), 0.0);
        assert!((operator_distance(&i, &(-i.clone())).unwrap() - 2.0).abs() < 1e-14);
        let th = 0.7;
        let v = &i * C64::from_polar(1.0, th);
        let want = (C64::new(1.0, 0.0) - C64::from_polar(1.0, th)).norm();
        assert!((operator_distance(&i, &v).unwrap() - want).abs() < 1e-14);
        assert!(operator_distance(&i, &identity(2)).is_err());
    }
}
