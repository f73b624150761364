use super::{ClusteredHamiltonian, OperatorSum};
use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Nested-commutator norm, possibly replaced by a triangle-inequality bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorNorm {
    pub value: f64,
    pub upper_bound: bool,
}

/// `α̃_comm,p = Σ ‖[H_{e₁},…,[H_{e_p},H_{e_{p+1}}]]‖` over all index tuples,
/// with `H_0 = Σ_γ H_γ`.
pub fn nested_commutator_norm(ch: &ClusteredHamiltonian, p: usize) -> Result<CommutatorNorm> {
    nested_commutator_norm_with_cap(ch, p, caps::DEFAULT_ENUMERATION_CAP)
}

pub fn nested_commutator_norm_with_cap(
    ch: &ClusteredHamiltonian,
    p: usize,
    enumeration_cap: usize,
) -> Result<CommutatorNorm> {
    if p == 0 {
        return Err(Error::Domain("commutator order must be at least 1".into()));
    }
    let m = ch.num_edges() + 1;
    let summands: Vec<OperatorSum> = (0..m).map(|i| ch.summand(i)).collect();
    let tuples = (m as f64).powi(p as i32 + 1);
    let dense_ok = ch.qubit_count() <= caps::dense_cap();
    if tuples > enumeration_cap as f64 || !dense_ok {
        let total: f64 = summands.iter().map(|h| h.one_norm()).sum();
        let value = if m == 1 {
            0.0
        } else {
            2f64.powi(p as i32) * total.powi(p as i32 + 1)
        };
        return Ok(CommutatorNorm {
            value,
            upper_bound: true,
        });
    }
    let mats: Vec<Mat> = summands
        .iter()
        .map(|h| h.dense_matrix())
        .collect::<Result<_>>()?;
    let mut idx = vec![0usize; p + 1];
    let mut value = 0.0;
    loop {
        let mut acc = mats[idx[p]].clone();
        for k in (0..p).rev() {
            let a = &mats[idx[k]];
            acc = a * &acc - &acc * a;
        }
        value += linalg::spectral_norm(&acc);
        // Odometer increment over {0..m}^{p+1}.
        let mut pos = 0;
        loop {
            if pos > p {
                return Ok(CommutatorNorm {
                    value,
                    upper_bound: false,
                });
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `|||H|||₁`: the largest total weight of terms touching any single qubit.
pub fn induced_one_norm(h: &OperatorSum, k: usize) -> Result<f64> {
    let mut per_qubit = vec![0.0f64; h.qubit_count()];
    for (c, s) in h.terms() {
        let support = s.support();
        if support.len() > k {
            return Err(Error::Domain(format!(
                "term {s} acts on {} qubits, locality is {k}",
                support.len()
            )));
        }
        for q in support {
            per_qubit[q] += c.abs();
        }
    }
    Ok(per_qubit.into_iter().fold(0.0, f64::max))
}
