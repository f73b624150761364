use std::f64::consts::FRAC_PI_2;

use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, ONE, ZERO};

use super::clock::circuit_to_hamiltonian;

/// Bit strings held by the parties; two parties is the bipartite case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpInstance {
    parties: Vec<Vec<bool>>,
}

impl IpInstance {
    pub fn new(parties: Vec<Vec<bool>>) -> Result<Self> {
        if parties.len() < 2 {
            return Err(Error::Domain("inner product needs at least two parties".into()));
        }
        let n = parties[0].len();
        if n == 0 || parties.iter().any(|p| p.len() != n) {
            return Err(Error::Shape("party strings must share a positive length".into()));
        }
        Ok(Self { parties })
    }

    pub fn bipartite(y: &[bool], z: &[bool]) -> Result<Self> {
        Self::new(vec![y.to_vec(), z.to_vec()])
    }

    /// Parses strings such as `"101"`, leftmost character first.
    pub fn from_strs(parties: &[&str]) -> Result<Self> {
        let bits = parties
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Config(format!("bit string {s:?}"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<_>>()?;
        Self::new(bits)
    }

    pub fn parties(&self) -> &[Vec<bool>] {
        &self.parties
    }

    pub fn gamma(&self) -> usize {
        self.parties.len()
    }

    pub fn n(&self) -> usize {
        self.parties[0].len()
    }

    /// Work-register basis index: party `γ` bit `i` at qubit `γn + i`, output
    /// qubit `Γn` at 0.
    fn work_index(&self) -> usize {
        let n = self.n();
        let mut idx = 0;
        for (g, p) in self.parties.iter().enumerate() {
            for (i, &b) in p.iter().enumerate() {
                if b {
                    idx |= 1 << (g * n + i);
                }
            }
        }
        idx
    }
}

/// `⊕_i ∧_γ x_γ,i`.
pub fn classical_ip(inst: &IpInstance) -> bool {
    (0..inst.n()).fold(false, |acc, i| acc ^ inst.parties.iter().all(|p| p[i]))
}

/// Qubits of the bipartite Hamiltonian with a binary clock,
/// `2n + ⌈log₂(n+1)⌉ + 1`.
pub fn ip_qubit_count(n: usize) -> usize {
    2 * n + caps::log2_ceil(n + 1) + 1
}

/// One multi-controlled NOT per position `i`, onto the output qubit.
fn ip_gates(gamma: usize, n: usize) -> Vec<Mat> {
    let work = gamma * n + 1;
    let dim = 1usize << work;
    let out = 1usize << (gamma * n);
    (0..n)
        .map(|i| {
            let controls: usize = (0..gamma).map(|g| 1usize << (g * n + i)).sum();
            let mut m = Mat::from_element(dim, dim, ZERO);
            for c in 0..dim {
                let r = if c & controls == controls { c ^ out } else { c };
                m[(r, c)] = ONE;
            }
            m
        })
        .collect()
}

/// Toffoli gates for two parties, `Γ`-controlled NOTs otherwise.
pub fn ip_circuit(inst: &IpInstance) -> Vec<Mat> {
    ip_gates(inst.gamma(), inst.n())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpReadout {
    pub bit: bool,
    /// Probability of reading 1 on the output qubit.
    pub probability_one: f64,
}

/// Propagator `exp(−iH_IP π/2)` for one instance shape, shared by every input.
pub struct IpEvaluator {
    gamma: usize,
    n: usize,
    clock_width: usize,
    propagator: Mat,
}

impl IpEvaluator {
    pub fn new(gamma: usize, n: usize) -> Result<Self> {
        let ch = circuit_to_hamiltonian(&ip_gates(gamma, n))?;
        Ok(Self {
            gamma,
            n,
            clock_width: ch.clock_width(),
            propagator: linalg::expm_hermitian(ch.matrix(), FRAC_PI_2),
        })
    }

    pub fn evaluate(&self, inst: &IpInstance) -> Result<IpReadout> {
        if inst.gamma() != self.gamma || inst.n() != self.n {
            return Err(Error::Shape("instance shape differs from the evaluator".into()));
        }
        let col = inst.work_index() << self.clock_width;
        let out_bit = 1usize << (self.gamma * self.n + self.clock_width);
        let probability_one: f64 = (0..self.propagator.nrows())
            .filter(|r| r & out_bit != 0)
            .map(|r| self.propagator[(r, col)].norm_sqr())
            .sum();
        Ok(IpReadout {
            bit: probability_one > 0.5,
            probability_one,
        })
    }
}

/// Evolves `|0⟩_c|x_1⟩⋯|x_Γ⟩|0⟩_o` under `H_IP` for `t = π/2` and reads the
/// output qubit.
pub fn ip_via_dynamics(inst: &IpInstance) -> Result<IpReadout> {
    IpEvaluator::new(inst.gamma(), inst.n())?.evaluate(inst)
}

