use std::f64::consts::FRAC_PI_2;

use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64, ZERO};

/// `H_U = Σ_j √(j(N−j+1)) (|j⟩⟨j−1|_c ⊗ U_j + h.c.)` with a binary clock in
/// the low qubits and the work register above it.
#[derive(Debug, Clone)]
pub struct ClockedHamiltonian {
    gates: Vec<Mat>,
    work_qubits: usize,
    clock_width: usize,
    matrix: Mat,
}

impl ClockedHamiltonian {
    pub fn gates(&self) -> &[Mat] {
        &self.gates
    }

    pub fn n_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn work_qubits(&self) -> usize {
        self.work_qubits
    }

    /// `⌈log₂(N+1)⌉`.
    pub fn clock_width(&self) -> usize {
        self.clock_width
    }

    pub fn total_qubits(&self) -> usize {
        self.clock_width + self.work_qubits
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    /// `√(j(N−j+1))` for `j = 1..=N`.
    pub fn couplings(&self) -> Vec<f64> {
        couplings(self.gates.len())
    }

    /// Basis index of `|j⟩_c ⊗ |w⟩`.
    pub fn index(&self, clock: usize, work: usize) -> usize {
        clock | work << self.clock_width
    }

    /// `U_N ⋯ U_1`.
    pub fn circuit_unitary(&self) -> Mat {
        let dim = 1usize << self.work_qubits;
        self.gates.iter().fold(linalg::identity(dim), |acc, u| u * acc)
    }
}

fn couplings(n: usize) -> Vec<f64> {
    (1..=n).map(|j| ((j * (n - j + 1)) as f64).sqrt()).collect()
}

pub fn circuit_to_hamiltonian(gates: &[Mat]) -> Result<ClockedHamiltonian> {
    let n = gates.len();
    if n == 0 {
        return Err(Error::Domain("clocked Hamiltonian needs at least one gate".into()));
    }
    let dim = gates[0].nrows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Shape(format!("gate dimension {dim} is not a power of two")));
    }
    for (j, u) in gates.iter().enumerate() {
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::Shape(format!("gate {} is not {dim}x{dim}", j + 1)));
        }
        if linalg::unitarity_defect(u) > 1e-10 {
            return Err(Error::Domain(format!("gate {} is not unitary", j + 1)));
        }
    }
    let work_qubits = dim.trailing_zeros() as usize;
    let clock_width = caps::log2_ceil(n + 1);
    caps::check_dense("clocked Hamiltonian", clock_width + work_qubits)?;
    let total = 1usize << (clock_width + work_qubits);
    let mut matrix = Mat::from_element(total, total, ZERO);
    let idx = |clock: usize, work: usize| clock | work << clock_width;
    for (j, (u, k)) in gates.iter().zip(couplings(n)).enumerate() {
        let (to, from) = (j + 1, j);
        for r in 0..dim {
            for c in 0..dim {
                let v = u[(r, c)] * k;
                if v != ZERO {
                    matrix[(idx(to, r), idx(from, c))] += v;
                    matrix[(idx(from, c), idx(to, r))] += v.conj();
                }
            }
        }
    }
    Ok(ClockedHamiltonian {
        gates: gates.to_vec(),
        work_qubits,
        clock_width,
        matrix,
    })
}

#[derive(Debug, Clone)]
pub struct PstOutcome {
    /// Weight on clock `|N⟩`.
    pub probability: f64,
    /// Normalized work state conditioned on clock `|N⟩`.
    pub output: Vec<C64>,
    /// `⟨U_N⋯U_1ψ₀ | output⟩`; its modulus squared is the fidelity.
    pub overlap: C64,
}

impl PstOutcome {
    pub fn fidelity(&self) -> f64 {
        self.overlap.norm_sqr()
    }
}

/// `exp(−iH_U t)|0⟩_c|ψ₀⟩`, read out on clock `|N⟩`.
pub fn evolve_clocked(ch: &ClockedHamiltonian, psi0: &[C64], t: f64) -> Result<PstOutcome> {
    let dim = 1usize << ch.work_qubits;
    if psi0.len() != dim {
        return Err(Error::Shape(format!("{} amplitudes for {} work qubits", psi0.len(), ch.work_qubits)));
    }
    let prop = linalg::expm_hermitian(&ch.matrix, t);
    let start: Vec<usize> = (0..dim).map(|w| ch.index(0, w)).collect();
    let end: Vec<usize> = (0..dim).map(|w| ch.index(ch.n_gates(), w)).collect();
    let mut out: Vec<C64> = end
        .iter()
        .map(|&r| start.iter().zip(psi0).map(|(&c, a)| prop[(r, c)] * a).sum())
        .collect();
    let probability: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if probability > 0.0 {
        let k = 1.0 / probability.sqrt();
        out.iter_mut().for_each(|a| *a *= k);
    }
    let target = ch.circuit_unitary() * nalgebra::DVector::from_column_slice(psi0);
    let overlap = target.iter().zip(&out).map(|(a, b)| a.conj() * b).sum();
    Ok(PstOutcome {
        probability,
        output: out,
        overlap,
    })
}

/// [`evolve_clocked`] at `t = π/2`, where the transfer is perfect.
pub fn run_pst(ch: &ClockedHamiltonian, psi0: &[C64]) -> Result<PstOutcome> {
    evolve_clocked(ch, psi0, FRAC_PI_2)
}
