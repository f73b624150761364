use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{OperatorSum, PauliString};
use crate::error::{Error, Result};

/// Assignment of every system qubit to a node `γ ∈ 1..=Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitPartition {
    node_of: Vec<usize>,
    gamma: usize,
}

impl QubitPartition {
    pub fn new(node_of: Vec<usize>) -> Result<Self> {
        let gamma = node_of.iter().copied().max().unwrap_or(0);
        if node_of.contains(&0) {
            return Err(Error::Partition("node indices start at 1".into()));
        }
        let used: BTreeSet<usize> = node_of.iter().copied().collect();
        if let Some(g) = (1..=gamma).find(|g| !used.contains(g)) {
            return Err(Error::Partition(format!("node {g} owns no qubit")));
        }
        Ok(Self { node_of, gamma })
    }

    /// Builds a partition from explicit qubit groups; group `i` becomes node `i+1`.
    pub fn from_groups(groups: &[Vec<usize>]) -> Result<Self> {
        let n: usize = groups.iter().map(|g| g.len()).sum();
        let mut node_of = vec![0usize; n];
        for (i, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Partition(format!("node {} owns no qubit", i + 1)));
            }
            for &q in group {
                if q >= n {
                    return Err(Error::Partition(format!("qubit {q} outside 0..{n}")));
                }
                if node_of[q] != 0 {
                    return Err(Error::Partition(format!("qubit {q} assigned twice")));
                }
                node_of[q] = i + 1;
            }
        }
        Self::new(node_of)
    }

    /// Contiguous blocks of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut groups = Vec::new();
        let mut next = 0;
        for &s in sizes {
            groups.push((next..next + s).collect());
            next += s;
        }
        Self::from_groups(&groups)
    }

    pub fn single(n: usize) -> Self {
        Self {
            node_of: vec![1; n],
            gamma: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn qubit_count(&self) -> usize {
        self.node_of.len()
    }

    pub fn node_of(&self, q: usize) -> usize {
        self.node_of[q]
    }

    pub fn qubits_of(&self, gamma: usize) -> Vec<usize> {
        (0..self.node_of.len())
            .filter(|&q| self.node_of[q] == gamma)
            .collect()
    }

    pub fn groups(&self) -> Vec<Vec<usize>> {
        (1..=self.gamma).map(|g| self.qubits_of(g)).collect()
    }

    /// Nodes touched by a set of qubits, ascending.
    pub fn nodes_of(&self, qubits: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = qubits.iter().map(|&q| self.node_of[q]).collect();
        set.into_iter().collect()
    }

    /// Largest node size.
    pub fn max_node_size(&self) -> usize {
        (1..=self.gamma).map(|g| self.qubits_of(g).len()).max().unwrap_or(0)
    }
}

/// One cross-node term `c · P`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    pub coeff: f64,
    pub string: PauliString,
    pub support_nodes: Vec<usize>,
}

impl InteractionTerm {
    pub fn span(&self) -> usize {
        self.support_nodes.len()
    }
}

/// Node-local sums plus cross-node terms induced by a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredHamiltonian {
    locals: Vec<OperatorSum>,
    interactions: Vec<InteractionTerm>,
    partition: QubitPartition,
}

impl ClusteredHamiltonian {
    pub fn gamma(&self) -> usize {
        self.partition.gamma()
    }

    pub fn qubit_count(&self) -> usize {
        self.partition.qubit_count()
    }

    pub fn partition(&self) -> &QubitPartition {
        &self.partition
    }

    /// `H_γ` for `γ ∈ 1..=Γ`.
    pub fn local(&self, gamma: usize) -> &OperatorSum {
        &self.locals[gamma - 1]
    }

    pub fn locals(&self) -> &[OperatorSum] {
        &self.locals
    }

    pub fn interactions(&self) -> &[InteractionTerm] {
        &self.interactions
    }

    /// `|E|`.
    pub fn num_edges(&self) -> usize {
        self.interactions.len()
    }

    /// `H_0 = Σ_γ H_γ`.
    pub fn h0(&self) -> OperatorSum {
        let n = self.qubit_count();
        OperatorSum::from_terms(
            n,
            self.locals.iter().flat_map(|h| h.terms().iter().cloned()),
        )
        .expect("locals share the system width")
    }

    /// Summand `i` of the product-formula split: `H_0` for `i = 0`, else `H_{e_i}`.
    pub fn summand(&self, i: usize) -> OperatorSum {
        if i == 0 {
            self.h0()
        } else {
            let e = &self.interactions[i - 1];
            OperatorSum::from_terms(self.qubit_count(), [(e.coeff, e.string.clone())])
                .expect("edge string has the system width")
        }
    }

    pub fn flatten(&self) -> OperatorSum {
        let n = self.qubit_count();
        OperatorSum::from_terms(
            n,
            self.locals
                .iter()
                .flat_map(|h| h.terms().iter().cloned())
                .chain(self.interactions.iter().map(|e| (e.coeff, e.string.clone()))),
        )
        .expect("parts share the system width")
    }

    /// `α = Σ_γ ‖H_γ‖₁ + Σ_e |c_e|`.
    pub fn alpha(&self) -> f64 {
        self.locals.iter().map(|h| h.one_norm()).sum::<f64>()
            + self.interactions.iter().map(|e| e.coeff.abs()).sum::<f64>()
    }

    /// Whether every pair of summands `H_0, H_e...` commutes.
    pub fn summands_commute(&self) -> bool {
        let strings: Vec<&PauliString> = self
            .locals
            .iter()
            .flat_map(|h| h.terms().iter().map(|(_, s)| s))
            .chain(self.interactions.iter().map(|e| &e.string))
            .collect();
        strings
            .iter()
            .enumerate()
            .all(|(a, s)| strings[a + 1..].iter().all(|t| s.commutes_with(t)))
    }
}

/// Splits `h` into node-local sums and cross-node interaction terms.
pub fn cluster(h: &OperatorSum, part: &QubitPartition) -> Result<ClusteredHamiltonian> {
    let n = h.qubit_count();
    if part.qubit_count() < n {
        return Err(Error::Partition(format!(
            "qubit {} is not assigned to any node",
            part.qubit_count()
        )));
    }
    if part.qubit_count() > n {
        return Err(Error::Partition(format!(
            "partition covers {} qubits but the Hamiltonian has {n}",
            part.qubit_count()
        )));
    }
    let mut local_terms: Vec<Vec<(f64, PauliString)>> = vec![Vec::new(); part.gamma()];
    let mut interactions = Vec::new();
    for (c, s) in h.terms() {
        let nodes = part.nodes_of(&s.support());
        match nodes.len() {
            0 => {
                // The identity carries no support; it is charged to node 1.
                if part.gamma() == 0 {
                    return Err(Error::Partition("empty partition".into()));
                }
                local_terms[0].push((*c, s.clone()));
            }
            1 => local_terms[nodes[0] - 1].push((*c, s.clone())),
            _ => interactions.push(InteractionTerm {
                coeff: *c,
                string: s.clone(),
                support_nodes: nodes,
            }),
        }
    }
    let locals = local_terms
        .into_iter()
        .map(|t| OperatorSum::from_terms(n, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusteredHamiltonian {
        locals,
        interactions,
        partition: part.clone(),
    })
}
