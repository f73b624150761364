//! Pauli-string operator algebra.
//!
//! Qubit `q` of a string is bit `q` of a computational basis index, and the
//! `q`-th letter of the textual form.

mod cluster;
mod norms;

pub use cluster::{cluster, ClusteredHamiltonian, InteractionTerm, QubitPartition};
pub use norms::{induced_one_norm, nested_commutator_norm, CommutatorNorm};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliAxis::I),
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    pub fn matrix(self) -> Mat {
        let i = linalg::I;
        match self {
            PauliAxis::I => Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            PauliAxis::X => Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            PauliAxis::Y => Mat::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]),
            PauliAxis::Z => Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }
}

/// Tensor product of single-qubit Paulis, one axis per qubit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>) -> Self {
        Self { axes }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            axes: vec![PauliAxis::I; n],
        }
    }

    /// Builds a string of length `n` with the given `(qubit, axis)` entries.
    pub fn from_sparse(n: usize, entries: &[(usize, PauliAxis)]) -> Result<Self> {
        let mut axes = vec![PauliAxis::I; n];
        for &(q, a) in entries {
            if q >= n {
                return Err(Error::Shape(format!("qubit {q} outside string of length {n}")));
            }
            axes[q] = a;
        }
        Ok(Self { axes })
    }

    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .map(PauliAxis::from_char)
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn axis(&self, q: usize) -> PauliAxis {
        self.axes[q]
    }

    /// Indices carrying a non-identity axis, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != PauliAxis::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| *a == PauliAxis::I)
    }

    /// Keeps the axes on `qubits`, replacing every other axis by `I`.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        let mut axes = vec![PauliAxis::I; self.axes.len()];
        for &q in qubits {
            axes[q] = self.axes[q];
        }
        Self { axes }
    }

    /// Sub-string on `qubits`, renumbered `0..qubits.len()` in list order.
    pub fn select(&self, qubits: &[usize]) -> Self {
        Self {
            axes: qubits.iter().map(|&q| self.axes[q]).collect(),
        }
    }

    /// Flip mask, phase mask and `Y` count of the symplectic form.
    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks::default();
        for (q, a) in self.axes.iter().enumerate() {
            match a {
                PauliAxis::I => {}
                PauliAxis::X => m.x |= 1 << q,
                PauliAxis::Z => m.z |= 1 << q,
                PauliAxis::Y => {
                    m.x |= 1 << q;
                    m.z |= 1 << q;
                    m.ny += 1;
                }
            }
        }
        m
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| **a != PauliAxis::I && **b != PauliAxis::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Dense `2^n × 2^n` matrix of the string.
    pub fn dense(&self) -> Mat {
        let dim = 1usize << self.len();
        let m = self.masks();
        let mut out = Mat::zeros(dim, dim);
        for j in 0..dim {
            let (k, ph) = m.act(j);
            out[(k, j)] = ph;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

/// Bit-mask form of a Pauli string acting on basis indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub ny: u32,
}

impl PauliMasks {
    pub fn shifted(self, offset: usize) -> Self {
        Self {
            x: self.x << offset,
            z: self.z << offset,
            ny: self.ny,
        }
    }

    /// `P|j⟩ = phase · |k⟩`.
    pub fn act(&self, j: usize) -> (usize, C64) {
        (j ^ self.x, self.phase(j))
    }

    pub fn phase(&self, j: usize) -> C64 {
        let base = match self.ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if (j & self.z).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }
}

/// Textual and JSON form of one weighted string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: f64,
    pub pauli: String,
}

/// Canonical weighted sum of Pauli strings with merged, nonzero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    qubit_count: usize,
    terms: Vec<(f64, PauliString)>,
}

impl OperatorSum {
    pub fn zero(qubit_count: usize) -> Self {
        Self {
            qubit_count,
            terms: Vec::new(),
        }
    }

    /// Merges equal strings and drops exact zeros.
    pub fn from_terms<I>(qubit_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (c, s) in terms {
            if s.len() != qubit_count {
                return Err(Error::Shape(format!(
                    "string {s} has length {} but the sum has {qubit_count} qubits",
                    s.len()
                )));
            }
            if !c.is_finite() {
                return Err(Error::Domain(format!("non-finite coefficient on {s}")));
            }
            *merged.entry(s).or_insert(0.0) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(s, c)| (c, s))
            .collect();
        Ok(Self { qubit_count, terms })
    }

    pub fn from_specs(specs: &[TermSpec]) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::with_capacity(specs.len());
        for (idx, t) in specs.iter().enumerate() {
            let s = PauliString::parse(&t.pauli).ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("bad Pauli string {:?}", t.pauli),
            })?;
            match n {
                None => n = Some(s.len()),
                Some(len) if len != s.len() => {
                    return Err(Error::Shape(format!(
                        "term {} has length {} but earlier terms have {len}",
                        idx + 1,
                        s.len()
                    )))
                }
                _ => {}
            }
            terms.push((t.coeff, s));
        }
        Self::from_terms(n.unwrap_or(0), terms)
    }

    pub fn to_specs(&self) -> Vec<TermSpec> {
        self.terms
            .iter()
            .map(|(c, s)| TermSpec {
                coeff: *c,
                pauli: s.to_string(),
            })
            .collect()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_terms(
            self.qubit_count,
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_terms(
            self.qubit_count,
            self.terms.iter().map(|(c, s)| (c * k, s.clone())),
        )
        .expect("scaling preserves shape")
    }

    /// `Σ|c_l|`.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        Ok(linalg::spectral_norm(&self.dense_matrix()?))
    }

    pub fn dense_matrix(&self) -> Result<Mat> {
        caps::check_dense("dense_matrix", self.qubit_count)?;
        let dim = 1usize << self.qubit_count;
        let mut out = Mat::zeros(dim, dim);
        for (c, s) in &self.terms {
            let m = s.masks();
            for j in 0..dim {
                let (k, ph) = m.act(j);
                out[(k, j)] += ph * *c;
            }
        }
        Ok(out)
    }

    /// Restriction to `qubits`, renumbered in list order. Terms must not act
    /// outside `qubits`.
    pub fn compact(&self, qubits: &[usize]) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, s) in &self.terms {
            if s.support().iter().any(|q| !qubits.contains(q)) {
                return Err(Error::Shape(format!("term {s} acts outside the kept qubits")));
            }
            terms.push((*c, s.select(qubits)));
        }
        Self::from_terms(qubits.len(), terms)
    }

    /// Union of the supports of all terms.
    pub fn support(&self) -> Vec<usize> {
        let mut mask = 0usize;
        for (_, s) in &self.terms {
            for q in s.support() {
                mask |= 1 << q;
            }
        }
        (0..self.qubit_count).filter(|q| mask >> q & 1 == 1).collect()
    }
}

/// Parses one `<coefficient> <axes>` term per line; blank lines and `#`
/// comments are skipped.
pub fn parse_pauli_sum(text: &str) -> Result<OperatorSum> {
    let mut terms = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut parts = line.split_whitespace();
        let (Some(c), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `<coefficient> <axes>`, got {line:?}"),
            });
        };
        let coeff: f64 = c.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad coefficient {c:?}"),
        })?;
        let s = PauliString::parse(p).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("bad axis letters {p:?}"),
        })?;
        match width {
            None => width = Some(s.len()),
            Some(w) if w != s.len() => {
                return Err(Error::Shape(format!(
                    "line {lineno}: string length {} differs from {w}",
                    s.len()
                )))
            }
            _ => {}
        }
        terms.push((coeff, s));
    }
    OperatorSum::from_terms(width.unwrap_or(0), terms)
}

/// Random Hermitian Pauli sum with `terms` distinct non-identity strings and
/// coefficients of magnitude in `[0.1, 1]` with random sign.
pub fn random_pauli_sum<R: rand::Rng + ?Sized>(rng: &mut R, n: usize, terms: usize) -> Result<OperatorSum> {
    let max_terms = (1usize << (2 * n)) - 1;
    if terms > max_terms {
        return Err(Error::Domain(format!("{terms} distinct strings requested on {n} qubits")));
    }
    let mut picked: BTreeMap<PauliString, f64> = BTreeMap::new();
    while picked.len() < terms {
        let axes: Vec<PauliAxis> = (0..n)
            .map(|_| [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z][rng.gen_range(0..4)])
            .collect();
        let p = PauliString::new(axes);
        if p.is_identity() {
            continue;
        }
        let mag = rng.gen_range(0.1..=1.0);
        let c = if rng.gen_bool(0.5) { mag } else { -mag };
        picked.entry(p).or_insert(c);
    }
    OperatorSum::from_terms(n, picked.into_iter().map(|(p, c)| (c, p)))
}
