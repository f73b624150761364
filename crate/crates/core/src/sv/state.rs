use super::gate::{hadamard, phase_gate, UnitarySpec};
use super::layout::{Condition, Owner, RegisterLayout};
use crate::caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64, ONE, ZERO};
use crate::pauli::{PauliMasks, PauliString};

/// Smallest Born probability accepted by post-selection.
pub const MIN_POSTSELECT_PROBABILITY: f64 = 1e-14;

/// Visits `s | value` for every `s` built from bits outside `mask`, in
/// increasing order.
fn for_each_matching(dim: usize, mask: usize, value: usize, mut f: impl FnMut(usize)) {
    let free = (dim - 1) & !mask;
    let mut s = 0usize;
    loop {
        f(s | value);
        if s == free {
            break;
        }
        s = (s | !free).wrapping_add(1) & free;
    }
}

/// Dense amplitudes over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    layout: RegisterLayout,
}

impl StateVector {
    /// All-zeros basis state.
    pub fn allocate(layout: RegisterLayout) -> Result<Self> {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let n = layout.total_qubits();
        if n == 0 {
            return Err(Error::Shape("layout has no registers".into()));
        }
        caps::check_qubits("statevector", n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Shape(format!("basis index {index} outside dimension {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amps, layout })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        let n = layout.total_qubits();
        caps::check_qubits("statevector", n)?;
        if amps.len() != 1usize << n {
            return Err(Error::Shape(format!(
                "{} amplitudes for a {n}-qubit layout",
                amps.len()
            )));
        }
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn set_owner(&mut self, name: &str, owner: Owner) -> Result<()> {
        self.layout.set_owner(name, owner)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let p = self.norm_sqr();
        if p < MIN_POSTSELECT_PROBABILITY {
            return Err(Error::PostSelection(p));
        }
        let k = 1.0 / p.sqrt();
        for a in &mut self.amps {
            *a *= k;
        }
        Ok(p)
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits() {
            return Err(Error::Shape(format!(
                "qubit {q} outside a {}-qubit state",
                self.num_qubits()
            )));
        }
        Ok(())
    }

    pub fn apply(&mut self, u: &UnitarySpec) -> Result<()> {
        self.apply_controlled(u, Condition::always())
    }

    /// Applies `u` on the subspace where `cond` holds.
    pub fn apply_controlled(&mut self, u: &UnitarySpec, cond: Condition) -> Result<()> {
        match u {
            UnitarySpec::H(q) => self.apply_matrix(&[*q], &hadamard(), cond),
            UnitarySpec::X(q) => self.apply_x(*q, cond),
            UnitarySpec::Z(q) => self.apply_matrix(&[*q], &phase_gate(std::f64::consts::PI), cond),
            UnitarySpec::S(q) => self.apply_matrix(&[*q], &phase_gate(std::f64::consts::FRAC_PI_2), cond),
            UnitarySpec::Sdg(q) => {
                self.apply_matrix(&[*q], &phase_gate(-std::f64::consts::FRAC_PI_2), cond)
            }
            UnitarySpec::Phase { qubit, phi } => self.apply_matrix(&[*qubit], &phase_gate(*phi), cond),
            UnitarySpec::Cnot { control, target } => {
                self.check_qubit(*control)?;
                if control == target {
                    return Err(Error::Shape("CNOT control equals target".into()));
                }
                let c = cond
                    .and(Condition::qubit(*control, true))
                    .ok_or_else(|| Error::Shape("contradictory control".into()))?;
                self.apply_x(*target, c)
            }
            UnitarySpec::Mcx { controls, target } => {
                let mut c = cond;
                for &q in controls {
                    self.check_qubit(q)?;
                    if q == *target {
                        return Err(Error::Shape("control equals target".into()));
                    }
                    c = c
                        .and(Condition::qubit(q, true))
                        .ok_or_else(|| Error::Shape("contradictory control".into()))?;
                }
                self.apply_x(*target, c)
            }
            UnitarySpec::PauliRotation {
                string,
                offset,
                angle,
            } => self.apply_pauli_exponential_controlled(1.0, string, *offset, *angle, cond),
            UnitarySpec::Dense { qubits, matrix } => {
                if matrix.nrows() <= 64 && linalg::unitarity_defect(matrix) > 1e-10 {
                    return Err(Error::Domain("dense gate is not unitary".into()));
                }
                self.apply_matrix(qubits, matrix, cond)
            }
        }
    }

    fn masks_at(&self, p: &PauliString, offset: usize) -> Result<PauliMasks> {
        if offset + p.len() > self.num_qubits() {
            return Err(Error::Shape(format!(
                "string of length {} at offset {offset} exceeds {} qubits",
                p.len(),
                self.num_qubits()
            )));
        }
        Ok(p.masks().shifted(offset))
    }

    /// `exp(−i·angle·coeff·P)`.
    pub fn apply_pauli_exponential(
        &mut self,
        coeff: f64,
        p: &PauliString,
        offset: usize,
        angle: f64,
    ) -> Result<()> {
        self.apply_pauli_exponential_controlled(coeff, p, offset, angle, Condition::always())
    }

    pub fn apply_pauli_exponential_controlled(
        &mut self,
        coeff: f64,
        p: &PauliString,
        offset: usize,
        angle: f64,
        cond: Condition,
    ) -> Result<()> {
        let m = self.masks_at(p, offset)?;
        if cond.mask & (m.x | m.z) != 0 {
            return Err(Error::Shape("control overlaps the rotated qubits".into()));
        }
        let theta = angle * coeff;
        let (c, s) = (theta.cos(), theta.sin());
        let mis = C64::new(0.0, -s);
        let dim = self.dim();
        if m.x == 0 {
            for_each_matching(dim, cond.mask, cond.value, |j| {
                self.amps[j] *= c + mis * m.phase(j);
            });
            return Ok(());
        }
        let low = m.x & m.x.wrapping_neg();
        let amps = &mut self.amps;
        for_each_matching(dim, cond.mask | low, cond.value, |j| {
            let k = j ^ m.x;
            let (aj, ak) = (amps[j], amps[k]);
            amps[j] = aj * c + mis * m.phase(k) * ak;
            amps[k] = ak * c + mis * m.phase(j) * aj;
        });
        Ok(())
    }

    /// Multiplies by `phase · P` on the subspace where `cond` holds.
    pub fn apply_pauli_controlled(
        &mut self,
        p: &PauliString,
        offset: usize,
        phase: C64,
        cond: Condition,
    ) -> Result<()> {
        let m = self.masks_at(p, offset)?;
        if cond.mask & (m.x | m.z) != 0 {
            return Err(Error::Shape("control overlaps the Pauli support".into()));
        }
        let dim = self.dim();
        if m.x == 0 {
            for_each_matching(dim, cond.mask, cond.value, |j| {
                self.amps[j] *= phase * m.phase(j);
            });
            return Ok(());
        }
        let low = m.x & m.x.wrapping_neg();
        let amps = &mut self.amps;
        for_each_matching(dim, cond.mask | low, cond.value, |j| {
            let k = j ^ m.x;
            let (aj, ak) = (amps[j], amps[k]);
            amps[k] = phase * m.phase(j) * aj;
            amps[j] = phase * m.phase(k) * ak;
        });
        Ok(())
    }

    /// Bit flip on `q` where `cond` holds.
    fn apply_x(&mut self, q: usize, cond: Condition) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        if cond.mask & bit != 0 {
            return Err(Error::Shape("control overlaps the target qubits".into()));
        }
        let dim = self.dim();
        let amps = &mut self.amps;
        for_each_matching(dim, cond.mask | bit, cond.value, |j| amps.swap(j, j | bit));
        Ok(())
    }

    /// Dense matrix on `qubits`, restricted to the subspace where `cond` holds.
    pub fn apply_matrix(&mut self, qubits: &[usize], m: &Mat, cond: Condition) -> Result<()> {
        let k = qubits.len();
        let sub = 1usize << k;
        if m.nrows() != sub || m.ncols() != sub {
            return Err(Error::Shape(format!(
                "{}x{} matrix on {k} qubits",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut tmask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if tmask >> q & 1 == 1 {
                return Err(Error::Shape(format!("qubit {q} listed twice")));
            }
            tmask |= 1 << q;
        }
        if cond.mask & tmask != 0 {
            return Err(Error::Shape("control overlaps the target qubits".into()));
        }
        let offs: Vec<usize> = (0..sub)
            .map(|l| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| l >> b & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect();
        let dim = self.dim();
        let amps = &mut self.amps;
        if k == 1 {
            let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            let o = tmask;
            for_each_matching(dim, cond.mask | tmask, cond.value, |j| {
                let (a, b) = (amps[j], amps[j + o]);
                amps[j] = m00 * a + m01 * b;
                amps[j + o] = m10 * a + m11 * b;
            });
            return Ok(());
        }
        let mut buf = vec![ZERO; sub];
        for_each_matching(dim, cond.mask | tmask, cond.value, |base| {
            for (l, o) in offs.iter().enumerate() {
                buf[l] = amps[base + o];
            }
            for (r, o) in offs.iter().enumerate() {
                let mut acc = ZERO;
                for (c, b) in buf.iter().enumerate() {
                    acc += m[(r, c)] * b;
                }
                amps[base + o] = acc;
            }
        });
        Ok(())
    }

    /// Dense matrix on a named register.
    pub fn apply_register_matrix(&mut self, name: &str, m: &Mat, cond: Condition) -> Result<()> {
        let qubits = self.layout.qubits(name)?;
        self.apply_matrix(&qubits, m, cond)
    }

    /// Multiplies each amplitude by `f(index)`.
    pub fn apply_diagonal(&mut self, f: impl Fn(usize) -> C64) {
        for (j, a) in self.amps.iter_mut().enumerate() {
            *a *= f(j);
        }
    }

    /// Multiplies amplitudes satisfying `cond` by `phase`.
    pub fn apply_phase(&mut self, cond: Condition, phase: C64) {
        let dim = self.dim();
        for_each_matching(dim, cond.mask, cond.value, |j| self.amps[j] *= phase);
    }

    /// Zeroes every amplitude violating `cond`; returns the kept weight.
    pub fn project(&mut self, cond: Condition) -> f64 {
        let mut kept = 0.0;
        for (j, a) in self.amps.iter_mut().enumerate() {
            if cond.holds(j) {
                kept += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        kept
    }

    /// Conditional state given `register = value`, with its Born probability.
    pub fn post_select(&self, register: &str, value: usize) -> Result<(StateVector, f64)> {
        let cond = self.layout.condition(register, value)?;
        let total = self.norm_sqr();
        let mut out = self.clone();
        let kept = out.project(cond);
        let p = kept / total;
        if p < MIN_POSTSELECT_PROBABILITY {
            return Err(Error::PostSelection(p));
        }
        out.normalize()?;
        Ok((out, p))
    }

    /// Marginal distribution of a register.
    pub fn probabilities(&self, register: &str) -> Result<Vec<f64>> {
        let r = self.layout.get(register)?.clone();
        let mut out = vec![0.0; 1 << r.width];
        for (j, a) in self.amps.iter().enumerate() {
            out[r.value_in(j)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Appends a fresh register in `|0⟩` above all existing qubits.
    pub fn append_register(&mut self, name: &str, width: usize, owner: Owner) -> Result<()> {
        self.layout.push(name, width, owner)?;
        self.amps.resize(1usize << self.layout.total_qubits(), ZERO);
        Ok(())
    }

    /// Drops a register, keeping the slice where it holds `value` without
    /// renormalizing.
    pub fn remove_register(&self, name: &str, value: usize) -> Result<StateVector> {
        let r = self.layout.get(name)?.clone();
        let layout = self.layout.without(name)?;
        let dim = 1usize << layout.total_qubits();
        let low_mask = (1usize << r.offset) - 1;
        let mut amps = vec![ZERO; dim];
        for (i, a) in amps.iter_mut().enumerate() {
            let low = i & low_mask;
            let high = i >> r.offset;
            let j = low | (value << r.offset) | (high << (r.offset + r.width));
            *a = self.amps[j];
        }
        StateVector::from_amplitudes(layout, amps)
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn layout(n: usize) -> RegisterLayout {
        RegisterLayout::new().with("q", n, Owner::Control).unwrap()
    }

    #[test]
    fn allocate_zero_state() {
        let s = StateVector::allocate(layout(3)).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitude(0), ONE);
        assert!(RegisterLayout::new().with("a", 0, Owner::Control).is_err());
    }

    #[test]
    fn basic_gates() {
        let mut s = StateVector::allocate(layout(1)).unwrap();
        s.apply(&UnitarySpec::X(0)).unwrap();
        assert_eq!(s.amplitude(1), ONE);

        // |10⟩ in the letter convention means qubit 0 set.
        let mut s = StateVector::basis(layout(2), 0b01).unwrap();
        s.apply(&UnitarySpec::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(s.amplitude(0b11), ONE);

        let mut s = StateVector::allocate(layout(1)).unwrap();
        s.apply(&UnitarySpec::H(0)).unwrap();
        s.apply(&UnitarySpec::H(0)).unwrap();
        assert!((s.amplitude(0) - ONE).norm() < 1e-15);
    }

    #[test]
    fn pauli_exponentials() {
        let x = PauliString::parse("X").unwrap();
        let mut s = StateVector::allocate(layout(1)).unwrap();
        s.apply_pauli_exponential(1.0, &x, 0, PI / 2.0).unwrap();
        assert!((s.amplitude(1) - C64::new(0.0, -1.0)).norm() < 1e-15);

        let mut s = StateVector::allocate(layout(1)).unwrap();
        s.apply_pauli_exponential(1.0, &x, 0, 0.0).unwrap();
        assert_eq!(s.amplitude(0), ONE);

        let zz = PauliString::parse("ZZ").unwrap();
        let mut s = StateVector::allocate(layout(2)).unwrap();
        s.apply_pauli_exponential(1.0, &zz, 0, 0.3).unwrap();
        assert!((s.amplitude(0) - C64::from_polar(1.0, -0.3)).norm() < 1e-15);
    }

    #[test]
    fn post_selection() {
        let h = FRAC_1_SQRT_2;
        let l = RegisterLayout::new()
            .with("a", 1, Owner::Control)
            .unwrap()
            .with("b", 1, Owner::Control)
            .unwrap();
        let bell = StateVector::from_amplitudes(
            l,
            vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
        )
        .unwrap();
        let (post, p) = bell.post_select("a", 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((post.amplitude(0) - ONE).norm() < 1e-15);

        let prod = StateVector::basis(bell.layout().clone(), 0b10).unwrap();
        let (_, p) = prod.post_select("b", 1).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(matches!(prod.post_select("b", 0), Err(Error::PostSelection(_))));
    }

    #[test]
    fn remove_register_compacts() {
        let l = RegisterLayout::new()
            .with("a", 1, Owner::Control)
            .unwrap()
            .with("b", 2, Owner::Control)
            .unwrap()
            .with("c", 1, Owner::Control)
            .unwrap();
        // a=1, b=2, c=1
        let s = StateVector::basis(l, 0b1101).unwrap();
        let r = s.remove_register("b", 2).unwrap();
        assert_eq!(r.num_qubits(), 2);
        assert_eq!(r.amplitude(0b11), ONE);
    }

    #[test]
    fn matching_enumeration_covers_subspace() {
        let mut seen = Vec::new();
        for_each_matching(16, 0b0101, 0b0001, |j| seen.push(j));
        assert_eq!(seen, vec![0b0001, 0b0011, 0b1001, 0b1011]);
    }
}
