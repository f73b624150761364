//! Distributed quantum signal processing.
//!
//! The d-BE unitary `U` is Hermitian, so on each eigenvalue plane of `H` it
//! acts as the reflection signal `R(λ/α)` and `2Π − I` acts as `Z`. Phase
//! sequences for the even (cosine) and odd (sine) parts of `e^{−iτx}` are
//! run in superposition on a branch qubit `b`; a second qubit `r` pairs each
//! sequence with its phase-negated copy to keep only the real part.

mod bessel;
mod phases;

pub use bessel::{bessel_j, bessel_j_all, bessel_j_series};
pub use phases::{
    check_grid, chebyshev_eval, grid_residual, response_reflection, response_wx, solve_phases, Parity,
    QspPhaseSequence,
};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::lcu::{self, BlockEncoding, BlockOracle};
use crate::linalg::{self, C64, I};
use crate::pauli::{cluster, ClusteredHamiltonian, OperatorSum, QubitPartition};
use crate::qnet::{CommLedger, NetworkTopology};
use crate::run::{basis_amplitudes, embed_system, system_slice, system_state, Prediction, RunResult};
use crate::sv::{self, Condition, Owner, RegisterLayout, StateVector, UnitarySpec};

pub const BRANCH: &str = "qsp_b";
pub const REAL_PART: &str = "qsp_r";
pub const DEFAULT_KAPPA: f64 = 0.9;

/// Truncated `e^{−iτx} = J_0(τ) + 2Σ_{k≥1} (−i)^k J_k(τ) T_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiAngerSeries {
    pub tau: f64,
    pub q: usize,
    /// `J_0(τ) … J_q(τ)`.
    pub bessel: Vec<f64>,
    /// `Σ_{k>q} 2|J_k(τ)|`.
    pub tail: f64,
}

impl JacobiAngerSeries {
    /// Complex Chebyshev coefficient of `T_k`.
    pub fn coefficient(&self, k: usize) -> C64 {
        if k > self.q {
            return C64::new(0.0, 0.0);
        }
        if k == 0 {
            return C64::new(self.bessel[0], 0.0);
        }
        (-I).powu(k as u32) * 2.0 * self.bessel[k]
    }

    /// Chebyshev coefficients of the truncated `cos(τx)`.
    pub fn cos_coeffs(&self) -> Vec<f64> {
        (0..=self.q)
            .map(|k| if k % 2 == 0 { self.coefficient(k).re } else { 0.0 })
            .collect()
    }

    /// Chebyshev coefficients of the truncated `sin(τx)`.
    pub fn sin_coeffs(&self) -> Vec<f64> {
        (0..=self.q)
            .map(|k| if k % 2 == 1 { -self.coefficient(k).im } else { 0.0 })
            .collect()
    }
}

/// Smallest `q` with `Σ_{k>q} 2|J_k(τ)| ≤ ε/2`.
pub fn jacobi_anger_truncation(tau: f64, eps: f64) -> Result<JacobiAngerSeries> {
    if !(tau >= 0.0) || !(eps > 0.0) {
        return Err(Error::Domain("Jacobi–Anger truncation needs τ ≥ 0 and ε > 0".into()));
    }
    let top = tau.ceil() as usize + 60;
    let j = bessel_j_all(top, tau);
    let mut tails = vec![0.0; top + 1];
    for k in (0..top).rev() {
        tails[k] = tails[k + 1] + 2.0 * j[k + 1].abs();
    }
    let q = (0..=top).find(|&k| tails[k] <= eps / 2.0).unwrap_or(top);
    Ok(JacobiAngerSeries {
        tau,
        q,
        bessel: j[..=q].to_vec(),
        tail: tails[q],
    })
}

/// Cached phase sequences for one `(τ, ε, κ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSidecar {
    pub tau: f64,
    pub epsilon: f64,
    pub kappa: f64,
    /// `W(x)`-convention phases of the cosine and sine parts.
    pub angles: [Vec<f64>; 2],
}

/// Phase sequences for `κ·cos(τx)` and `κ·sin(τx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QspPlan {
    pub series: JacobiAngerSeries,
    pub epsilon: f64,
    pub kappa: f64,
    pub cos: QspPhaseSequence,
    pub sin: QspPhaseSequence,
}

fn scaled(c: &[f64], k: f64) -> Vec<f64> {
    c.iter().map(|x| x * k).collect()
}

fn phase_tolerance(kappa: f64, eps: f64) -> f64 {
    (kappa * eps / 10.0).min(1e-8)
}

impl QspPlan {
    pub fn new(tau: f64, eps: f64, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::Domain(format!("κ = {kappa} must lie in (0, 1)")));
        }
        let series = jacobi_anger_truncation(tau, eps)?;
        let tol = phase_tolerance(kappa, eps);
        let cos = solve_phases(&scaled(&series.cos_coeffs(), kappa), tol)?;
        let sin = solve_phases(&scaled(&series.sin_coeffs(), kappa), tol)?;
        Ok(Self {
            series,
            epsilon: eps,
            kappa,
            cos,
            sin,
        })
    }

    /// Rebuilds a plan from cached phases after re-verifying both grids.
    pub fn from_sidecar(s: &PhaseSidecar) -> Result<Self> {
        let series = jacobi_anger_truncation(s.tau, s.epsilon)?;
        let tol = phase_tolerance(s.kappa, s.epsilon);
        let mk = |angles: &Vec<f64>, coeffs: Vec<f64>| -> Result<QspPhaseSequence> {
            let degree = angles.len().checked_sub(1).ok_or_else(|| Error::Config("empty phase list".into()))?;
            let mut seq = QspPhaseSequence {
                angles: angles.clone(),
                degree,
                parity: if degree % 2 == 0 { Parity::Even } else { Parity::Odd },
                residual: 0.0,
            };
            seq.residual = seq.verify(&scaled(&coeffs, s.kappa), tol)?;
            Ok(seq)
        };
        let cos = mk(&s.angles[0], series.cos_coeffs())?;
        let sin = mk(&s.angles[1], series.sin_coeffs())?;
        Ok(Self {
            series,
            epsilon: s.epsilon,
            kappa: s.kappa,
            cos,
            sin,
        })
    }

    pub fn sidecar(&self) -> PhaseSidecar {
        PhaseSidecar {
            tau: self.series.tau,
            epsilon: self.epsilon,
            kappa: self.kappa,
            angles: [self.cos.angles.clone(), self.sin.angles.clone()],
        }
    }

    /// Queries to the block encoding: the longer of the two sequences.
    pub fn queries(&self) -> usize {
        self.cos.degree.max(self.sin.degree)
    }
}

pub fn save_sidecar(path: &Path, s: &PhaseSidecar) -> Result<()> {
    let text = serde_json::to_string_pretty(s).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_sidecar(path: &Path) -> Result<PhaseSidecar> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("phase sidecar: {e}")))
}

/// `(2Π − I)·U`, with `U` the d-BE unitary.
pub fn apply_walk(
    be: &BlockEncoding,
    state: &mut StateVector,
    topo: &NetworkTopology,
    ledger: &mut CommLedger,
) -> Result<()> {
    be.apply(state, topo, ledger, None, false)?;
    lcu::reflect_zero(state, &be.ancillas(), topo, ledger)?;
    for a in state.amplitudes_mut() {
        *a = -*a;
    }
    Ok(())
}

/// One eigenvalue plane of the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPlane {
    pub lambda: f64,
    /// Eigenphases of the walk restricted to the plane, in `(−π, π]`.
    pub phases: [f64; 2],
    /// How far `W` maps the plane outside itself.
    pub leakage: f64,
}

/// Restricts the walk to `span{|0⟩|λ⟩, W|0⟩|λ⟩}` for each eigenvector of `H`.
pub fn walk_planes(be: &BlockEncoding, topo: &NetworkTopology) -> Result<Vec<WalkPlane>> {
    let ch = be.clustered();
    let n = ch.qubit_count();
    caps::check_dense("walk planes", n)?;
    let (values, vectors) = linalg::hermitian_eigen(&ch.flatten().dense_matrix()?);
    let mut layout = RegisterLayout::new().with("sys", n, Owner::Partitioned)?;
    let probe = StateVector::allocate(layout.clone())?;
    let mut tmp = probe;
    be.attach(&mut tmp, topo)?;
    layout = tmp.layout().clone();
    let mut out = Vec::new();
    for (i, &lambda) in values.iter().enumerate() {
        let col: Vec<C64> = (0..1 << n).map(|r| vectors[(r, i)]).collect();
        let v0 = embed_system(layout.clone(), &col)?;
        let mut v1 = v0.clone();
        apply_walk(be, &mut v1, topo, &mut CommLedger::new())?;
        let a = v0.inner(&v1);
        let mut perp = v1.clone();
        for (p, z) in perp.amplitudes_mut().iter_mut().zip(v0.amplitudes()) {
            *p -= a * z;
        }
        let pn = perp.norm_sqr().sqrt();
        if pn < 1e-9 {
            out.push(WalkPlane {
                lambda,
                phases: [a.arg(), a.arg()],
                leakage: 0.0,
            });
            continue;
        }
        for p in perp.amplitudes_mut() {
            *p /= pn;
        }
        let mut we = perp.clone();
        apply_walk(be, &mut we, topo, &mut CommLedger::new())?;
        let m01 = v0.inner(&we);
        let m11 = perp.inner(&we);
        let mut resid = we.clone();
        for ((r, z), e) in resid
            .amplitudes_mut()
            .iter_mut()
            .zip(v0.amplitudes())
            .zip(perp.amplitudes())
        {
            *r -= m01 * z + m11 * e;
        }
        let m10 = C64::new(pn, 0.0);
        let half_tr = (a + m11) / 2.0;
        let det = a * m11 - m01 * m10;
        let disc = (half_tr * half_tr - det).sqrt();
        let (e1, e2) = (half_tr + disc, half_tr - disc);
        out.push(WalkPlane {
            lambda,
            phases: [e1.arg(), e2.arg()],
            leakage: resid.norm_sqr().sqrt(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DqspOptions {
    pub t: f64,
    pub eps: f64,
    pub kappa: f64,
    pub input: Option<Vec<C64>>,
    /// Precomputed phases; solved from `(αt, ε, κ)` when absent.
    pub sidecar: Option<PhaseSidecar>,
}

impl DqspOptions {
    pub fn new(t: f64, eps: f64) -> Self {
        Self {
            t,
            eps,
            kappa: DEFAULT_KAPPA,
            input: None,
            sidecar: None,
        }
    }
}

pub fn run_dqsp(h: &OperatorSum, part: &QubitPartition, topo: &NetworkTopology, opts: &DqspOptions) -> Result<RunResult> {
    let ch = cluster(h, part)?;
    run_dqsp_clustered(&ch, topo, opts)
}

struct Circuit<'a> {
    be: &'a BlockEncoding,
    topo: &'a NetworkTopology,
    layout: RegisterLayout,
    /// Reflection-convention phases per branch `b`, and degrees.
    angles: [Vec<f64>; 2],
    degrees: [usize; 2],
    kappa: f64,
}

impl Circuit<'_> {
    fn branch(&self, b: usize, r: usize) -> Result<Condition> {
        lcu_both(self.layout.condition(BRANCH, b)?, self.layout.condition(REAL_PART, r)?)
    }

    fn angle(&self, b: usize, r: usize, k: usize) -> f64 {
        let a = self.angles[b][k];
        if r == 0 {
            a
        } else {
            -a
        }
    }

    /// Returns `(2/κ)·⟨0|…|0⟩ applied to sys`, plus the kept weight.
    fn run(&self, sys: &[C64], ledger: &mut CommLedger) -> Result<(Vec<C64>, f64)> {
        let n = self.be.clustered().qubit_count();
        let mut s = embed_system(self.layout.clone(), sys)?;
        let before = s.norm_sqr();
        let bq = self.layout.offset(BRANCH)?;
        let rq = self.layout.offset(REAL_PART)?;
        let names = self.be.ancillas();
        let zero = self.layout.all_zero(&names)?;
        s.apply(&UnitarySpec::H(bq))?;
        s.apply(&UnitarySpec::H(rq))?;
        for b in 0..2 {
            let d = self.degrees[b] as u32;
            for r in 0..2 {
                let mut f = if r == 0 { I.powu(d) } else { (-I).powu(d) };
                if b == 1 {
                    f *= -I;
                }
                f *= C64::from_polar(1.0, self.angle(b, r, 0));
                s.apply_phase(self.branch(b, r)?, f);
            }
        }
        let q = self.degrees[0].max(self.degrees[1]);
        let longer = usize::from(self.degrees[1] > self.degrees[0]);
        for k in 1..=q {
            if k == q {
                let c = self.layout.condition(BRANCH, longer)?;
                self.be.apply(&mut s, self.topo, ledger, Some(c), false)?;
                for r in 0..2 {
                    let ph = C64::from_polar(1.0, self.angle(longer, r, k));
                    s.apply_phase(self.branch(longer, r)?, ph);
                }
            } else {
                self.be.apply(&mut s, self.topo, ledger, None, false)?;
                for b in 0..2 {
                    if k > self.degrees[b] {
                        continue;
                    }
                    for r in 0..2 {
                        let phi = self.angle(b, r, k);
                        let br = self.branch(b, r)?;
                        s.apply_phase(br, C64::from_polar(1.0, -phi));
                        s.apply_phase(lcu_both(br, zero)?, C64::from_polar(1.0, 2.0 * phi));
                    }
                }
                lcu::charge_fan_out(self.topo, ledger, "d-RO")?;
            }
        }
        s.apply(&UnitarySpec::H(bq))?;
        s.apply(&UnitarySpec::H(rq))?;
        let keep = lcu_both(zero, self.branch(0, 0)?)?;
        let kept = s.project(keep);
        let scale = 2.0 / self.kappa;
        let out = system_slice(&s, n).into_iter().map(|a| a * scale).collect();
        Ok((out, kept / before))
    }
}

fn lcu_both(a: Condition, b: Condition) -> Result<Condition> {
    a.and(b).ok_or_else(|| Error::Shape("contradictory conditions".into()))
}

/// Exact ledger total `q·(2Γw + Γ)` on a star.
pub fn ledger_identity(be: &BlockEncoding, topo: &NetworkTopology, queries: usize) -> Result<u64> {
    Ok(queries as u64 * (be.invocation_charge(topo)? + lcu::fan_out_charge(topo)?))
}

pub fn run_dqsp_clustered(ch: &ClusteredHamiltonian, topo: &NetworkTopology, opts: &DqspOptions) -> Result<RunResult> {
    let n = ch.qubit_count();
    let input = opts.input.clone().unwrap_or_else(|| basis_amplitudes(n, 0));
    let alpha = ch.alpha();
    let mut metadata = BTreeMap::new();
    metadata.insert("phase_convention".into(), "reflection".into());
    metadata.insert("kappa".into(), opts.kappa.to_string());
    if opts.t < 0.0 {
        return Err(Error::Domain("negative evolution time".into()));
    }
    if opts.t == 0.0 || alpha == 0.0 {
        return Ok(RunResult {
            protocol: "dqsp".into(),
            output: system_state(n, input)?,
            error_vs_exact: Some(0.0),
            ledger: CommLedger::new().report(),
            steps_or_queries: 0,
            predicted: predicted_cost_dqsp(ch, opts.t, opts.eps)?,
            success_probability: Some(1.0),
            metadata,
        });
    }
    let tau = alpha * opts.t;
    let plan = match &opts.sidecar {
        Some(s) => {
            if (s.tau - tau).abs() > 1e-12 * tau.max(1.0) {
                return Err(Error::Config(format!("phase sidecar is for τ = {}, run needs {tau}", s.tau)));
            }
            QspPlan::from_sidecar(s)?
        }
        None => QspPlan::new(tau, opts.eps, opts.kappa)?,
    };
    let be = BlockEncoding::new(ch, "be_")?;
    let mut probe = StateVector::allocate(RegisterLayout::new().with("sys", n, Owner::Partitioned)?)?;
    be.attach(&mut probe, topo)?;
    probe.append_register(BRANCH, 1, lcu::hub_owner(topo))?;
    probe.append_register(REAL_PART, 1, lcu::hub_owner(topo))?;
    let circuit = Circuit {
        be: &be,
        topo,
        layout: probe.layout().clone(),
        angles: [plan.cos.reflection_angles(), plan.sin.reflection_angles()],
        degrees: [plan.cos.degree, plan.sin.degree],
        kappa: plan.kappa,
    };
    let mut ledger = CommLedger::new();
    let (out, prob) = circuit.run(&input, &mut ledger)?;
    let mut output = system_state(n, out)?;
    output.normalize()?;
    let error_vs_exact = if n <= caps::dense_cap() {
        let implemented = sv::operator_from_columns(n, |j| {
            Ok(circuit.run(&basis_amplitudes(n, j), &mut CommLedger::new())?.0)
        })?;
        let exact = sv::exact_evolution(&ch.flatten(), opts.t)?;
        Some(linalg::operator_distance(&implemented, &exact)?)
    } else {
        None
    };
    metadata.insert("q".into(), plan.series.q.to_string());
    metadata.insert("phase_residual".into(), format!("{:e}", plan.cos.residual.max(plan.sin.residual)));
    Ok(RunResult {
        protocol: "dqsp".into(),
        output,
        error_vs_exact,
        ledger: ledger.report(),
        steps_or_queries: plan.queries() as u64,
        predicted: predicted_cost_dqsp(ch, opts.t, opts.eps)?,
        success_probability: Some(prob),
        metadata,
    })
}

/// `Γ·⌈log₂(|E|+Γ)⌉·(αt + ln(1/ε))`, constants set to 1.
pub fn predicted_cost_dqsp(ch: &ClusteredHamiltonian, t: f64, eps: f64) -> Result<Prediction> {
    Ok(Prediction {
        value: dqsp_cost_formula(ch.alpha(), t, eps, ch.gamma(), ch.num_edges()),
        formula: "Γ·⌈log₂(|E|+Γ)⌉·(α·t + ln(1/ε))".into(),
    })
}

pub fn dqsp_cost_formula(alpha: f64, t: f64, eps: f64, gamma: usize, edges: usize) -> f64 {
    gamma as f64 * caps::log2_ceil(edges + gamma) as f64 * (alpha * t + (1.0 / eps).ln())
}
