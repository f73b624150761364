//! Built-in verification suites with a pass/fail table.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::str::FromStr;

use dqsim_core::apps::{
    exact_qpe_distribution, grover_success_probability, parity_phase_lcu, run_dgrover, run_dqpe, GroverInstance,
};
use dqsim_core::lb::{circuit_to_hamiltonian, classical_ip, run_pst, IpEvaluator, IpInstance};
use dqsim_core::lcu::{
    discard_ancillas, dro_apply, BlockEncoding, BlockOracle, LcuDecomposition, LcuTerm, ReflectionSpec, RoMode,
};
use dqsim_core::linalg::{self, Mat, C64, I, ONE, ZERO};
use dqsim_core::pf::{ledger_identity as dpf_ledger, run_dpf_clustered, DpfOptions, Steps};
use dqsim_core::qnet::{distribute_repetition_state, CommLedger, NetworkTopology};
use dqsim_core::qsp::{self, run_dqsp_clustered, DqspOptions};
use dqsim_core::ts::{self, run_dts_clustered, DtsOptions, TaylorPlan, TsMode};
use dqsim_core::{
    cluster, parse_pauli_sum, ClusteredHamiltonian, Error, Owner, PauliString, QubitPartition, RegisterLayout, Result,
    StateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Dbe,
    Dro,
    Oaa,
    Dpf,
    Dts,
    Dqsp,
    Pst,
    Ip,
    Qnet,
    Apps,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Dbe,
        Suite::Dro,
        Suite::Oaa,
        Suite::Dpf,
        Suite::Dts,
        Suite::Dqsp,
        Suite::Pst,
        Suite::Ip,
        Suite::Qnet,
        Suite::Apps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dbe => "dbe",
            Suite::Dro => "dro",
            Suite::Oaa => "oaa",
            Suite::Dpf => "dpf",
            Suite::Dts => "dts",
            Suite::Dqsp => "dqsp",
            Suite::Pst => "pst",
            Suite::Ip => "ip",
            Suite::Qnet => "qnet",
            Suite::Apps => "apps",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn record(&mut self, name: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            detail,
        });
    }
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    if suite == Suite::All {
        return Suite::EACH.into_iter().flat_map(run_suite).collect();
    }
    let mut rec = Recorder { suite, checks: Vec::new() };
    match suite {
        Suite::Dbe => dbe(&mut rec),
        Suite::Dro => dro(&mut rec),
        Suite::Oaa => oaa(&mut rec),
        Suite::Dpf => dpf(&mut rec),
        Suite::Dts => dts(&mut rec),
        Suite::Dqsp => dqsp(&mut rec),
        Suite::Pst => pst(&mut rec),
        Suite::Ip => ip(&mut rec),
        Suite::Qnet => qnet(&mut rec),
        Suite::Apps => apps(&mut rec),
        Suite::All => unreachable!(),
    }
    rec.checks
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<5} {:<width$}  {mark}  {}\n", c.suite.name(), c.name, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    out
}

/// Two nodes of one and two qubits with cross-node couplings.
fn sample() -> Result<ClusteredHamiltonian> {
    let h = parse_pauli_sum("0.8 XXI\n-0.5 IZZ\n0.3 ZII\n0.6 IYI\n0.4 YIX")?;
    cluster(&h, &QubitPartition::contiguous(&[1, 2])?)
}

fn label_width(ch: &ClusteredHamiltonian) -> u64 {
    dqsim_core::caps::log2_ceil(ch.num_edges() + ch.gamma()) as u64
}

fn sys_layout(n: usize) -> Result<RegisterLayout> {
    RegisterLayout::new().with("sys", n, Owner::Partitioned)
}

/// Deterministic normalized state with varied complex amplitudes.
fn spread_state(layout: RegisterLayout, n: usize) -> Result<StateVector> {
    let mut amps = vec![ZERO; 1 << layout.total_qubits()];
    for (j, a) in amps.iter_mut().take(1 << n).enumerate() {
        let x = j as f64 + 1.0;
        *a = C64::new((0.7 * x).sin(), (1.3 * x).cos());
    }
    let mut s = StateVector::from_amplitudes(layout, amps)?;
    s.normalize()?;
    Ok(s)
}

fn dbe(rec: &mut Recorder) {
    rec.record("block equals H/alpha", (|| {
        let ch = sample()?;
        let be = BlockEncoding::new(&ch, "")?;
        let block = be.block(&NetworkTopology::star(2), &mut CommLedger::new())?;
        let want = ch.flatten().dense_matrix()? / C64::new(ch.alpha(), 0.0);
        let d = linalg::max_entry_distance(&block, &want);
        Ok((d <= 1e-9, format!("max-entry distance {d:.1e}")))
    })());
    rec.record("invocation charge", (|| {
        let ch = sample()?;
        let be = BlockEncoding::new(&ch, "")?;
        let mut ledger = CommLedger::new();
        be.block(&NetworkTopology::star(2), &mut ledger)?;
        let want = 2 * 2 * label_width(&ch);
        let t = ledger.totals();
        Ok((
            t.qubits == want && t.classical_bits == 2 * want,
            format!("{} qubits, {} bits, expected {want}", t.qubits, t.classical_bits),
        ))
    })());
}

fn dro(rec: &mut Recorder) {
    for (label, phi) in [("pi/8", FRAC_PI_8), ("pi/4", FRAC_PI_4), ("pi/2", FRAC_PI_2)] {
        for mode in [RoMode::Direct, RoMode::Strict] {
            let name = format!("{mode:?} reflection at {label}").to_lowercase();
            rec.record(&name, (|| {
                let topo = NetworkTopology::star(2);
                let layout = sys_layout(1)?.with("a1", 1, Owner::Node(1))?.with("a2", 1, Owner::Node(2))?;
                let input = spread_state(layout, 3)?;
                let want: Vec<C64> = input
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(j, a)| if j >> 1 == 0 { a * C64::from_polar(1.0, -phi) } else { *a })
                    .collect();
                let spec = ReflectionSpec::new(phi, vec!["a1".into(), "a2".into()], mode)?;
                let mut s = input.clone();
                let p = dro_apply(&spec, &mut s, &topo, &mut CommLedger::new())?;
                let k = 1.0 / p.sqrt();
                let d = s
                    .amplitudes()
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| (a * k - b).norm())
                    .fold(0.0, f64::max);
                Ok((d <= 1e-9, format!("distance {d:.1e}, success probability {p:.6}")))
            })());
        }
    }
}

fn oaa(rec: &mut Recorder) {
    rec.record("amplified rotation", (|| {
        let theta = 0.9f64;
        let mut rot: Vec<Option<Mat>> = ["X", "Z"]
            .iter()
            .map(|a| PauliString::parse(a).map(|p| p.dense()))
            .collect();
        rot[0] = rot[0].take().map(|m| m * (-I));
        let d = LcuDecomposition::new(
            QubitPartition::contiguous(&[1, 1])?,
            vec![
                LcuTerm { beta: theta.cos(), factors: vec![None; 2] },
                LcuTerm { beta: theta.sin(), factors: rot },
            ],
        )?
        .padded_to_two()?;
        let input = spread_state(sys_layout(2)?, 2)?;
        let mut s = input.clone();
        d.oaa(&mut s, &NetworkTopology::star(2), &mut CommLedger::new())?;
        let out = discard_ancillas(&s, &d.ancillas())?;
        let want = d.dense()? * nalgebra_column(input.amplitudes());
        let overlap: C64 = want.iter().zip(out.amplitudes()).map(|(a, b)| a.conj() * b).sum();
        let defect = 1.0 - overlap.norm_sqr();
        Ok((defect <= 1e-12, format!("1 - F = {defect:.1e}")))
    })());
}

fn nalgebra_column(v: &[C64]) -> Mat {
    Mat::from_column_slice(v.len(), 1, v)
}

fn dpf(rec: &mut Recorder) {
    for p in [1usize, 2] {
        rec.record(&format!("error falls with r, p={p}"), (|| {
            let ch = sample()?;
            let topo = NetworkTopology::star(2);
            let err = |r| -> Result<f64> {
                let opts = DpfOptions { p, t: 1.0, steps: Steps::Fixed(r), input: None, eps_for_prediction: 1e-3 };
                Ok(run_dpf_clustered(&ch, &topo, &opts)?.error_vs_exact.unwrap_or(f64::NAN))
            };
            let (e8, e16) = (err(8)?, err(16)?);
            let slope = (e16 / e8).log2();
            Ok(((slope + p as f64).abs() <= 0.15 * p as f64, format!("slope {slope:.3}")))
        })());
        rec.record(&format!("ledger identity, p={p}"), (|| {
            let ch = sample()?;
            let topo = NetworkTopology::star(2);
            let opts = DpfOptions { p, t: 1.0, steps: Steps::Fixed(3), input: None, eps_for_prediction: 1e-3 };
            let got = run_dpf_clustered(&ch, &topo, &opts)?.ledger.qubits;
            let want = dpf_ledger(&ch, p, 3)?;
            Ok((got == want, format!("{got} qubits, expected {want}")))
        })());
    }
}

fn dts(rec: &mut Recorder) {
    for mode in [TsMode::Direct, TsMode::Strict] {
        rec.record(&format!("{mode:?} run within epsilon").to_lowercase(), (|| {
            let h = parse_pauli_sum("0.7 XX\n0.4 ZI\n-0.3 IZ")?;
            let ch = cluster(&h, &QubitPartition::contiguous(&[1, 1])?)?;
            let topo = NetworkTopology::star(2);
            let (t, k) = (0.8, 2);
            let plan = TaylorPlan::new(ch.alpha(), t, k)?;
            let eps = 2.0 * plan.r as f64 * ts::tail(k) * (1.0 + 1e-9);
            let opts = DtsOptions { t, eps, k: Some(k), mode, input: None };
            let res = run_dts_clustered(&ch, &topo, &opts)?;
            let err = res.error_vs_exact.unwrap_or(f64::NAN);
            let want = ts::ledger_identity(&ch, &topo, &plan)?;
            Ok((
                err <= eps && res.ledger.qubits == want,
                format!("error {err:.1e} vs {eps:.1e}, {} qubits vs {want}", res.ledger.qubits),
            ))
        })());
    }
}

fn dqsp(rec: &mut Recorder) {
    rec.record("run within epsilon", (|| {
        let ch = sample()?;
        let topo = NetworkTopology::star(2);
        let eps = 1e-5;
        let res = run_dqsp_clustered(&ch, &topo, &DqspOptions::new(1.5 / ch.alpha(), eps))?;
        let err = res.error_vs_exact.unwrap_or(f64::NAN);
        let be = BlockEncoding::new(&ch, "")?;
        let want = qsp::ledger_identity(&be, &topo, res.steps_or_queries as usize)?;
        Ok((
            err <= 10.0 * eps && res.ledger.qubits == want,
            format!("error {err:.1e}, {} queries, {} qubits vs {want}", res.steps_or_queries, res.ledger.qubits),
        ))
    })());
}

fn pst(rec: &mut Recorder) {
    rec.record("couplings for three gates", (|| {
        let ch = circuit_to_hamiltonian(&vec![Mat::identity(2, 2); 3])?;
        let c = ch.couplings();
        let want = [3f64.sqrt(), 2.0, 3f64.sqrt()];
        let ok = c.len() == 3 && c.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12);
        Ok((ok, format!("{c:?}")))
    })());
    for n in 1..=6usize {
        rec.record(&format!("transfer through {n} gates"), (|| {
            let gates: Vec<Mat> = (0..n)
                .map(|g| {
                    let a = 0.4 + 0.3 * g as f64;
                    let (c, s) = (a.cos(), a.sin());
                    Mat::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)])
                })
                .collect();
            let ch = circuit_to_hamiltonian(&gates)?;
            let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
            let out = run_pst(&ch, &psi)?;
            let ok = out.probability >= 1.0 - 1e-9 && out.fidelity() >= 1.0 - 1e-9;
            Ok((ok, format!("probability {:.12}, fidelity {:.12}", out.probability, out.fidelity())))
        })());
    }
}

fn ip(rec: &mut Recorder) {
    let bits = |v: usize, n: usize| -> Vec<bool> { (0..n).map(|i| v >> i & 1 == 1).collect() };
    for (gamma, n) in [(2usize, 2usize), (2, 3), (3, 2)] {
        rec.record(&format!("exhaustive, {gamma} parties of {n} bits"), (|| {
            let eval = IpEvaluator::new(gamma, n)?;
            let inputs = 1usize << (gamma * n);
            let mut wrong = 0;
            for v in 0..inputs {
                let parts = (0..gamma).map(|g| bits(v >> (g * n), n)).collect();
                let inst = IpInstance::new(parts)?;
                if eval.evaluate(&inst)?.bit != classical_ip(&inst) {
                    wrong += 1;
                }
            }
            Ok((wrong == 0, format!("{inputs} inputs, {wrong} wrong")))
        })());
    }
}

fn qnet(rec: &mut Recorder) {
    for gamma in [3usize, 4, 5] {
        rec.record(&format!("chain vs star, {gamma} nodes"), (|| {
            let weights = [(0, 0.5), (1, 0.5), (2, 0.5), (3, 0.5)];
            let mut ls = CommLedger::new();
            let star = distribute_repetition_state(&weights, 2, &NetworkTopology::star(gamma), &mut ls)?;
            let mut lc = CommLedger::new();
            let chain = distribute_repetition_state(&weights, 2, &NetworkTopology::chain(gamma), &mut lc)?;
            let f = star.fidelity(&chain);
            let ok = f >= 1.0 - 1e-12 && ls.qubits() == 2 * gamma as u64 && lc.qubits() == 2 * (gamma as u64 - 1);
            Ok((ok, format!("fidelity {f:.12}, star {} qubits, chain {}", ls.qubits(), lc.qubits())))
        })());
    }
}

fn apps(rec: &mut Recorder) {
    for (gamma, n, marked) in [(2usize, 1usize, 3usize), (2, 2, 6), (3, 1, 5)] {
        rec.record(&format!("grover, N = {}", 1 << (gamma * n)), (|| {
            let inst = GroverInstance::new(gamma, n, marked);
            let out = run_dgrover(&inst, &NetworkTopology::star(gamma), &mut CommLedger::new())?;
            let want = grover_success_probability(inst.items(), out.iterations);
            let d = (out.success_probability - want).abs();
            Ok((d <= 1e-12, format!("{:.9} after {} iterations", out.success_probability, out.iterations)))
        })());
    }
    for (label, theta) in [("exact 5/8", 0.625), ("1/3", 1.0 / 3.0)] {
        rec.record(&format!("phase estimation, {label}"), (|| {
            let part = QubitPartition::contiguous(&[1, 1])?;
            let u = parity_phase_lcu(part, theta)?;
            let psi = [ONE, ZERO, ZERO, ZERO];
            let est = run_dqpe(&u, &psi, 3, &NetworkTopology::star(2), &mut CommLedger::new())?;
            let exact = exact_qpe_distribution(theta, 3);
            let d = est.distribution.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok((d <= 1e-10, format!("top {} with {:.6}", est.top_bits(), est.top_probability)))
        })());
    }
}
