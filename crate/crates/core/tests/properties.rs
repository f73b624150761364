use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dqsim_core::apps::{grover_success_probability, parity_phase_lcu, run_dgrover, run_dqpe, GroverInstance};
use dqsim_core::cost::{cost_table, CostModel, CostParams};
use dqsim_core::lcu::BlockEncoding;
use dqsim_core::linalg::{self, Mat, C64, ONE, ZERO};
use dqsim_core::pauli::nested_commutator_norm;
use dqsim_core::pf::{run_dpf_clustered, suzuki_schedule, trotter_operator, DpfOptions, Steps};
use dqsim_core::qnet::{distribute_repetition_state, CommLedger, NetworkTopology};
use dqsim_core::sv::exact_evolution;
use dqsim_core::{
    cluster, random_pauli_sum, ClusteredHamiltonian, OperatorSum, Owner, PauliString, QubitPartition, RegisterLayout,
    StateVector, UnitarySpec,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

/// Random partition sizes summing to `n` with `gamma` nonempty blocks.
fn sizes(rng: &mut ChaCha8Rng, gamma: usize, n: usize) -> Vec<usize> {
    let mut s = vec![1; gamma];
    for _ in gamma..n {
        s[rng.gen_range(0..gamma)] += 1;
    }
    s
}

fn instance(seed: u64) -> (OperatorSum, QubitPartition) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = rng.gen_range(2..=3);
    let n = rng.gen_range(gamma..=4);
    let terms = rng.gen_range(2..=6);
    let h = random_pauli_sum(&mut rng, n, terms).unwrap();
    let part = QubitPartition::contiguous(&sizes(&mut rng, gamma, n)).unwrap();
    (h, part)
}

fn clustered(seed: u64) -> ClusteredHamiltonian {
    let (h, part) = instance(seed);
    cluster(&h, &part).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, layout: RegisterLayout) -> StateVector {
    let dim = 1 << layout.total_qubits();
    let amps = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let mut s = StateVector::from_amplitudes(layout, amps).unwrap();
    s.normalize().unwrap();
    s
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn clustering_preserves_operator(seed in any::<u64>()) {
        let (h, part) = instance(seed);
        let ch = cluster(&h, &part).unwrap();
        let d = linalg::max_entry_distance(&ch.flatten().dense_matrix().unwrap(), &h.dense_matrix().unwrap());
        prop_assert!(d < 1e-12);
        let summed = (0..=ch.num_edges())
            .map(|i| ch.summand(i).dense_matrix().unwrap())
            .fold(Mat::zeros(1 << h.qubit_count(), 1 << h.qubit_count()), |a, b| a + b);
        prop_assert!(linalg::max_entry_distance(&summed, &h.dense_matrix().unwrap()) < 1e-12);
    }

    #[test]
    fn one_norm_bounds_spectral_norm(seed in any::<u64>()) {
        let (h, _) = instance(seed);
        prop_assert!(h.one_norm() + 1e-12 >= h.spectral_norm().unwrap());
    }

    #[test]
    fn dense_form_is_additive(a in any::<u64>(), b in any::<u64>()) {
        let mut ra = ChaCha8Rng::seed_from_u64(a);
        let mut rb = ChaCha8Rng::seed_from_u64(b);
        let x = random_pauli_sum(&mut ra, 3, 4).unwrap();
        let y = random_pauli_sum(&mut rb, 3, 4).unwrap();
        let lhs = x.add(&y).unwrap().dense_matrix().unwrap();
        let rhs = x.dense_matrix().unwrap() + y.dense_matrix().unwrap();
        prop_assert!(linalg::max_entry_distance(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn gates_preserve_norm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = RegisterLayout::new().with("sys", 4, Owner::Partitioned).unwrap();
        let mut s = random_state(&mut rng, layout);
        for _ in 0..12 {
            let q = rng.gen_range(0..4);
            let r = (q + rng.gen_range(1..4)) % 4;
            let gate = match rng.gen_range(0..5) {
                0 => UnitarySpec::H(q),
                1 => UnitarySpec::Cnot { control: q, target: r },
                2 => UnitarySpec::Phase { qubit: q, phi: rng.gen_range(0.0..6.3) },
                3 => UnitarySpec::Mcx { controls: vec![q], target: r },
                _ => UnitarySpec::Dense { qubits: vec![q, r], matrix: linalg::random_unitary(&mut rng, 4) },
            };
            s.apply(&gate).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_exponential_matches_dense(seed in any::<u64>(), angle in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_pauli_sum(&mut rng, 3, 1).unwrap();
        let (c, p) = h.terms()[0].clone();
        let layout = RegisterLayout::new().with("sys", 3, Owner::Partitioned).unwrap();
        let input = random_state(&mut rng, layout);
        let mut s = input.clone();
        s.apply_pauli_exponential(c, &p, 0, angle).unwrap();
        let u = exact_evolution(&h, angle).unwrap();
        let want = u * Mat::from_column_slice(8, 1, input.amplitudes());
        let d = want.iter().zip(s.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn register_marginals_sum_to_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layout = RegisterLayout::new()
            .with("a", 2, Owner::Node(1)).unwrap()
            .with("b", 2, Owner::Node(2)).unwrap();
        let s = random_state(&mut rng, layout);
        let probs = s.probabilities("b").unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (v, &p) in probs.iter().enumerate() {
            if p > 1e-6 {
                let (post, q) = s.post_select("b", v).unwrap();
                prop_assert!((q - p).abs() < 1e-12);
                prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_bits_are_twice_qubits(seed in any::<u64>(), p in 1usize..=2, r in 1usize..=3) {
        let ch = clustered(seed);
        let topo = NetworkTopology::star(ch.gamma());
        let opts = DpfOptions { p, t: 0.5, steps: Steps::Fixed(r), input: None, eps_for_prediction: 1e-3 };
        let res = run_dpf_clustered(&ch, &topo, &opts).unwrap();
        prop_assert_eq!(res.ledger.classical_bits, 2 * res.ledger.qubits);
    }

    #[test]
    fn chain_and_star_prepare_same_state(seed in any::<u64>(), gamma in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let weights: Vec<(usize, f64)> = raw.iter().enumerate().map(|(v, a)| (v, a / norm)).collect();
        let mut ls = CommLedger::new();
        let star = distribute_repetition_state(&weights, 2, &NetworkTopology::star(gamma), &mut ls).unwrap();
        let mut lc = CommLedger::new();
        let chain = distribute_repetition_state(&weights, 2, &NetworkTopology::chain(gamma), &mut lc).unwrap();
        prop_assert!(star.fidelity(&chain) > 1.0 - 1e-12);
        prop_assert_eq!(ls.qubits(), 2 * gamma as u64);
        prop_assert_eq!(lc.qubits(), 2 * (gamma as u64 - 1));
    }

    #[test]
    fn block_encoding_charge(seed in any::<u64>()) {
        let ch = clustered(seed);
        let be = BlockEncoding::new(&ch, "").unwrap();
        let mut ledger = CommLedger::new();
        be.block(&NetworkTopology::star(ch.gamma()), &mut ledger).unwrap();
        let w = ((ch.num_edges() + ch.gamma()) as f64).log2().ceil() as u64;
        prop_assert_eq!(ledger.qubits(), 2 * ch.gamma() as u64 * w);
    }

    #[test]
    fn second_order_formula_is_time_symmetric(seed in any::<u64>(), t in 0.1f64..1.5, r in 1usize..=3) {
        let ch = clustered(seed);
        let sched = suzuki_schedule(2).unwrap();
        let fwd = trotter_operator(&ch, &sched, t, r).unwrap();
        let back = trotter_operator(&ch, &sched, -t, r).unwrap();
        let id = linalg::identity(fwd.nrows());
        prop_assert!(linalg::max_entry_distance(&(fwd * back), &id) < 1e-10);
    }

    #[test]
    fn nested_commutator_ignores_labels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, part) = instance(seed);
        let n = h.qubit_count();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let moved = OperatorSum::from_terms(
            n,
            h.terms().iter().map(|(c, s)| {
                let mut axes = vec![s.axis(0); n];
                for q in 0..n {
                    axes[perm[q]] = s.axis(q);
                }
                (*c, PauliString::new(axes))
            }),
        )
        .unwrap();
        let groups: Vec<Vec<usize>> = part.groups().iter().map(|g| g.iter().map(|&q| perm[q]).collect()).collect();
        let moved_part = QubitPartition::from_groups(&groups).unwrap();
        for p in [1usize, 2] {
            let a = nested_commutator_norm(&cluster(&h, &part).unwrap(), p).unwrap().value;
            let b = nested_commutator_norm(&cluster(&moved, &moved_part).unwrap(), p).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "p={}: {} vs {}", p, a, b);
        }
    }

    #[test]
    fn exact_phases_are_read_exactly(y in 0usize..8, gamma in 2usize..=3) {
        let part = QubitPartition::contiguous(&vec![1; gamma]).unwrap();
        let u = parity_phase_lcu(part, y as f64 / 8.0).unwrap();
        let mut psi = vec![ZERO; 1 << gamma];
        psi[0] = ONE;
        let est = run_dqpe(&u, &psi, 3, &NetworkTopology::star(gamma), &mut CommLedger::new()).unwrap();
        prop_assert_eq!(est.top, y);
        prop_assert!(est.top_probability > 1.0 - 1e-10);
    }

    #[test]
    fn grover_follows_closed_form(n_per_node in 1usize..=2, marked_seed in any::<u64>(), k in 0usize..=4) {
        let mut inst = GroverInstance::new(2, n_per_node, 0);
        inst.marked = (marked_seed % inst.items() as u64) as usize;
        inst.iterations = Some(k);
        let out = run_dgrover(&inst, &NetworkTopology::star(2), &mut CommLedger::new()).unwrap();
        prop_assert!((out.success_probability - grover_success_probability(inst.items(), k)).abs() < 1e-12);
    }

    #[test]
    fn nn_product_formula_doubles_by_power(gamma in 2.0f64..64.0, t in 0.1f64..10.0, p in 1usize..=4) {
        let base = CostParams { gamma: Some(gamma), t: Some(t), eps: Some(1e-3), p: Some(p as f64), alpha: Some(1.0), ..CostParams::default() };
        let row = |c: &CostParams| cost_table(CostModel::Nn, c).unwrap()[0].value;
        let pf = p as f64;
        let want = 2f64.powf(1.0 + 1.0 / pf);
        let by_t = row(&base.clone().with("t", 2.0 * t).unwrap()) / row(&base);
        let by_gamma = row(&base.clone().with("gamma", 2.0 * gamma).unwrap()) / row(&base);
        prop_assert!((by_t / want - 1.0).abs() < 1e-9);
        prop_assert!((by_gamma / want - 1.0).abs() < 1e-9);
    }
}

