use super::*;
use crate::linalg::{C64, ONE, ZERO};
use crate::pauli::QubitPartition;
use crate::qnet::{CommLedger, NetworkTopology};

fn zero_state(n: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = ONE;
    v
}

fn two_node() -> QubitPartition {
    QubitPartition::contiguous(&[1, 1]).unwrap()
}

#[test]
fn exact_binary_phase_is_recovered() {
    let u = parity_phase_lcu(two_node(), 5.0 / 8.0).unwrap();
    let topo = NetworkTopology::star(2);
    let mut ledger = CommLedger::new();
    let est = run_dqpe(&u, &zero_state(2), 3, &topo, &mut ledger).unwrap();
    assert_eq!(est.top, 0b101);
    assert_eq!(est.top_bits(), "101");
    assert!(est.top_probability > 1.0 - 1e-10);
    assert!((est.true_phase.unwrap() - 0.625).abs() < 1e-10);
}

#[test]
fn third_phase_matches_exact_distribution() {
    let u = parity_phase_lcu(two_node(), 1.0 / 3.0).unwrap();
    let topo = NetworkTopology::star(2);
    let mut ledger = CommLedger::new();
    let est = run_dqpe(&u, &zero_state(2), 3, &topo, &mut ledger).unwrap();
    let want = exact_qpe_distribution(1.0 / 3.0, 3);
    for (a, b) in est.distribution.iter().zip(&want) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(est.top, 0b011);
    assert!(est.top_probability >= 0.405);
    let total: f64 = est.distribution.iter().sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn exact_distribution_closed_form() {
    // Fejér kernel: sin²(πKδ)/(K² sin²(πδ)) with K = 8 outcomes.
    let p = exact_qpe_distribution(1.0 / 3.0, 3);
    let delta = 1.0 / 3.0 - 3.0 / 8.0;
    let pi = std::f64::consts::PI;
    let want = (pi * 8.0 * delta).sin().powi(2) / (64.0 * (pi * delta).sin().powi(2));
    assert!((p[3] - want).abs() < 1e-12);
}

#[test]
fn qpe_ledger_follows_powers_of_two() {
    let u = parity_phase_lcu(two_node(), 0.25).unwrap();
    let topo = NetworkTopology::star(2);
    for k in 1..=3 {
        let mut ledger = CommLedger::new();
        let est = run_dqpe(&u, &zero_state(2), k, &topo, &mut ledger).unwrap();
        let padded = u.padded_to_two().unwrap();
        // Three W at 2mΓ, two reflections and one control fan-out at Γ.
        let m = padded.width() as u64;
        let per_call = 3 * 2 * m * 2 + 3 * 2;
        assert_eq!(est.per_call_charge, per_call);
        assert_eq!(ledger.qubits(), ((1 << k) - 1) * per_call);
        assert_eq!(ledger.qubits(), qpe_ledger_identity(&u, &topo, k).unwrap());
    }
}

#[test]
fn non_eigenstate_gives_mixture() {
    let u = parity_phase_lcu(two_node(), 0.25).unwrap();
    let topo = NetworkTopology::star(2);
    let mut ledger = CommLedger::new();
    let h = 0.5f64.sqrt();
    let psi = vec![C64::new(h, 0.0), C64::new(h, 0.0), ZERO, ZERO];
    let est = run_dqpe(&u, &psi, 2, &topo, &mut ledger).unwrap();
    assert!(est.true_phase.is_none());
    // |00⟩ has phase 1/4 and |01⟩ has phase 3/4.
    assert!((est.distribution[1] - 0.5).abs() < 1e-10);
    assert!((est.distribution[3] - 0.5).abs() < 1e-10);
}

#[test]
fn grover_small_cases() {
    let topo = NetworkTopology::star(2);
    let mut ledger = CommLedger::new();
    let out = run_dgrover(&GroverInstance::new(2, 1, 2), &topo, &mut ledger).unwrap();
    assert_eq!(out.iterations, 1);
    assert!((out.success_probability - 1.0).abs() < 1e-12);
    assert_eq!(out.measured, 2);
    assert_eq!(out.ledger.qubits, 4 * 2);

    let mut ledger = CommLedger::new();
    let out = run_dgrover(&GroverInstance::new(2, 2, 11), &topo, &mut ledger).unwrap();
    assert_eq!(out.iterations, 3);
    // sin(7θ) = 7s − 56s³ + 112s⁵ − 64s⁷ at s = 1/4 gives sin²(7θ) = 63001/65536.
    assert!((out.success_probability - 63001.0 / 65536.0).abs() < 1e-12);
    assert_eq!(ledger.qubits(), 3 * 4 * 2);
}

#[test]
fn grover_matches_closed_form() {
    for (gamma, n) in [(2, 1), (2, 2), (3, 2)] {
        let topo = NetworkTopology::star(gamma);
        let items = 1usize << (gamma * n);
        for k in 0..=10 {
            let mut inst = GroverInstance::new(gamma, n, items - 1);
            inst.iterations = Some(k);
            let mut ledger = CommLedger::new();
            let out = run_dgrover(&inst, &topo, &mut ledger).unwrap();
            assert!((out.success_probability - grover_success_probability(items, k)).abs() < 1e-9);
            assert_eq!(ledger.qubits(), grover_ledger_identity(&topo, k).unwrap());
        }
    }
}

#[test]
fn grover_rejects_bad_instances() {
    let topo = NetworkTopology::star(2);
    let mut ledger = CommLedger::new();
    assert!(run_dgrover(&GroverInstance::new(2, 1, 4), &topo, &mut ledger).is_err());
    assert!(run_dgrover(&GroverInstance::new(2, 9, 0), &topo, &mut ledger).is_err());
}
