use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dqsim_bench::ising_chain;
use dqsim_core::lcu::BlockEncoding;
use dqsim_core::linalg::expm_hermitian;
use dqsim_core::pf::{run_dpf_clustered, DpfOptions, Steps};
use dqsim_core::qnet::{CommLedger, NetworkTopology};
use dqsim_core::qsp::{run_dqsp_clustered, DqspOptions, QspPlan, DEFAULT_KAPPA};

fn block_encoding(c: &mut Criterion) {
    let mut group = c.benchmark_group("dbe_block");
    for nodes in [2usize, 3] {
        let ch = ising_chain(nodes, 1).unwrap();
        let be = BlockEncoding::new(&ch, "").unwrap();
        let topo = NetworkTopology::star(nodes);
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, _| {
            b.iter(|| be.block(&topo, &mut CommLedger::new()).unwrap())
        });
    }
    group.finish();
}

fn trotter(c: &mut Criterion) {
    let mut group = c.benchmark_group("dpf_run");
    group.sample_size(20);
    let ch = ising_chain(3, 2).unwrap();
    let topo = NetworkTopology::star(3);
    for p in [1usize, 2] {
        let opts = DpfOptions {
            p,
            t: 1.0,
            steps: Steps::Fixed(8),
            input: None,
            eps_for_prediction: 1e-3,
        };
        group.bench_with_input(BenchmarkId::new("p", p), &opts, |b, opts| {
            b.iter(|| run_dpf_clustered(&ch, &topo, opts).unwrap())
        });
    }
    group.finish();
}

fn phases(c: &mut Criterion) {
    let mut group = c.benchmark_group("qsp_phases");
    for tau in [2.0f64, 8.0] {
        group.bench_with_input(BenchmarkId::from_parameter(tau), &tau, |b, &tau| {
            b.iter(|| QspPlan::new(black_box(tau), 1e-8, DEFAULT_KAPPA).unwrap())
        });
    }
    group.finish();
}

fn qsp_run(c: &mut Criterion) {
    let ch = ising_chain(2, 1).unwrap();
    let topo = NetworkTopology::star(2);
    let opts = DqspOptions::new(1.0, 1e-6);
    c.bench_function("dqsp_run", |b| b.iter(|| run_dqsp_clustered(&ch, &topo, &opts).unwrap()));
}

fn exact_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("expm_hermitian");
    for (nodes, per_node) in [(2usize, 2usize), (3, 2)] {
        let h = ising_chain(nodes, per_node).unwrap().flatten().dense_matrix().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(nodes * per_node), &h, |b, h| {
            b.iter(|| expm_hermitian(h, 0.5))
        });
    }
    group.finish();
}

criterion_group!(benches, block_encoding, trotter, phases, qsp_run, exact_oracle);
criterion_main!(benches);
