//! Sequential vs parallel amplitude kernels, plus concurrent sweeps.

use std::hint::black_box;

use aah_walk::circuit::{two_qubit_block, Circuit};
use aah_walk::engine::{apply_circuit_with, sample_counts};
use aah_walk::experiment::{sweep, ExperimentConfig, SweepAxis};
use aah_walk::parallel::Execution;
use aah_walk::state::prepare_fock_state;
use aah_walk::ModelParams;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn circuits(c: &mut Criterion) {
    let mut group = c.benchmark_group("hopping-layer");
    group.sample_size(10);
    for sites in [12usize, 16, 20] {
        // One sequential hopping layer; registers past the model's size cap
        // are built from blocks directly.
        let gates = (0..sites - 1).flat_map(|b| two_qubit_block(0.3, 0.3, 0.1, (b, b + 1)));
        let step = Circuit::from_gates(sites, gates).unwrap();
        let psi = prepare_fock_state(sites, &[0, sites / 2]).unwrap();
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, sites), &sites, |b, _| {
                b.iter_batched(
                    || psi.clone(),
                    |mut state| {
                        apply_circuit_with(&mut state, &step, exec).unwrap();
                        black_box(state)
                    },
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let psi = prepare_fock_state(16, &[3, 9]).unwrap();
    c.bench_function("sample-8192-shots-L16", |b| {
        b.iter(|| black_box(sample_counts(&psi, 8192, 7).unwrap()))
    });
}

fn sweeps(c: &mut Criterion) {
    let mut base = ExperimentConfig::new(ModelParams::aah(10, 0.0, 0.0), vec![0], 5.0);
    base.shots = 2048;
    let values: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
    let mut group = c.benchmark_group("sweep-10-points");
    group.sample_size(10);
    for (label, workers) in [("one-worker", Some(1)), ("all-workers", None)] {
        group.bench_function(label, |b| {
            b.iter(|| black_box(sweep(&base, SweepAxis::Modulation, &values, workers).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, circuits, sampling, sweeps);
criterion_main!(benches);
