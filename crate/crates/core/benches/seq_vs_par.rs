//! Sequential vs parallel execution of the data-parallel hot paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lcp_learn::classical::verify_optimality;
use lcp_learn::exec::Execution;
use lcp_learn::noise::{estimate_asp, AspOptions, NoiseProfile};
use lcp_learn::quantum::run_quantum_learn;
use lcp_learn::synth::{build_full_circuit, FullCircuitOptions};
use lcp_learn::transpile::{transpile, CouplingGraph, TranspileOptions};
use lcp_learn::SecretString;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn classical(c: &mut Criterion) {
    let mut g = c.benchmark_group("classical_sweep_n14");
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| b.iter(|| verify_optimality(14, exec)));
    }
    g.finish();
}

fn quantum(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantum_sweep_n8");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_function(name, |b| {
            b.iter(|| {
                exec.map_range(256, |v| {
                    let s = SecretString::from_index(v as u64, 8).unwrap();
                    run_quantum_learn(&s).unwrap().recovered
                })
            })
        });
    }
    g.finish();
}

fn asp(c: &mut Criterion) {
    let s: SecretString = "101".parse().unwrap();
    let profile = NoiseProfile::quito();
    let mut g = c.benchmark_group("asp_4x4096_shots");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = AspOptions {
            trials: 4,
            shots: 4096,
            seed: 1,
            exec,
            ..AspOptions::default()
        };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| {
            b.iter(|| estimate_asp(&s, &profile, o).unwrap().mean)
        });
    }
    g.finish();
}

fn auto_mapping(c: &mut Criterion) {
    let s: SecretString = "011".parse().unwrap();
    let full = build_full_circuit(&s, FullCircuitOptions::default()).unwrap();
    let graph = CouplingGraph::quito();
    let mut g = c.benchmark_group("transpile_auto_mapping_quito");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = TranspileOptions {
            exec,
            ..TranspileOptions::default()
        };
        g.bench_function(name, |b| {
            b.iter(|| transpile(&full.circuit, &graph, &opts).unwrap().1.final_counts)
        });
    }
    g.finish();
}

criterion_group!(benches, classical, quantum, asp, auto_mapping);
criterion_main!(benches);
