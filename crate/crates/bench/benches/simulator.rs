use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use qsg_core::{
    build, cost, lower, sample_shots, ExperimentConfig, Gate, NoiseConfig, Statevector, Variant,
};

const WIDTH: usize = 16;

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_16q");
    let gates = [
        ("h", Gate::h(7)),
        ("x", Gate::x(7)),
        ("rz", Gate::rz(0.3, 7)),
        ("cx", Gate::cx(3, 11)),
        ("ccx", Gate::ccx(1, 5, 12)),
        ("rccx", Gate::rccx(0, 9, 11)),
        ("cswap", Gate::cswap(11, 5, 13)),
        ("mcz8", Gate::mcz(&[1, 2, 3, 4, 5, 6, 7, 8])),
    ];
    let mut state = Statevector::new(WIDTH).unwrap();
    for q in 0..WIDTH {
        state.apply(&Gate::h(q)).unwrap();
    }
    for (name, gate) in gates {
        group.bench_function(name, |b| {
            b.iter_batched_ref(
                || state.clone(),
                |s| s.apply(black_box(&gate)).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("n4_k3_r25");
    group.sample_size(10);
    for variant in Variant::ALL {
        let cfg = ExperimentConfig::new(4, 3, 25, variant).unwrap();
        let circuit = build(&cfg).unwrap();
        group.bench_function(format!("lower_cost/{variant}"), |b| {
            b.iter(|| cost(&lower(black_box(&circuit)).unwrap()))
        });
        group.bench_function(format!("noiseless/{variant}"), |b| {
            b.iter(|| black_box(&circuit).simulate().unwrap())
        });
        let noise = NoiseConfig::device_like(64, 1);
        group.bench_function(format!("shots64/{variant}"), |b| {
            b.iter(|| sample_shots(black_box(&circuit), &noise).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernels, pipeline);
criterion_main!(benches);
