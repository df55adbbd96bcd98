use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ensel_core::diversity::{DiversityMeasure, DiversityMethod};
use ensel_core::exec::Execution;
use ensel_core::harness::{
    generate_pool, run_experiment, AlgorithmSpec, ExperimentConfig, SyntheticPoolSpec,
};
use std::hint::black_box;

fn experiment(c: &mut Criterion) {
    let matrix = generate_pool(&SyntheticPoolSpec {
        n_examples: 600,
        n_predictors: 30,
        correlation: 0.3,
        correlation_groups: 3,
        seed: 1,
        ..SyntheticPoolSpec::default()
    })
    .unwrap();
    let config = ExperimentConfig {
        algorithms: vec![
            AlgorithmSpec::greedy(),
            AlgorithmSpec::diversity(DiversityMeasure::Cosine, DiversityMethod::Diversity1),
            AlgorithmSpec::diversity(DiversityMeasure::Kappa, DiversityMethod::Diversity2),
        ],
        epsilons: vec![0.1, 0.5],
        repetitions: 2,
        ..ExperimentConfig::default()
    };

    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_experiment(black_box(&config), &matrix, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, experiment);
criterion_main!(benches);
