use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use dtkmeans::harness::{generate, Generator, SyntheticSpec};
use dtkmeans::kmeans::random_initial_centroids;
use dtkmeans::{Algorithm, ClusteringConfig, Dataset, Execution};

fn blobs(n: usize) -> Dataset {
    generate(&SyntheticSpec {
        generator: Generator::GaussianMixture,
        n,
        d: 2,
        true_k: 100,
        spread: 0.01,
        seed: 11,
    })
    .unwrap()
}

// One cold iteration per sample; setup builds the per-run state.
fn execution(c: &mut Criterion) {
    let data = blobs(50_000);
    let initial = random_initial_centroids(&data, 100, 11).unwrap();
    let mut group = c.benchmark_group("execution");
    group.sample_size(20);
    for algorithm in [Algorithm::Naive, Algorithm::Hamerly, Algorithm::Elkan] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let config = ClusteringConfig {
                execution: exec,
                ..ClusteringConfig::new(100)
            };
            group.bench_with_input(
                BenchmarkId::new(algorithm.name(), format!("{exec:?}")),
                &config,
                |b, config| {
                    b.iter_batched(
                        || algorithm.start(&data, &initial, config).unwrap(),
                        |mut step| step.step().unwrap(),
                        BatchSize::LargeInput,
                    )
                },
            );
        }
    }
    group.finish();
}

fn converged_runs(c: &mut Criterion) {
    let data = blobs(20_000);
    let mut group = c.benchmark_group("full run");
    group.sample_size(10);
    for k in [20, 100] {
        let initial = random_initial_centroids(&data, k, 11).unwrap();
        let config = ClusteringConfig::new(k);
        for algorithm in [Algorithm::Naive, Algorithm::DualTreeKd, Algorithm::DualTreeCover] {
            group.bench_with_input(BenchmarkId::new(algorithm.name(), k), &initial, |b, initial| {
                b.iter(|| dtkmeans::kmeans::cluster(&data, initial, algorithm, &config).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, execution, converged_runs);
criterion_main!(benches);
