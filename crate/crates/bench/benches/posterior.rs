use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sbg_core::gp::{posterior_aggregated, posterior_batch, sample_utility};
use sbg_core::{GpPosterior, KernelSpec, ProfileGrid};

fn history(p: usize, len: usize) -> Vec<(usize, f64)> {
    (0..len)
        .map(|t| ((t * 7) % p, ((t as f64) * 0.37).sin()))
        .collect()
}

fn posterior_forms(c: &mut Criterion) {
    let kernel = KernelSpec::squared_exponential(0.3).unwrap();
    let mut group = c.benchmark_group("posterior");
    for k in [3usize, 5, 10] {
        let grid = ProfileGrid::equally_spaced(k).unwrap();
        let p = grid.len();
        let obs = history(p, 200);
        group.bench_with_input(BenchmarkId::new("recursive_200", k), &k, |b, _| {
            b.iter(|| {
                let mut post = GpPosterior::prior(&grid, &kernel, 0.01).unwrap();
                for &(i, v) in &obs {
                    post.update(i, v);
                }
                black_box(post.mean(0))
            })
        });
        group.bench_with_input(BenchmarkId::new("batch_200", k), &k, |b, _| {
            b.iter(|| black_box(posterior_batch(&grid, &kernel, 0.01, &obs).unwrap().mean(0)))
        });
        let mut counts = vec![0u64; p];
        let mut sums = vec![0.0; p];
        for &(i, v) in &obs {
            counts[i] += 1;
            sums[i] += v;
        }
        let means: Vec<f64> = (0..p)
            .map(|i| {
                if counts[i] > 0 {
                    sums[i] / counts[i] as f64
                } else {
                    0.0
                }
            })
            .collect();
        group.bench_with_input(BenchmarkId::new("aggregated_200", k), &k, |b, _| {
            b.iter(|| {
                black_box(
                    posterior_aggregated(&grid, &kernel, 0.01, &counts, &means)
                        .unwrap()
                        .mean(0),
                )
            })
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let kernel = KernelSpec::squared_exponential(0.1).unwrap();
    let grid = ProfileGrid::equally_spaced(100).unwrap();
    c.bench_function("sample_se_100x100", |b| {
        b.iter(|| black_box(sample_utility(&grid, &kernel, 1).unwrap().get(0, 0)))
    });
}

criterion_group!(benches, posterior_forms, sampling);
criterion_main!(benches);
