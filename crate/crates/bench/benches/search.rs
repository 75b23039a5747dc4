use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sbm_core::graphgen::{sample_er, sample_planted};
use sbm_core::partition::{exhaustive_detect, DetectOptions};
use sbm_core::{ModelParams, RandomStream};

fn samplers(c: &mut Criterion) {
    let p = ModelParams::from_d_lambda(4, 10_000, 6.0, 0.4).unwrap();
    c.bench_function("sample_planted/n=10000", |b| b.iter(|| sample_planted(&p, RandomStream::from_seed(2)).unwrap()));
    c.bench_function("sample_er/n=10000", |b| b.iter(|| sample_er(10_000, 6.0, RandomStream::from_seed(2)).unwrap()));
}

fn detection(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_detect");
    group.sample_size(10);
    for n in [12usize, 16, 20] {
        let p = ModelParams::from_d_lambda(2, n, 4.0, 0.5).unwrap();
        let null = sample_er(n, 4.0, RandomStream::from_seed(n as u64)).unwrap();
        let (_, planted) = sample_planted(&p, RandomStream::from_seed(n as u64)).unwrap();
        for (name, g) in [("null", &null), ("planted", &planted)] {
            for parallel in [false, true] {
                let id = BenchmarkId::new(format!("{name}/{}", if parallel { "parallel" } else { "serial" }), n);
                let options = DetectOptions { parallel, ..DetectOptions::default() };
                group.bench_with_input(id, g, |b, g| b.iter(|| exhaustive_detect(g, &p, options).unwrap()));
            }
        }
    }
    group.finish();
}

criterion_group!(benches, samplers, detection);
criterion_main!(benches);
