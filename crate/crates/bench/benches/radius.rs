use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pradius::laws::{evaluate_law, law, LawId, LawInput};
use pradius::{omega, schatten_hermitian, singular_values, OptimizerConfig, PNorm};
use pradius_bench::{ginibre, ginibre_pair};

fn bench_spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    for n in [4, 10, 16] {
        let a = ginibre(n);
        let h = a.re_part().unwrap();
        group.bench_with_input(BenchmarkId::new("jacobi_svd", n), &a, |b, a| {
            b.iter(|| singular_values(black_box(a)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hermitian_schatten", n), &h, |b, h| {
            b.iter(|| schatten_hermitian(black_box(h), PNorm::TWO).unwrap())
        });
    }
    group.finish();
}

fn bench_omega(c: &mut Criterion) {
    let cfg = OptimizerConfig::default();
    let mut group = c.benchmark_group("omega");
    for n in [2, 5, 10] {
        let a = ginibre(n);
        for p in [PNorm::ONE, PNorm::INFINITY] {
            group.bench_with_input(BenchmarkId::new(format!("p={p}"), n), &a, |b, a| {
                b.iter(|| omega(black_box(a), p, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_laws(c: &mut Criterion) {
    let cfg = OptimizerConfig::default();
    let p = PNorm::finite(3.0).unwrap();
    let (a, b) = ginibre_pair(4);
    let mut group = c.benchmark_group("laws");
    group.sample_size(20);
    for id in [LawId::L14, LawId::T32, LawId::R35, LawId::T42] {
        let law = law(id);
        let input = LawInput::new(vec![a.clone(), b.clone()].into_iter().take(law.arity).collect());
        group.bench_function(id.as_str(), |bench| {
            bench.iter(|| evaluate_law(law, black_box(&input), p, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_spectral, bench_omega, bench_laws);
criterion_main!(benches);
