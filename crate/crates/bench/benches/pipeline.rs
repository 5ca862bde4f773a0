use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use polymorse::mscomplex::assemble;
use polymorse::{build_ms_complex, find_equilibria};
use polymorse_bench::{random_input, SIZES};

fn equilibria(c: &mut Criterion) {
    let mut g = c.benchmark_group("steps_1_3");
    g.sample_size(10);
    for n in SIZES {
        let rp = random_input(n, 7);
        g.bench_with_input(BenchmarkId::from_parameter(n), &rp, |b, rp| {
            b.iter(|| find_equilibria(rp).unwrap())
        });
    }
    g.finish();
}

fn curves_and_cells(c: &mut Criterion) {
    let mut g = c.benchmark_group("steps_4_5");
    g.sample_size(10);
    for n in SIZES {
        let rp = random_input(n, 7);
        let eq = find_equilibria(&rp).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &rp, |b, rp| {
            b.iter_batched(
                || eq.clone(),
                |eq| assemble(rp, eq).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

fn full(c: &mut Criterion) {
    let mut g = c.benchmark_group("full");
    g.sample_size(10);
    for n in SIZES {
        let rp = random_input(n, 7);
        g.bench_with_input(BenchmarkId::from_parameter(n), &rp, |b, rp| {
            b.iter(|| build_ms_complex(rp).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, equilibria, curves_and_cells, full);
criterion_main!(benches);
