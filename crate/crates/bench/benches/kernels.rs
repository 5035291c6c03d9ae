use std::hint::black_box;

use aperylike::exact::LucasTable;
use aperylike::laurent::{apery_kernel, ct_power};
use aperylike::modular::residues_below_prime;
use aperylike::sequences::{recurrence_terms, term_by_sum};
use aperylike::survey::survey_with_workers;
use aperylike_bench::{SAMPLE_IDS, SAMPLE_PRIMES};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn residue_tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("residues_below_prime");
    for p in SAMPLE_PRIMES {
        let rec = aperylike::SequenceId::Gamma.descriptor().recurrence;
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| residues_below_prime(black_box(&rec), p))
        });
    }
    g.finish();
}

fn exact_terms(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_terms");
    for id in SAMPLE_IDS {
        g.bench_with_input(BenchmarkId::new("recurrence_1000", id), &id, |b, &id| {
            b.iter(|| recurrence_terms(id, 1000).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sum_200", id), &id, |b, &id| {
            b.iter(|| term_by_sum(id, black_box(200)))
        });
    }
    g.finish();
}

fn lucas_binomials(c: &mut Criterion) {
    let table = LucasTable::new(10_007).unwrap();
    c.bench_function("lucas_binomial_p10007", |b| {
        b.iter(|| {
            (0..1000u64).fold(0u64, |acc, k| {
                acc ^ table.binomial(black_box(123_456_789), k * 97)
            })
        })
    });
}

fn constant_terms(c: &mut Criterion) {
    let k = apery_kernel();
    let mut g = c.benchmark_group("ct_power");
    g.sample_size(10);
    for n in [6u64, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| ct_power(&k, n))
        });
    }
    g.finish();
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("survey");
    g.sample_size(10);
    for workers in [1usize, 4] {
        g.bench_with_input(
            BenchmarkId::new("gamma_10000", workers),
            &workers,
            |b, &w| {
                b.iter(|| survey_with_workers(aperylike::SequenceId::Gamma, 10_000, w).unwrap())
            },
        );
    }
    g.finish();
}

criterion_group!(
    benches,
    residue_tables,
    exact_terms,
    lucas_binomials,
    constant_terms,
    census
);
criterion_main!(benches);
