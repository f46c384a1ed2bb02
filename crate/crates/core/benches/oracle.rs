//! Channel sweeps through the crate's batch helpers against a plain loop.
//!
//! `cargo bench` measures the rayon build; `cargo bench --no-default-features`
//! turns the helper path sequential as well, so both lines should then match.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mie_spectra::oracle::{default_config, solve_bound_states};
use mie_spectra::par;
use mie_spectra::potential::{kratzer_fues, Potential};
use mie_spectra::spectrum::{energy, QuantumNumbers};

const CELLS: usize = 4_000;
const N_MAX: u32 = 3;

fn channels() -> Vec<(u32, u32)> {
    (2..=5).flat_map(|d| (0..=2).map(move |l| (d, l))).collect()
}

fn solve(potential: &Potential, (dim, ell): (u32, u32)) -> Vec<f64> {
    let config = default_config(potential, ell, dim, N_MAX, CELLS).unwrap();
    solve_bound_states(potential, ell, dim, &config).unwrap()
}

fn oracle_sweep(c: &mut Criterion) {
    let potential = Potential::Mie(kratzer_fues(5.0, 1.0, 1.0, 1.0).unwrap());
    let chans = channels();
    let label = if par::is_parallel() {
        "helpers-rayon"
    } else {
        "helpers-sequential"
    };
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new(label, chans.len()), |b| {
        b.iter(|| par::map(&chans, |&ch| solve(&potential, black_box(ch))))
    });
    group.bench_function(BenchmarkId::new("plain-loop", chans.len()), |b| {
        b.iter(|| {
            chans
                .iter()
                .map(|&ch| solve(&potential, black_box(ch)))
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

fn closed_form_table(c: &mut Criterion) {
    let params = kratzer_fues(5.0, 1.0, 1.0, 1.0).unwrap();
    let states: Vec<QuantumNumbers> = (2..=10)
        .flat_map(|d| {
            (0..=20).flat_map(move |l| (0..=20).map(move |n| QuantumNumbers::new(n, l, d)))
        })
        .collect();
    let label = if par::is_parallel() {
        "helpers-rayon"
    } else {
        "helpers-sequential"
    };
    let mut group = c.benchmark_group("closed_form_table");
    group.bench_function(BenchmarkId::new(label, states.len()), |b| {
        b.iter(|| par::map(&states, |&q| energy(&params, black_box(q)).ok()))
    });
    group.bench_function(BenchmarkId::new("plain-loop", states.len()), |b| {
        b.iter(|| {
            states
                .iter()
                .map(|&q| energy(&params, black_box(q)).ok())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, oracle_sweep, closed_form_table);
criterion_main!(benches);
