use std::hint::black_box;

use complex_spectra::potentials::sector_pair_by_label;
use complex_spectra::{
    escape_time, find_eigenvalues, integrate, wkb_energy_estimate, wronskian_mismatch, Complex64,
    IntegratorConfig, PhasePoint, PotentialSpec,
};
use complex_spectra_bench::{cubic_problem, hopping_start};
use criterion::{criterion_group, criterion_main, Criterion};

fn shooting(c: &mut Criterion) {
    let problem = cubic_problem();
    c.bench_function("wronskian_mismatch cubic E=1.156", |b| {
        b.iter(|| wronskian_mismatch(&problem, black_box(Complex64::new(1.156, 0.0))))
    });
    let mut group = c.benchmark_group("find_eigenvalues");
    group.sample_size(10);
    group.bench_function("cubic n<=5", |b| b.iter(|| find_eigenvalues(&problem, black_box(5))));
    group.finish();
}

fn wkb(c: &mut Criterion) {
    let spec = PotentialSpec::sextic();
    let pair = sector_pair_by_label(&spec, "BD").unwrap();
    c.bench_function("wkb_energy_estimate sextic BD n=20", |b| {
        b.iter(|| wkb_energy_estimate(&spec, &pair, black_box(20)))
    });
}

fn classical(c: &mut Criterion) {
    let (spec, start, config) = hopping_start();
    let mut group = c.benchmark_group("classical");
    group.sample_size(20);
    group.bench_function("integrate sextic E=1+0.2i t=31.42", |b| {
        b.iter(|| integrate(&spec, black_box(start), config))
    });
    let quartic = PotentialSpec::inverted_quartic();
    let launch = PhasePoint::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    group.bench_function("escape_time -x^4 E=1", |b| {
        b.iter(|| escape_time(&quartic, black_box(launch), IntegratorConfig::default()))
    });
    group.finish();
}

criterion_group!(benches, shooting, wkb, classical);
criterion_main!(benches);
