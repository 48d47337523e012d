use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lzs_bench::{boundary_regime, simulate, spectrum_cell};
use lzs_core::analysis::{bessel_j, complete_elliptic_e, complex_gamma_arg, fit_damped_sine, interference_chain, EllipticConvention};
use lzs_core::sweep::steady_state;
use lzs_core::LzsPoint;

fn solver(c: &mut Criterion) {
    let (p, t_end, dt) = boundary_regime();
    let mut g = c.benchmark_group("solver");
    g.sample_size(20);
    g.bench_function("boundary trace 40us", |b| b.iter(|| simulate(black_box(&p), t_end, dt)));
    let cell = spectrum_cell();
    g.bench_function("steady-state cell", |b| b.iter(|| steady_state(black_box(&cell), 40e-6, 5).unwrap()));
    g.finish();
}

fn analysis(c: &mut Criterion) {
    let (p, t_end, dt) = boundary_regime();
    let trace = simulate(&p, t_end, dt);
    let mut g = c.benchmark_group("analysis");
    g.sample_size(20);
    g.bench_function("damped sine fit", |b| b.iter(|| fit_damped_sine(black_box(&trace), None).unwrap()));
    g.finish();

    let point = LzsPoint::resonant(p.drive.rabi, p.modulation.amplitude, p.modulation.omega).unwrap();
    c.bench_function("interference chain", |b| {
        b.iter(|| interference_chain(black_box(&point), EllipticConvention::Parameter).unwrap())
    });
    c.bench_function("gamma arg", |b| b.iter(|| complex_gamma_arg(black_box(0.2353)).unwrap()));
    c.bench_function("elliptic E", |b| b.iter(|| complete_elliptic_e(black_box(0.47)).unwrap()));
    c.bench_function("bessel J5(30)", |b| b.iter(|| bessel_j(5, black_box(30.0)).unwrap()));
}

criterion_group!(benches, solver, analysis);
criterion_main!(benches);
