use btps_bench::{cubic_sphere, disk_model, linear_sphere, twisted_torus};
use btps_core::pseudomode::optimal_pseudomode;
use btps_core::spectral::{numerical_range, pseudospectrum_grid, sigma_min, Window};
use btps_core::MatrixFamily;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for n in [64, 256] {
        let torus = twisted_torus();
        g.bench_with_input(BenchmarkId::new("torus", n), &n, |b, &n| b.iter(|| torus.build(n).unwrap()));
        let sphere = cubic_sphere();
        g.bench_with_input(BenchmarkId::new("sphere", n), &n, |b, &n| b.iter(|| sphere.build(n).unwrap()));
        let linear = linear_sphere();
        g.bench_with_input(BenchmarkId::new("sphere_linear", n), &n, |b, &n| b.iter(|| linear.build(n).unwrap()));
        let disk = disk_model();
        g.bench_with_input(BenchmarkId::new("disk", n), &n, |b, &n| b.iter(|| disk.build(n).unwrap()));
    }
    g.finish();
}

fn smallest_singular_value(c: &mut Criterion) {
    let mut g = c.benchmark_group("sigma_min");
    let lam = Complex64::new(0.4, 0.2);
    for n in [32, 128, 256] {
        let t = twisted_torus().build(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| sigma_min(t, black_box(lam)).unwrap()));
    }
    g.finish();
}

fn grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("pseudospectrum_grid");
    g.sample_size(10);
    let window = Window::new(-1.8, 1.8, -0.8, 0.8).unwrap();
    for n in [40, 80] {
        let t = disk_model().build(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| {
            b.iter(|| pseudospectrum_grid(t, window, 19, 9).unwrap())
        });
    }
    g.finish();
}

fn range(c: &mut Criterion) {
    let mut g = c.benchmark_group("numerical_range");
    g.sample_size(10);
    for n in [32, 64] {
        let t = cubic_sphere().build(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| numerical_range(t, 180).unwrap()));
    }
    g.finish();
}

fn pseudomode(c: &mut Criterion) {
    let t = twisted_torus().build(128).unwrap();
    let lam = Complex64::new(0.3, 0.1);
    c.bench_function("optimal_pseudomode/128", |b| b.iter(|| optimal_pseudomode(&t, black_box(lam)).unwrap()));
}

criterion_group!(benches, build, smallest_singular_value, grid, range, pseudomode);
criterion_main!(benches);
