use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use fockfluct_bench::{beta_omega_grid, dense_product, ramp_spectrum};
use fockfluct_core::multimode::{self, field_transform_direct, field_transform_fft, Region};
use fockfluct_core::oracle::DenseFockSpace;
use fockfluct_core::thermal::{self, ThermalModeSpec};
use std::hint::black_box;

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("field_transform");
    for m in [256usize, 1024, 4096] {
        let spec = ramp_spectrum(m);
        group.bench_with_input(BenchmarkId::new("direct", m), &spec, |b, s| {
            b.iter(|| field_transform_direct(s))
        });
        group.bench_with_input(BenchmarkId::new("fft", m), &spec, |b, s| {
            b.iter(|| field_transform_fft(s))
        });
    }
    group.finish();
}

fn correlations(c: &mut Criterion) {
    let mut group = c.benchmark_group("multimode");
    for m in [1024usize, 65536] {
        let spec = ramp_spectrum(m);
        group.bench_with_input(BenchmarkId::new("pair_correlation", m), &spec, |b, s| {
            b.iter(|| multimode::pair_correlation(s))
        });
        let half = Region::contiguous(0, m / 2, m).unwrap();
        group.bench_with_input(BenchmarkId::new("subvolume_half", m), &(spec, half), |b, (s, r)| {
            b.iter(|| multimode::subvolume_variance(s, r).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(20);
    for occ in [&[1u64, 2][..], &[3, 0, 2], &[2, 2, 2]] {
        let (_, state) = dense_product(occ);
        let label = format!("{occ:?}");
        group.bench_with_input(BenchmarkId::new("fourth_moment_tensor", &label), &state, |b, st| {
            b.iter_batched(
                || DenseFockSpace::for_state(st).unwrap(),
                |space| space.fourth_moment_tensor(st).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

fn thermal_sweep(c: &mut Criterion) {
    let grid = beta_omega_grid(50);
    c.bench_function("thermal/distribution_sweep_50", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&x| {
                    let spec = ThermalModeSpec::from_reduced(x).unwrap();
                    thermal::thermal_distribution(&spec, 1e-14)
                        .unwrap()
                        .distribution
                        .variance()
                })
                .sum::<f64>()
        })
    });
    c.bench_function("thermal/closed_form_50", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&x| thermal::thermal_dispersion(&ThermalModeSpec::from_reduced(black_box(x)).unwrap()).variance)
                .sum::<f64>()
        })
    });
}

criterion_group!(benches, transforms, correlations, oracle, thermal_sweep);
criterion_main!(benches);
