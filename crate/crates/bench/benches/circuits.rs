use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbir::autodiff::expect_grad;
use qbir::{block, circuits, C64};
use qbir_bench::vqe_fixture;

fn heisenberg_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("heisenberg mat");
    group.sample_size(10);
    for n in [10, 14, 16] {
        let h = circuits::heisenberg(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| h.mat().unwrap()));
    }
    group.finish();
}

fn reverse_mode(c: &mut Criterion) {
    let mut group = c.benchmark_group("expect_grad depth 20");
    group.sample_size(10);
    for n in [6, 10, 14] {
        let (h, circuit, input) = vqe_fixture(n, 20, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| expect_grad(&h, &input, &circuit).unwrap())
        });
    }
    group.finish();
}

fn qft(c: &mut Criterion) {
    let mut group = c.benchmark_group("qft");
    for n in [8, 12, 16] {
        let circuit = circuits::qft(n).unwrap();
        let reg = qbir::Register::rand_state(n, 1, 0).unwrap();
        group.bench_with_input(BenchmarkId::new("circuit", n), &n, |b, _| {
            b.iter(|| {
                let mut r = reg.clone();
                circuit.apply(&mut r).unwrap();
                r
            })
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |b, _| {
            b.iter(|| {
                let mut r = reg.clone();
                circuits::qft_fft_apply(&mut r).unwrap();
                r
            })
        });
    }
    group.finish();
}

fn time_evolution(c: &mut Criterion) {
    let n = 12;
    let h = circuits::heisenberg(n).unwrap();
    let plain = block::time_evolve(h.clone(), C64::new(0.5, 0.0)).unwrap();
    let cached = block::time_evolve(block::cache(h), C64::new(0.5, 0.0)).unwrap();
    let reg = qbir::Register::rand_state(n, 1, 0).unwrap();
    let mut group = c.benchmark_group("time evolution n=12");
    group.sample_size(10);
    for (label, te) in [("uncached", &plain), ("cached", &cached)] {
        group.bench_function(label, |b| {
            b.iter(|| {
                let mut r = reg.clone();
                te.apply(&mut r).unwrap();
                r
            })
        });
    }
    group.finish();
}

criterion_group!(benches, heisenberg_matrix, reverse_mode, qft, time_evolution);
criterion_main!(benches);
