use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qbir::{gates, Register};

fn single_gates(c: &mut Criterion) {
    let cases: [(&str, &str, &[usize], &[usize]); 4] = [
        ("X", "X", &[2], &[]),
        ("H", "H", &[2], &[]),
        ("CNOT", "X", &[2], &[1]),
        ("Toffoli", "X", &[3], &[1, 2]),
    ];
    for (label, name, locs, ctrls) in cases {
        let m = gates::gate_matrix(name, &[]).unwrap();
        let cfg = vec![1; ctrls.len()];
        let mut group = c.benchmark_group(label);
        for n in [10, 14, 18] {
            let mut reg = Register::rand_state(n, 1, 0).unwrap();
            group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
                b.iter(|| reg.instruct(&m, locs, ctrls, &cfg).unwrap())
            });
        }
        group.finish();
    }
}

fn batched(c: &mut Criterion) {
    let m = gates::gate_matrix("H", &[]).unwrap();
    let mut group = c.benchmark_group("H batched n=10");
    for nbatch in [1, 16, 64] {
        let mut reg = Register::rand_state(10, nbatch, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(nbatch), &nbatch, |b, _| {
            b.iter(|| reg.instruct(&m, &[3], &[], &[]).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, single_gates, batched);
criterion_main!(benches);
