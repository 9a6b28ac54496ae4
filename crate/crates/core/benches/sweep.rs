use coded_shuffle::algebra::GaloisField;
use coded_shuffle::par::Exec;
use coded_shuffle::payload::PayloadSource;
use coded_shuffle::sweep::{self, SweepConfig};
use coded_shuffle::{fsct, osct, InstanceDescriptor, IvCatalog};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn small_sweep() -> SweepConfig {
    SweepConfig { d: vec!["0".into(), "1/8".into(), "1/4".into(), "3/8".into()], samples: 8, ..SweepConfig::default() }
}

fn bench_sweep(c: &mut Criterion) {
    let cfg = small_sweep();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| sweep::run_sweep(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_execute(c: &mut Criterion) {
    let (mapping, reducing) = sweep::bias_loads(4, &coded_shuffle::algebra::rational::rat(1, 8));
    let inst = InstanceDescriptor::RandomByLoad { k: 4, n: 24, q: 24, mapping, reducing, seed: 11 }
        .generate()
        .unwrap();
    let cat = IvCatalog::build(&inst);
    let field = GaloisField::default_field();
    let source = PayloadSource::new(5, &field);
    let mut group = c.benchmark_group("execute");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        group.bench_with_input(BenchmarkId::new("osct", name), &exec, |b, &exec| {
            b.iter(|| osct::osct_execute(&inst, &cat, &field, source, 1, true, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fsct", name), &exec, |b, &exec| {
            b.iter(|| fsct::fsct_execute(&inst, &cat, &field, source, 1, true, 3, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_execute);
criterion_main!(benches);
