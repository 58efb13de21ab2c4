use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use curv::par::Execution;
use curv::suite;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn identity(c: &mut Criterion) {
    let cfg = suite::IdentityConfig { trials: 20_000, ..Default::default() };
    let mut g = c.benchmark_group("identity");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| suite::identity_suite(&cfg, e).unwrap()));
    }
    g.finish();
}

fn inequality(c: &mut Criterion) {
    let cfg = suite::InequalityConfig { fields: 40, points: 10, ..Default::default() };
    let mut g = c.benchmark_group("inequality");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| b.iter(|| suite::inequality_suite(&cfg, e).unwrap()));
    }
    g.finish();
}

fn barrier(c: &mut Criterion) {
    let mut g = c.benchmark_group("barrier");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = suite::BarrierSuiteConfig::default();
        cfg.opts.exec = exec;
        g.bench_function(name, |b| b.iter(|| suite::barrier_suite(&cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, identity, inequality, barrier);
criterion_main!(benches);
