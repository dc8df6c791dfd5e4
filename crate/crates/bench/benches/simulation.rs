use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use predckpt::sim::formula_spec;
use predckpt::{JobSpec, LawKind, Scenario, Strategy, TraceConfig, TraceStream};
use predckpt_bench::{accurate_predictor, platform};

fn trace_generation(c: &mut Criterion) {
    let cfg = TraceConfig::new(
        LawKind::Weibull { shape: 0.7 },
        &platform(1 << 19),
        &accurate_predictor(300.0),
    );
    c.bench_function("trace/10k events weibull:0.7", |b| {
        b.iter(|| TraceStream::new(black_box(cfg), 1).take(10_000).count())
    });
}

fn one_replicate(c: &mut Criterion) {
    let mut group = c.benchmark_group("replicate");
    let job = JobSpec::calibrated();
    for n in [1u64 << 16, 1 << 19] {
        let (pl, pr) = (platform(n), accurate_predictor(300.0));
        let scenario = Scenario::new(pl, pr, LawKind::Weibull { shape: 0.7 });
        for kind in [Strategy::Young, Strategy::NoCkptI] {
            let spec = formula_spec(kind, &pl, &pr).unwrap();
            group.bench_with_input(BenchmarkId::new(kind.name(), n), &spec, |b, spec| {
                b.iter(|| scenario.run_one(&job, spec, black_box(7)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, trace_generation, one_replicate);
criterion_main!(benches);
