//! Parallel against sequential execution on the two data-parallel hot
//! spots: chamber enumeration (one LP per candidate facet) and a
//! verification suite (independent cases).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qmoduli::chambers::{enumerate_chambers_with, Mode};
use qmoduli::exec::Exec;
use qmoduli::limits::Limits;
use qmoduli::verify::{run_suite, Bounds, Suite};

const STRATEGIES: [(&str, Exec); 2] = [
    ("parallel", Exec::Parallel),
    ("sequential", Exec::Sequential),
];

fn chambers(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_chambers");
    group.sample_size(10);
    for (mode, n) in [(Mode::Qn, 5), (Mode::Pn, 4)] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{mode}{n}")),
                &(mode, n),
                |b, &(mode, n)| {
                    b.iter(|| {
                        enumerate_chambers_with(mode, n, exec, Limits::default())
                            .expect("within bounds")
                    })
                },
            );
        }
    }
    group.finish();
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_suite");
    group.sample_size(10);
    let bounds = Bounds {
        max_n: Some(5),
        samples: Some(200),
    };
    for suite in [Suite::FiveTerm, Suite::RoundtripHassett] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, suite), &suite, |b, &suite| {
                b.iter(|| run_suite(suite, 7, bounds, exec))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, chambers, suites);
criterion_main!(benches);
