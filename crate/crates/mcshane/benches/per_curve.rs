use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mcshane::cluster::TwistState;
use mcshane::exec::Exec;
use mcshane::numerics::rational;
use mcshane::verify::{mcshane_sum, SumMode, VerifyOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CUTOFF: i64 = 20;

fn per_curve(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let seeds = [
        ("fuchsian", TwistState::ones()),
        ("random", TwistState::random(&mut rng, &rational(1, 3), &rational(3, 1), 12).expect("valid range")),
    ];
    let mut group = c.benchmark_group("mcshane_sum");
    group.sample_size(10);
    for (name, st) in &seeds {
        for (label, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel { threads: 0 })] {
            let opts = VerifyOptions { exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(label, name), st, |b, st| {
                b.iter(|| mcshane_sum(st, CUTOFF, SumMode::Curve, &opts).expect("sum"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, per_curve);
criterion_main!(benches);
