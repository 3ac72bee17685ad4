//! State-space exploration with the frontier expanded in parallel versus
//! one state at a time.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ramproc::gen;
use ramproc::machines::{compile_apramp, Kind};
use ramproc::par::Exec;
use ramproc::semantics::{build_lts_with, Comm};
use ramproc::terms::{ProcTerm, Valuation};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// Asynchronous machines whose interleavings give wide BFS frontiers.
fn workload(deg: usize, len: usize) -> ProcTerm {
    let mut rng = StdRng::seed_from_u64(17);
    let progs: Vec<_> = (0..deg).map(|_| gen::straight_line(&mut rng, Kind::Smbram, len)).collect();
    ProcTerm::eval(Valuation::new(), compile_apramp(&progs).unwrap())
}

fn exploration(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_lts");
    group.sample_size(10);
    for (deg, len) in [(3, 4), (4, 4), (4, 6)] {
        let t = workload(deg, len);
        let size = build_lts_with(&t, &Comm::default(), 1 << 22, Exec::Sequential).unwrap().num_states();
        let id = format!("{deg}x{len} ({size} states)");
        for (name, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
            group.bench_with_input(BenchmarkId::new(name, &id), &t, |b, t| {
                b.iter(|| build_lts_with(black_box(t), &Comm::default(), 1 << 22, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, exploration);
criterion_main!(benches);
