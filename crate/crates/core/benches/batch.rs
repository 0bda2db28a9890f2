use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gridroute::algorithms::PolicyId;
use gridroute::batch::{run_batch, run_batch_sequential};
use gridroute::engine::SimConfig;
use gridroute::grid::{ConvexSubgrid, DuplexMode, GridKind, Node};
use gridroute::instances::{gen_random_permutation, Instance};

fn batch(c: &mut Criterion) {
    let cases = [
        ("tri_12x12", ConvexSubgrid::rect(GridKind::Triangular, 0, 0, 12, 12), PolicyId::TriPermFull),
        ("hex_r8", ConvexSubgrid::ball(GridKind::Hexagonal, Node::hex(0, 0, 0), 8), PolicyId::HexPermFull),
    ];
    let mut group = c.benchmark_group("random_permutations_x32");
    group.sample_size(10);
    for (name, grid, policy) in cases {
        let insts: Vec<Instance> = (0..32).map(|s| gen_random_permutation(&grid, s).unwrap()).collect();
        let cfg = SimConfig::new(policy, DuplexMode::Full, &insts[0]);
        group.bench_with_input(BenchmarkId::new("parallel", name), &insts, |b, i| b.iter(|| run_batch(i, &cfg)));
        group.bench_with_input(BenchmarkId::new("sequential", name), &insts, |b, i| {
            b.iter(|| run_batch_sequential(i, &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
