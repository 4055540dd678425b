use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rwre_bench::{critical_lattice, sinai_environment};
use rwre_core::graphene::two_terminal_conductance;
use rwre_core::network::{effective_resistance, lattice_ball, BallNorm};
use rwre_core::walk::{left_excursion_durations, simulate_local_time};

fn walk_stepping(c: &mut Criterion) {
    let env = sinai_environment(4000, 1);
    let mut group = c.benchmark_group("walk");
    group.bench_function("local_time_1e6", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            black_box(simulate_local_time(&env, 0, 1_000_000, seed).unwrap())
        })
    });
    let drifted = rwre_core::env::sample_environment(
        &rwre_core::env::EnvironmentLaw::deterministic(0.7).unwrap(),
        rwre_core::env::SiteWindow::symmetric(400),
        0,
    )
    .unwrap();
    group.bench_function("excursions_1e4", |b| b.iter(|| black_box(left_excursion_durations(&drifted, 10_000, 3).unwrap())));
    group.finish();
}

fn dirichlet_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("dirichlet");
    for r in [8u32, 16] {
        let ball = lattice_ball(3, r, 1.0, BallNorm::Euclidean).unwrap();
        group.bench_with_input(BenchmarkId::new("ball_d3", r), &ball, |b, ball| {
            b.iter(|| black_box(effective_resistance(&ball.network, ball.origin, ball.ground).unwrap()))
        });
    }
    group.finish();
}

fn graphene_conductance(c: &mut Criterion) {
    let mut group = c.benchmark_group("graphene");
    for (l, gamma) in [(32, 0.0), (32, 0.05), (64, 0.0)] {
        let lat = critical_lattice(l, gamma, 7);
        group.bench_with_input(BenchmarkId::new(format!("gamma{gamma}"), l), &lat, |b, lat| {
            b.iter(|| black_box(two_terminal_conductance(lat).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, walk_stepping, dirichlet_solve, graphene_conductance);
criterion_main!(benches);
