use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use strassen_core::{
    brute_force_dual, build_grid_instance, c_transform, solve_dual_mincut, solve_primal_mass,
    Direction, GroundSet, Measure, Potential, Rational, Relation,
};

fn numbered_ground(n: usize) -> Arc<GroundSet> {
    GroundSet::new((0..n).map(|i| format!("p{i}")).collect()).unwrap()
}

/// Deterministic sparse seed relation; roughly one percent fill.
fn scattered_relation(ground: Arc<GroundSet>) -> Relation {
    Relation::from_fn(ground, |i, j| {
        i < j && (i.wrapping_mul(2654435761) ^ j.wrapping_mul(40503)) % 97 == 0
    })
}

fn grid_pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    for n in [16u32, 64, 256] {
        group.bench_with_input(BenchmarkId::new("build_and_solve", n), &n, |b, &n| {
            b.iter(|| {
                let g = build_grid_instance(black_box(n)).unwrap();
                solve_primal_mass(g.mu(), g.nu(), g.relation()).unwrap()
            })
        });
    }
    group.finish();
}

fn transitive_closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure");
    group.sample_size(10);
    for n in [256usize, 1024] {
        let seed = scattered_relation(numbered_ground(n));
        group.bench_with_input(BenchmarkId::new("scattered", n), &seed, |b, seed| {
            b.iter(|| black_box(seed).transitive_reflexive_closure())
        });
    }
    group.finish();
}

fn conjugation(c: &mut Criterion) {
    let n = 256;
    let ground = numbered_ground(n);
    let cost = Relation::from_fn(ground.clone(), |i, j| i <= j).to_cost();
    let psi = Potential::new(
        ground,
        (0..n)
            .map(|i| Rational::new((i as i64).into(), (n as i64).into()))
            .collect(),
    )
    .unwrap();
    c.bench_function("c_transform/chain_256", |b| {
        b.iter(|| c_transform(black_box(&psi), &cost, Direction::First).unwrap())
    });
}

fn dual_solvers(c: &mut Criterion) {
    let n = 8;
    let ground = numbered_ground(n);
    let relation = scattered_relation(ground.clone()).transitive_reflexive_closure();
    let mu = Measure::uniform(ground.clone());
    let weights: Vec<Rational> = (0..n)
        .map(|i| Rational::new((2 * i as i64 + 1).into(), ((n * n) as i64).into()))
        .collect();
    let nu = Measure::new(ground, weights).unwrap();
    c.bench_function("dual/min_cut_8", |b| {
        b.iter(|| solve_dual_mincut(black_box(&mu), &nu, &relation).unwrap())
    });
    c.bench_function("dual/subset_scan_8", |b| {
        b.iter(|| brute_force_dual(black_box(&mu), &nu, &relation).unwrap())
    });
}

criterion_group!(
    benches,
    grid_pipeline,
    transitive_closure,
    conjugation,
    dual_solvers
);
criterion_main!(benches);
