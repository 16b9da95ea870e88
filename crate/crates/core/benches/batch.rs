use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use csmkit::batch::{run_batch, square_suite};
use csmkit::benchgen::{gen_random_two_objective, FactoryKind};
use csmkit::negotiation::negotiate;
use csmkit::par::{map_with, Mode};
use csmkit::verification::verify_profile_winning;

const MODES: [(&str, Mode); 2] = [
    ("sequential", Mode::Sequential),
    ("parallel", Mode::Parallel),
];

fn factory(c: &mut Criterion) {
    let mut group = c.benchmark_group("factory_suite");
    group.sample_size(10);
    for kind in [FactoryKind::Buchi, FactoryKind::Parity] {
        let suite = square_suite(3, 5, 4, kind);
        for (name, mode) in MODES {
            group.bench_with_input(
                BenchmarkId::new(name, format!("{kind:?}")),
                &suite,
                |b, s| b.iter(|| run_batch(mode, s)),
            );
        }
    }
    group.finish();
}

fn random_games(c: &mut Criterion) {
    let games: Vec<_> = (0..64)
        .map(|seed| gen_random_two_objective(7, 3, 3, seed))
        .collect();
    let mut group = c.benchmark_group("negotiate_and_verify");
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                map_with(mode, &games, |t| {
                    let o = negotiate(&t.graph, &t.p0, &t.p1, None).unwrap();
                    verify_profile_winning(
                        &t.graph,
                        [std::slice::from_ref(&t.p0), std::slice::from_ref(&t.p1)],
                        &o,
                    )
                    .unwrap()
                    .exact()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, factory, random_games);
criterion_main!(benches);
