//! Factory-suite driver shared by the CLI, the acceptance tests and the
//! benchmarks.

use std::time::{Duration, Instant};

use crate::benchgen::{gen_maze, maze_to_game, FactoryKind};
use crate::csm::SynthesisError;
use crate::negotiation::{negotiate, Status};
use crate::par::{self, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub x: usize,
    pub y: usize,
    pub walls: usize,
    pub one_way: usize,
    pub kind: FactoryKind,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    pub instance: Instance,
    pub vertices: usize,
    pub edges: usize,
    pub status: Result<Status, SynthesisError>,
    pub iterations: usize,
    /// The start state lies in the final joint winning region.
    pub realizable: bool,
    /// Negotiation time only; generation is excluded.
    pub elapsed: Duration,
}

/// Square mazes of side `min_side..=max_side`, `seeds` per side, with one
/// wall fewer than the side length and one one-way corridor.
pub fn square_suite(
    min_side: usize,
    max_side: usize,
    seeds: u64,
    kind: FactoryKind,
) -> Vec<Instance> {
    (min_side..=max_side)
        .flat_map(|s| {
            (0..seeds).map(move |seed| Instance {
                x: s,
                y: s,
                walls: s - 1,
                one_way: 1,
                kind,
                seed,
            })
        })
        .collect()
}

pub fn run_instance(inst: &Instance) -> InstanceResult {
    let maze = gen_maze(inst.x, inst.y, inst.walls, inst.one_way, inst.seed);
    let f = maze_to_game(&maze, inst.kind);
    let g = &f.game.graph;
    let t = Instant::now();
    let out = negotiate(g, &f.game.p0, &f.game.p1, None);
    let elapsed = t.elapsed();
    let (status, iterations, realizable) = match out {
        Ok(o) => (
            Ok(o.status),
            o.iterations.len(),
            o.winning_region().contains(0),
        ),
        Err(e) => (Err(e), 0, false),
    };
    InstanceResult {
        instance: *inst,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        status,
        iterations,
        realizable,
        elapsed,
    }
}

pub fn run_batch(mode: Mode, instances: &[Instance]) -> Vec<InstanceResult> {
    par::map_with(mode, instances, run_instance)
}

pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "median of an empty sample");
    xs.sort_by(f64::total_cmp);
    let k = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[k]
    } else {
        (xs[k - 1] + xs[k]) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_except_timing() {
        let suite = square_suite(2, 3, 2, FactoryKind::Buchi);
        let strip = |rs: Vec<InstanceResult>| {
            rs.into_iter()
                .map(|r| {
                    (
                        r.instance,
                        r.vertices,
                        r.edges,
                        r.status,
                        r.iterations,
                        r.realizable,
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(
            strip(run_batch(Mode::Sequential, &suite)),
            strip(run_batch(Mode::Parallel, &suite))
        );
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
