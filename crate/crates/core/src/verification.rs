//! Brute-force oracles and checks of negotiated outcomes.
//!
//! The oracles enumerate vertex subsets directly and share no code with
//! [`crate::fixpoints`], so agreement between the two is evidence rather
//! than a tautology.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fixpoints::coop_parity_conjunction;
use crate::game::{GameGraph, Player, PriorityFn, Vertex, VertexSet};
use crate::negotiation::{NegotiationOutcome, Status};
use crate::par;
use crate::templates::{
    conjoin, eval_parity, eval_template, extract_strategy, run_profile, Lasso, StrategyError,
};

/// Largest game the subset oracles accept by default.
pub const BRUTE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("game has {n} vertices; the brute-force oracle is capped at {cap}")]
    SizeCap { n: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("outcome is not compatible")]
    NotCompatible,
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("no winning lasso found in {0} consecutive attempts")]
    Exhausted(usize),
}

fn successor_masks(g: &GameGraph) -> Vec<u64> {
    g.vertices()
        .map(|v| g.successors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect()
}

/// Whether the subgraph induced on `mask` is strongly connected and carries
/// at least one edge.
fn strongly_connected(succ: &[u64], mask: u64) -> bool {
    let root = mask.trailing_zeros() as usize;
    if mask.count_ones() == 1 {
        return succ[root] & mask != 0;
    }
    let forward = closure(mask, root, |v| succ[v]);
    if forward != mask {
        return false;
    }
    let pred = |v: usize| {
        (0..succ.len())
            .filter(|&u| succ[u] >> v & 1 == 1)
            .fold(0u64, |m, u| m | 1 << u)
    };
    closure(mask, root, pred) == mask
}

fn closure(mask: u64, root: usize, next: impl Fn(usize) -> u64) -> u64 {
    let mut seen = 1u64 << root;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let mut fresh = next(v) & mask & !seen;
        seen |= fresh;
        while fresh != 0 {
            let w = fresh.trailing_zeros() as usize;
            fresh &= fresh - 1;
            queue.push_back(w);
        }
    }
    seen
}

/// Cooperative region of the conjunction of `objectives`: a vertex is in it
/// iff it reaches a strongly connected vertex set whose maximal priority is
/// even under every objective (a play can loop through the whole set).
pub fn brute_coop_all(
    g: &GameGraph,
    objectives: &[&PriorityFn],
    cap: usize,
) -> Result<VertexSet, OracleError> {
    let n = g.vertex_count();
    if n > cap.min(63) {
        return Err(OracleError::SizeCap { n, cap });
    }
    let succ = successor_masks(g);
    let mut good = 0u64;
    for mask in 1u64..(1u64 << n) {
        if mask & !good == 0 {
            continue;
        }
        let even = objectives.iter().all(|p| {
            let top = (0..n)
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| p.get(v))
                .max();
            top.is_some_and(|t| t % 2 == 0)
        });
        if even && strongly_connected(&succ, mask) {
            good |= mask;
        }
    }
    let mut out = g.empty_set();
    for v in 0..n {
        if closure(u64::MAX >> (64 - n), v, |u| succ[u]) & good != 0 {
            out.insert(v);
        }
    }
    Ok(out)
}

pub fn brute_coop_parity(g: &GameGraph, p: &PriorityFn) -> Result<VertexSet, OracleError> {
    brute_coop_all(g, &[p], BRUTE_CAP)
}

pub fn brute_coop_two(
    g: &GameGraph,
    p0: &PriorityFn,
    p1: &PriorityFn,
) -> Result<VertexSet, OracleError> {
    brute_coop_all(g, &[p0, p1], BRUTE_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexVerdict {
    pub vertex: Vertex,
    pub in_coop_region: bool,
    /// The play of the extracted profile satisfies every original objective
    /// of both players.
    pub profile_wins: bool,
    /// Per player: all of its original objectives hold on the play.
    pub objectives_met: [bool; 2],
    /// `None` when the vertex lies outside the negotiated game.
    pub lasso: Option<Lasso>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    pub verdicts: Vec<VertexVerdict>,
    /// Every vertex the profile wins from is cooperatively winning.
    pub sound: bool,
    /// The profile wins from every cooperatively winning vertex.
    pub complete: bool,
    /// `"brute"` for subset enumeration, `"fixpoint"` above the size cap.
    pub oracle: &'static str,
}

impl ProfileReport {
    pub fn exact(&self) -> bool {
        self.sound && self.complete
    }
}

/// Extracts the decoupled round-robin profile from a compatible outcome,
/// runs it from every vertex and compares against the cooperative region
/// of the original objectives.
pub fn verify_profile_winning(
    g: &GameGraph,
    originals: [&[PriorityFn]; 2],
    outcome: &NegotiationOutcome,
) -> Result<ProfileReport, VerifyError> {
    if outcome.status != Status::Compatible {
        return Err(VerifyError::NotCompatible);
    }
    let all: Vec<&PriorityFn> = originals.iter().flat_map(|ps| ps.iter()).collect();
    let (coop, oracle) = if g.vertex_count() <= BRUTE_CAP {
        (brute_coop_all(g, &all, BRUTE_CAP)?, "brute")
    } else {
        (coop_parity_conjunction(&g.full(), &all), "fixpoint")
    };
    let view = outcome.view(g);
    let [c0, c1] = &outcome.csms;
    let s0 = extract_strategy(&view, &conjoin(&c1.assumption, &c0.strategy), Player::Zero)?;
    let s1 = extract_strategy(&view, &conjoin(&c0.assumption, &c1.strategy), Player::One)?;

    let vertices: Vec<Vertex> = g.vertices().collect();
    let verdicts = par::map(&vertices, |&v| {
        let in_coop_region = coop.contains(v);
        if !outcome.live_region.contains(v) {
            return Ok(VertexVerdict {
                vertex: v,
                in_coop_region,
                profile_wins: false,
                objectives_met: [false, false],
                lasso: None,
            });
        }
        let lasso = run_profile(g, &mut s0.clone(), &mut s1.clone(), v)?;
        let objectives_met = [0, 1].map(|i| originals[i].iter().all(|p| eval_parity(&lasso, p)));
        Ok(VertexVerdict {
            vertex: v,
            in_coop_region,
            profile_wins: objectives_met[0] && objectives_met[1],
            objectives_met,
            lasso: Some(lasso),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, StrategyError>>()?;

    let sound = verdicts.iter().all(|r| !r.profile_wins || r.in_coop_region);
    let complete = verdicts.iter().all(|r| !r.in_coop_region || r.profile_wins);
    Ok(ProfileReport {
        verdicts,
        sound,
        complete,
        oracle,
    })
}

/// A random lasso: a walk from a random vertex that closes its cycle at a
/// random revisit once it is at least `min_len` long.
pub fn random_lasso(g: &GameGraph, rng: &mut impl Rng) -> Lasso {
    let n = g.vertex_count();
    let min_len = rng.gen_range(1..=2 * n + 2);
    let mut path = vec![rng.gen_range(0..n)];
    let mut first_seen = vec![usize::MAX; n];
    first_seen[path[0]] = 0;
    loop {
        let cur = *path.last().unwrap();
        let succ = g.successors(cur);
        let next = succ[rng.gen_range(0..succ.len())];
        let at = first_seen[next];
        let long = path.len() >= min_len;
        if at != usize::MAX && long && (path.len() > 4 * n || rng.gen_bool(0.4)) {
            let cycle = path.split_off(at);
            return Lasso::new(path, cycle);
        }
        if at == usize::MAX {
            first_seen[next] = path.len();
        }
        path.push(next);
    }
}

/// Up to `count` seeded random lassos satisfying `accept`.
pub fn sample_lassos(
    g: &GameGraph,
    accept: impl Fn(&Lasso) -> bool,
    count: usize,
    seed: u64,
) -> Result<Vec<Lasso>, SamplingError> {
    const MAX_MISSES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut misses = 0;
    while out.len() < count {
        let l = random_lasso(g, &mut rng);
        if accept(&l) {
            out.push(l);
            misses = 0;
        } else {
            misses += 1;
            if misses == MAX_MISSES {
                return Err(SamplingError::Exhausted(MAX_MISSES));
            }
        }
    }
    Ok(out)
}

pub fn sample_winning_lassos(
    g: &GameGraph,
    p: &PriorityFn,
    count: usize,
    seed: u64,
) -> Result<Vec<Lasso>, SamplingError> {
    sample_lassos(g, |l| eval_parity(l, p), count, seed)
}

/// Evaluates the contracted specification of each player on a lasso:
/// the other player's assumption on it, and its own strengthened
/// objectives whenever its own assumption holds. The strengthened
/// objectives also require the play to stay in the negotiated game.
pub fn contracted_specs(l: &Lasso, outcome: &NegotiationOutcome) -> [bool; 2] {
    let inside = l
        .stem
        .iter()
        .chain(&l.cycle)
        .all(|&v| outcome.live_region.contains(v));
    [Player::Zero, Player::One].map(|i| {
        let me = outcome.csm(i);
        let other = outcome.csm(i.opponent());
        let owed = eval_template(l, &other.assumption);
        let relied = eval_template(l, &me.assumption);
        let goal = inside
            && outcome.objectives[i.index()]
                .iter()
                .all(|p| eval_parity(l, p));
        owed && (!relied || goal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{buchi_to_parity, cobuchi_to_parity};
    use crate::negotiation::negotiate;

    #[test]
    fn oracle_on_small_games() {
        let g = example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        assert_eq!(brute_coop_parity(&g, &p0).unwrap(), g.all_vertices());

        let two = GameGraph::new(vec![Player::Zero, Player::One], vec![vec![1], vec![0]]).unwrap();
        assert!(brute_coop_parity(&two, &PriorityFn::new(vec![1, 1]))
            .unwrap()
            .is_empty());
        assert_eq!(
            brute_coop_parity(&two, &PriorityFn::new(vec![1, 2])).unwrap(),
            two.all_vertices()
        );
    }

    #[test]
    fn two_objective_oracle() {
        let g = example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        let p1 = cobuchi_to_parity(&g, &g.vertex_set([A, C, D]));
        let p1_alt = cobuchi_to_parity(&g, &g.vertex_set([A, B, C]));
        assert_eq!(brute_coop_two(&g, &p0, &p1).unwrap(), g.all_vertices());
        assert_eq!(brute_coop_two(&g, &p0, &p1_alt).unwrap(), g.all_vertices());
        let odd = PriorityFn::uniform(4, 1);
        let even = PriorityFn::uniform(4, 0);
        assert!(brute_coop_two(&g, &odd, &even).unwrap().is_empty());
    }

    #[test]
    fn oracle_respects_the_cap() {
        let n = BRUTE_CAP + 1;
        let g = GameGraph::new(vec![Player::Zero; n], (0..n).map(|v| vec![v]).collect()).unwrap();
        assert_eq!(
            brute_coop_parity(&g, &PriorityFn::uniform(n, 0)),
            Err(OracleError::SizeCap { n, cap: BRUTE_CAP })
        );
    }

    #[test]
    fn profiles_win_on_example() {
        let g = example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        let p1 = cobuchi_to_parity(&g, &g.vertex_set([A, C, D]));
        let out = negotiate(&g, &p0, &p1, None).unwrap();
        let report = verify_profile_winning(&g, [std::slice::from_ref(&p0), &[p1]], &out).unwrap();
        assert!(report.exact());
        for r in &report.verdicts {
            let l = r.lasso.as_ref().unwrap();
            assert!(l.cycle.contains(&C));
            assert!(!l.cycle.contains(&B));
        }

        let p1_alt = cobuchi_to_parity(&g, &g.vertex_set([A, B, C]));
        let out = negotiate(&g, &p0, &p1_alt, None).unwrap();
        let report = verify_profile_winning(&g, [&[p0], &[p1_alt]], &out).unwrap();
        assert!(report.exact());
        for r in &report.verdicts {
            assert!(!r.lasso.as_ref().unwrap().cycle.contains(&D));
        }
    }

    #[test]
    fn empty_region_is_vacuously_complete() {
        let g = example();
        let odd = PriorityFn::uniform(4, 1);
        let even = PriorityFn::uniform(4, 0);
        let out = negotiate(&g, &odd, &even, None).unwrap();
        let report = verify_profile_winning(&g, [&[odd], &[even]], &out).unwrap();
        assert!(report.exact());
        assert!(report.verdicts.iter().all(|r| !r.profile_wins));
    }

    #[test]
    fn sampling() {
        let g = example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        let lassos = sample_winning_lassos(&g, &p0, 5, 7).unwrap();
        assert_eq!(lassos.len(), 5);
        for l in &lassos {
            assert!(l.is_valid_in(&g));
            assert!(l.cycle.contains(&C));
        }
        assert_eq!(lassos, sample_winning_lassos(&g, &p0, 5, 7).unwrap());
        assert_eq!(
            sample_winning_lassos(&g, &PriorityFn::uniform(4, 1), 1, 0),
            Err(SamplingError::Exhausted(10_000))
        );
        assert!(sample_winning_lassos(&g, &p0, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn contracted_specs_agree_with_originals_on_example() {
        let g = example();
        let p0 = buchi_to_parity(&g, &g.vertex_set([C]));
        let p1 = cobuchi_to_parity(&g, &g.vertex_set([A, B, C]));
        let out = negotiate(&g, &p0, &p1, None).unwrap();
        let lassos = sample_lassos(&g, |_| true, 300, 3).unwrap();
        for l in &lassos {
            let original = eval_parity(l, &p0) && eval_parity(l, &p1);
            let [a, b] = contracted_specs(l, &out);
            assert_eq!(original, a && b, "{l:?}");
        }
    }
}
