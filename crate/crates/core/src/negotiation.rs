//! Negotiation of compatible masks for two players.
//!
//! Each round computes one parity mask per player on the current game and
//! checks that each player can follow its own strategy template together
//! with the other player's assumption on it. On a conflict both objectives
//! are strengthened: the game is cut down to the joint cooperative region
//! and the vertices either player needs to leave eventually receive a fresh
//! top odd priority.

use thiserror::Error;

use crate::csm::{parity_temp, Csm, SynthesisError};
use crate::fixpoints::coop_safety;
use crate::game::{GameGraph, Player, PriorityFn, SubGame, VertexSet};
use crate::par;
use crate::templates::{check_template, conjoin, TemplateCheck};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecUpdateError {
    #[error("the joint region has no cooperatively safe core")]
    EmptyGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Compatible,
    IterationCapReached,
    /// A conflict round did not shrink `(|W|, |W \ C|)`; repeating the
    /// round would not make progress.
    Stalled,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Compatible => "compatible",
            Status::IterationCapReached => "iteration_cap_reached",
            Status::Stalled => "stalled",
        }
    }
}

/// What a conflict round changed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecUpdate {
    /// `W0 ∩ W1`.
    pub joint_region: VertexSet,
    /// `C0 ∪ C1`.
    pub colive_core: VertexSet,
    /// Safety core of the joint region: the next round's game.
    pub next_region: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub index: usize,
    pub regions: [VertexSet; 2],
    pub colive_cores: [VertexSet; 2],
    /// `checks[i]` examines player `i`'s strategy template conjoined with
    /// the other player's assumption.
    pub checks: [TemplateCheck; 2],
    pub update: Option<SpecUpdate>,
}

impl IterationRecord {
    pub fn conflict_free(&self) -> bool {
        self.checks.iter().all(|c| c.conflict_free)
    }

    pub fn joint_region(&self) -> VertexSet {
        self.regions[0].intersection(&self.regions[1])
    }

    pub fn joint_core(&self) -> VertexSet {
        self.colive_cores[0].union(&self.colive_cores[1])
    }

    /// `(|W|, |W \ C|)`, which shrinks lexicographically after every
    /// conflict round.
    pub fn measure(&self) -> (usize, usize) {
        let w = self.joint_region();
        let rest = w.difference(&self.joint_core()).len();
        (w.len(), rest)
    }

    pub fn conflict_count(&self) -> usize {
        self.checks
            .iter()
            .map(|c| c.bad_vertices.len() + c.bad_groups.len())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegotiationOutcome {
    /// Strengthened objectives per player. The first entry is the objective
    /// negotiated from the start; later entries were added incrementally.
    pub objectives: [Vec<PriorityFn>; 2],
    /// Vertices of the game the final round ran on.
    pub live_region: VertexSet,
    pub csms: [Csm; 2],
    pub iterations: Vec<IterationRecord>,
    pub status: Status,
}

impl NegotiationOutcome {
    pub fn csm(&self, player: Player) -> &Csm {
        &self.csms[player.index()]
    }

    pub fn final_priorities(&self) -> (&PriorityFn, &PriorityFn) {
        (&self.objectives[0][0], &self.objectives[1][0])
    }

    /// `W0 ∩ W1` of the final round: where the negotiated profile wins.
    pub fn winning_region(&self) -> VertexSet {
        self.iterations
            .last()
            .map(IterationRecord::joint_region)
            .unwrap_or_else(|| self.live_region.clone())
    }

    pub fn view<'g>(&self, g: &'g GameGraph) -> SubGame<'g> {
        g.full().induced(&self.live_region)
    }
}

/// Smallest odd number strictly above every priority of `p`.
fn fresh_odd(p: &PriorityFn) -> u32 {
    let m = p.max();
    if m.is_multiple_of(2) {
        m + 1
    } else {
        m + 2
    }
}

fn bump(p: &PriorityFn, c: &VertexSet, within: &VertexSet) -> PriorityFn {
    let top = fresh_odd(p);
    let mut out = p.clone();
    for v in c.iter().filter(|&v| within.contains(v)) {
        out.set(v, top);
    }
    out
}

/// Restricts the game to the safety core of `w` and gives the vertices of
/// `c` a fresh top odd priority.
pub fn apply_spec_update<'g>(
    g: &SubGame<'g>,
    p: &PriorityFn,
    w: &VertexSet,
    c: &VertexSet,
) -> Result<(SubGame<'g>, PriorityFn), SpecUpdateError> {
    let core = coop_safety(g, w);
    if core.is_empty() {
        return Err(SpecUpdateError::EmptyGame);
    }
    let sub = g.restrict(&core).expect("a safety core is closed");
    let p = bump(p, c, &core);
    Ok((sub, p))
}

struct PlayerRound {
    region: VertexSet,
    core: VertexSet,
    csm: Csm,
}

fn solve_player(
    g: &SubGame,
    objectives: &[PriorityFn],
    player: Player,
) -> Result<PlayerRound, SynthesisError> {
    let mut round = PlayerRound {
        region: g.domain().clone(),
        core: g.empty_set(),
        csm: Csm::empty(player),
    };
    for p in objectives {
        let res = parity_temp(g, p, player)?;
        round.region.intersect_with(&res.region);
        round.core.union_with(&res.colive_core);
        round.csm = round.csm.conjoin(&res.csm);
    }
    Ok(round)
}

fn cross_checks(g: &SubGame, csms: &[Csm; 2]) -> [TemplateCheck; 2] {
    [Player::Zero, Player::One].map(|i| {
        let other = &csms[i.opponent().index()];
        check_template(g, &conjoin(&other.assumption, &csms[i.index()].strategy))
    })
}

/// Default iteration bound `n² + 1`.
pub fn default_max_iters(g: &GameGraph) -> usize {
    let n = g.vertex_count();
    n * n + 1
}

pub fn negotiate(
    g: &GameGraph,
    p0: &PriorityFn,
    p1: &PriorityFn,
    max_iters: Option<usize>,
) -> Result<NegotiationOutcome, SynthesisError> {
    let state = NegotiationOutcome {
        objectives: [vec![p0.clone()], vec![p1.clone()]],
        live_region: g.all_vertices(),
        csms: [Csm::empty(Player::Zero), Csm::empty(Player::One)],
        iterations: Vec::new(),
        status: Status::IterationCapReached,
    };
    run_rounds(g, state, max_iters.unwrap_or_else(|| default_max_iters(g)))
}

fn run_rounds(
    g: &GameGraph,
    mut state: NegotiationOutcome,
    max_iters: usize,
) -> Result<NegotiationOutcome, SynthesisError> {
    let first = state.iterations.len();
    for k in 0..max_iters {
        let view = g.full().induced(&state.live_region);
        let (r0, r1) = par::join(
            || solve_player(&view, &state.objectives[0], Player::Zero),
            || solve_player(&view, &state.objectives[1], Player::One),
        );
        let (r0, r1) = (r0?, r1?);
        let csms = [r0.csm, r1.csm];
        let checks = cross_checks(&view, &csms);
        let mut record = IterationRecord {
            index: first + k + 1,
            regions: [r0.region, r1.region],
            colive_cores: [r0.core, r1.core],
            checks,
            update: None,
        };
        state.csms = csms;

        if record.conflict_free() {
            state.iterations.push(record);
            state.status = Status::Compatible;
            return Ok(state);
        }
        if let Some(prev) = state.iterations.last() {
            if prev.update.is_some() && record.measure() >= prev.measure() {
                state.iterations.push(record);
                state.status = Status::Stalled;
                return Ok(state);
            }
        }

        let joint = record.joint_region();
        let core = record.joint_core();
        let next = coop_safety(&view, &joint);
        for list in &mut state.objectives {
            for p in list.iter_mut() {
                *p = bump(p, &core, &next);
            }
        }
        record.update = Some(SpecUpdate {
            joint_region: joint,
            colive_core: core,
            next_region: next.clone(),
        });
        state.live_region = next;
        state.iterations.push(record);
    }
    state.status = Status::IterationCapReached;
    Ok(state)
}

/// Adds `p_new` to `player`'s objectives in a compatible outcome.
///
/// The new mask is computed on the negotiated game and conjoined with the
/// player's current one. If that introduces no conflict and keeps the
/// player's region, the outcome is returned without another round;
/// otherwise negotiation resumes with the player holding both objectives.
pub fn incremental_add(
    outcome: &NegotiationOutcome,
    g: &GameGraph,
    p_new: &PriorityFn,
    player: Player,
    max_iters: Option<usize>,
) -> Result<NegotiationOutcome, SynthesisError> {
    let view = outcome.view(g);
    let fresh = parity_temp(&view, p_new, player)?;
    let mut next = outcome.clone();
    next.objectives[player.index()].push(p_new.clone());

    if let Some(last) = outcome.iterations.last() {
        let region = &last.regions[player.index()];
        if outcome.status == Status::Compatible && region.is_subset(&fresh.region) {
            let mut csms = outcome.csms.clone();
            csms[player.index()] = csms[player.index()].conjoin(&fresh.csm);
            if cross_checks(&view, &csms).iter().all(|c| c.conflict_free) {
                next.csms = csms;
                return Ok(next);
            }
        }
    }
    run_rounds(g, next, max_iters.unwrap_or_else(|| default_max_iters(g)))
}
