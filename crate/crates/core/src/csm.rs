//! Contracted strategy-masks: an assumption template on the opponent paired
//! with a strategy template for the owner, computed for safety, Büchi,
//! co-Büchi and parity objectives.

use thiserror::Error;

use crate::fixpoints::{attr, coop_buchi, coop_cobuchi, coop_parity, coop_safety, cpre, frontier};
use crate::game::{EdgeSet, Player, PriorityFn, SubGame, Vertex, VertexSet};
use crate::templates::{LiveGroup, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("expansion stalled before covering the game; {0:?} never reached")]
    NonTermination(VertexSet),
    #[error("vertex {0} of the synthesizing player is in the opponent's help set")]
    HelpSetOwnership(Vertex),
}

/// Assumption on the opponent (edges sourced at opponent vertices) and
/// strategy template for the owner (edges sourced at the owner's vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csm {
    pub owner: Player,
    pub assumption: Template,
    pub strategy: Template,
}

impl Csm {
    pub fn empty(owner: Player) -> Self {
        Csm {
            owner,
            assumption: Template::new(),
            strategy: Template::new(),
        }
    }

    /// First edge whose source has the wrong owner for its side, if any.
    pub fn ownership_violation(&self, g: &SubGame) -> Option<(Vertex, Vertex)> {
        let check =
            |t: &Template, want: Player| t.edges().into_iter().find(|&(u, _)| g.owner(u) != want);
        check(&self.assumption, self.owner.opponent()).or_else(|| check(&self.strategy, self.owner))
    }

    /// Component-wise conjunction with another mask of the same owner.
    pub fn conjoin(&self, other: &Csm) -> Csm {
        debug_assert_eq!(self.owner, other.owner);
        Csm {
            owner: self.owner,
            assumption: crate::templates::conjoin(&self.assumption, &other.assumption),
            strategy: crate::templates::conjoin(&self.strategy, &other.strategy),
        }
    }
}

/// Region plus mask for the Büchi and co-Büchi constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsmResult {
    pub region: VertexSet,
    pub csm: Csm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityTempResult {
    pub region: VertexSet,
    /// Vertices the objective requires to be visited only finitely often.
    pub colive_core: VertexSet,
    pub csm: Csm,
}

fn split_edges(g: &SubGame, edges: EdgeSet, i: Player) -> (EdgeSet, EdgeSet) {
    edges.into_iter().partition(|&(u, _)| g.owner(u) == i)
}

/// Edges leaving the cooperative safety core of `u`, split into those of
/// player `i` and those of the opponent.
pub fn unsafe_temp(g: &SubGame, u: &VertexSet, i: Player) -> (EdgeSet, EdgeSet) {
    let core = coop_safety(g, u);
    let outside = g.domain().difference(&core);
    split_edges(g, g.edges_between(&core, &outside), i)
}

/// Live groups steering every vertex of `g` towards `target`: attractor
/// levels of player `i` and single-step help from the opponent, alternately.
///
/// `g` must be the cooperative Büchi region of `target`.
pub fn live_proc(
    g: &SubGame,
    target: &VertexSet,
    i: Player,
) -> Result<(Vec<LiveGroup>, Vec<LiveGroup>), SynthesisError> {
    let mut strategy = Vec::new();
    let mut assumption = Vec::new();
    let mut u = target.intersection(g.domain());
    while &u != g.domain() {
        let res = attr(g, &u, i);
        for level in res.levels {
            let (own, opp) = split_edges(g, level, i);
            if !own.is_empty() {
                strategy.push(LiveGroup::new(own));
            }
            if !opp.is_empty() {
                assumption.push(LiveGroup::new(opp));
            }
        }
        u.union_with(&res.attractor);
        let help = cpre(g, &u, i.opponent()).difference(&u);
        if let Some(v) = help.iter().find(|&v| g.owner(v) == i) {
            return Err(SynthesisError::HelpSetOwnership(v));
        }
        if help.is_empty() && res.attractor.is_empty() {
            return Err(SynthesisError::NonTermination(g.domain().difference(&u)));
        }
        let group = g.edges_between(&help, &u);
        if !group.is_empty() {
            assumption.push(LiveGroup::new(group));
        }
        u.union_with(&help);
    }
    Ok((strategy, assumption))
}

/// Co-live edges pushing every vertex of `g` back towards the safety core
/// of `target`, split into player `i`'s edges and the opponent's.
///
/// `g` must be the cooperative co-Büchi region of `target`.
pub fn colive_proc(
    g: &SubGame,
    target: &VertexSet,
    i: Player,
) -> Result<(EdgeSet, EdgeSet), SynthesisError> {
    let mut u = coop_safety(g, target);
    let mut d = g.edges_between(&u, &g.domain().difference(&u));
    while &u != g.domain() {
        let f = frontier(g, &u);
        if f.is_empty() {
            return Err(SynthesisError::NonTermination(g.domain().difference(&u)));
        }
        d.extend(g.edges_between(&f, &f));
        u.union_with(&f);
        d.extend(g.edges_between(&u, &g.domain().difference(&u)));
    }
    Ok(split_edges(g, d, i))
}

pub fn buchi_temp(g: &SubGame, target: &VertexSet, i: Player) -> Result<CsmResult, SynthesisError> {
    let region = coop_buchi(g, target);
    let (own, opp) = unsafe_temp(g, &region, i);
    let sub = g.induced(&region);
    let (ls, la) = live_proc(&sub, &target.intersection(&region), i)?;
    let n = g.universe();
    let mut strategy = Template::live(n, ls);
    strategy.unsafe_edges = own;
    let mut assumption = Template::live(n, la);
    assumption.unsafe_edges = opp;
    Ok(CsmResult {
        region,
        csm: Csm {
            owner: i,
            assumption,
            strategy,
        },
    })
}

pub fn cobuchi_temp(
    g: &SubGame,
    target: &VertexSet,
    i: Player,
) -> Result<CsmResult, SynthesisError> {
    let region = coop_cobuchi(g, target);
    let (own, opp) = unsafe_temp(g, &region, i);
    let sub = g.induced(&region);
    let (ds, da) = colive_proc(&sub, &target.intersection(&region), i)?;
    Ok(CsmResult {
        region,
        csm: Csm {
            owner: i,
            assumption: Template {
                unsafe_edges: opp,
                colive: da,
                cond_live: Vec::new(),
            },
            strategy: Template {
                unsafe_edges: own,
                colive: ds,
                cond_live: Vec::new(),
            },
        },
    })
}

/// Mask for a parity objective, peeling the highest priority one level at
/// a time: an odd top priority contributes co-live edges towards the
/// region winnable without it, an even top priority contributes
/// conditional live groups towards it.
pub fn parity_temp(
    g: &SubGame,
    p: &PriorityFn,
    i: Player,
) -> Result<ParityTempResult, SynthesisError> {
    let region = coop_parity(g, p);
    let (own, opp) = unsafe_temp(g, &region, i);
    let mut strategy = Template::unsafe_only(own);
    let mut assumption = Template::unsafe_only(opp);
    let mut colive_core = g.empty_set();
    let mut prio = p.clone();
    let mut cur = g.induced(&region);

    while let Some(d) = prio.max_in(cur.domain()) {
        let top = prio.priority_set(d, cur.domain());
        let rest = if d % 2 == 1 {
            let without_top = cur.induced(&cur.domain().difference(&top));
            let w = coop_parity(&without_top, &prio);
            let (ds, da) = colive_proc(&cur, &w, i)?;
            strategy.colive.extend(ds);
            assumption.colive.extend(da);
            colive_core.union_with(&cur.domain().difference(&w));
            w
        } else {
            let wd = coop_buchi(&cur, &top);
            let sub = cur.induced(&wd);
            for l in (1..d).step_by(2) {
                let cond = prio.priority_set(l, &wd);
                if cond.is_empty() {
                    continue;
                }
                let mut goal = g.empty_set();
                for q in (l + 1..=d).step_by(2) {
                    goal.union_with(&prio.priority_set(q, &wd));
                }
                let (ls, la) = live_proc(&sub, &goal, i)?;
                strategy.push_cond_live(cond.clone(), ls);
                assumption.push_cond_live(cond, la);
            }
            cur.domain().difference(&wd)
        };
        if d == 0 {
            break;
        }
        for v in top.iter() {
            prio.set(v, 0);
        }
        cur = cur.induced(&rest);
    }

    Ok(ParityTempResult {
        region,
        colive_core,
        csm: Csm {
            owner: i,
            assumption,
            strategy,
        },
    })
}
