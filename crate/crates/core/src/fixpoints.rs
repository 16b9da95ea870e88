//! Set transformers and region solvers over [`SubGame`] views.
//!
//! Cooperative solvers treat both players as one: a vertex is in a
//! cooperative region when *some* play from it satisfies the objective.
//! They never require the view to be closed; a dead end simply has no
//! infinite continuation.

use std::collections::VecDeque;

use crate::game::{EdgeSet, Player, PriorityFn, SubGame, Vertex, VertexSet};

/// Controllable predecessor: vertices of `a` with some successor in `u`,
/// together with opponent vertices whose successors all lie in `u`.
pub fn cpre(g: &SubGame, u: &VertexSet, a: Player) -> VertexSet {
    let mut out = g.empty_set();
    for v in g.vertices() {
        let hit = if g.owner(v) == a {
            g.successors(v).any(|w| u.contains(w))
        } else {
            g.successors(v).all(|w| u.contains(w))
        };
        if hit {
            out.insert(v);
        }
    }
    out
}

/// Existential predecessor: vertices with some successor in `u`.
pub fn epre(g: &SubGame, u: &VertexSet) -> VertexSet {
    let mut out = g.empty_set();
    for w in u.iter().filter(|&w| g.contains(w)) {
        for v in g.predecessors(w) {
            out.insert(v);
        }
    }
    out
}

/// `epre(u) \ u`.
pub fn frontier(g: &SubGame, u: &VertexSet) -> VertexSet {
    epre(g, u).difference(u)
}

/// Attractor of a player towards a target, computed breadth first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrResult {
    /// Vertices from which the player forces a visit to the target in one or
    /// more steps. The target itself is excluded.
    pub attractor: VertexSet,
    /// One edge group per level `i >= 1`: edges from vertices first added at
    /// level `i` into levels `< i`. Levels whose vertices are all dead ends
    /// yield an empty group.
    pub levels: Vec<EdgeSet>,
}

pub fn attr(g: &SubGame, u: &VertexSet, a: Player) -> AttrResult {
    let n = g.universe();
    let mut reached = u.intersection(g.domain());
    let mut pending = vec![0usize; n];
    let mut layer: Vec<Vertex> = Vec::new();
    for v in g.vertices().filter(|&v| !reached.contains(v)) {
        if g.owner(v) != a {
            pending[v] = g.successors(v).count();
            if pending[v] == 0 {
                layer.push(v);
            }
        }
    }
    // Dead-end opponent vertices are vacuously forced: seed them at level 1.
    let mut next: Vec<Vertex> = Vec::new();
    let mut frontier_layer: Vec<Vertex> = reached.to_vec();
    let mut attractor = g.empty_set();
    let mut levels = Vec::new();
    let mut seen = reached.clone();
    for &v in &layer {
        seen.insert(v);
    }
    loop {
        for &w in &frontier_layer {
            for v in g.predecessors(w) {
                if seen.contains(v) {
                    continue;
                }
                if g.owner(v) == a {
                    seen.insert(v);
                    next.push(v);
                } else {
                    pending[v] -= 1;
                    if pending[v] == 0 {
                        seen.insert(v);
                        next.push(v);
                    }
                }
            }
        }
        next.append(&mut layer);
        if next.is_empty() {
            break;
        }
        let mut group = EdgeSet::new();
        for &v in &next {
            for w in g.successors(v).filter(|&w| reached.contains(w)) {
                group.insert((v, w));
            }
        }
        for &v in &next {
            reached.insert(v);
            attractor.insert(v);
        }
        levels.push(group);
        frontier_layer = std::mem::take(&mut next);
    }
    AttrResult { attractor, levels }
}

/// Zero-sum attractor including the target.
pub fn force_reach(g: &SubGame, u: &VertexSet, a: Player) -> VertexSet {
    let mut out = attr(g, u, a).attractor;
    out.union_with(&u.intersection(g.domain()));
    out
}

/// Backward existential reachability, target included.
pub fn coop_reach(g: &SubGame, target: &VertexSet) -> VertexSet {
    let mut out = target.intersection(g.domain());
    let mut queue: VecDeque<Vertex> = out.iter().collect();
    while let Some(w) = queue.pop_front() {
        for v in g.predecessors(w) {
            if out.insert(v) {
                queue.push_back(v);
            }
        }
    }
    out
}

/// Greatest fixpoint `νY. u ∩ epre(Y)`: vertices of `u` from which some play
/// stays in `u` forever.
pub fn coop_safety(g: &SubGame, u: &VertexSet) -> VertexSet {
    let mut keep = u.intersection(g.domain());
    let mut count = vec![0usize; g.universe()];
    let mut queue = VecDeque::new();
    for v in keep.iter() {
        count[v] = g.successors(v).filter(|&w| keep.contains(w)).count();
        if count[v] == 0 {
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if !keep.remove(v) {
            continue;
        }
        for p in g.predecessors(v) {
            if keep.contains(p) {
                count[p] -= 1;
                if count[p] == 0 {
                    queue.push_back(p);
                }
            }
        }
    }
    keep
}

/// Strongly connected components of the view that carry a cycle (more than
/// one vertex, or a self-loop).
pub fn cyclic_sccs(g: &SubGame) -> Vec<VertexSet> {
    sccs(g)
        .into_iter()
        .filter(|c| c.len() > 1 || c.first().is_some_and(|v| g.has_edge(v, v)))
        .collect()
}

/// All strongly connected components of the view (iterative Tarjan).
pub fn sccs(g: &SubGame) -> Vec<VertexSet> {
    const UNVISITED: usize = usize::MAX;
    let n = g.universe();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    let succ: Vec<Vec<Vertex>> = (0..n)
        .map(|v| {
            if g.contains(v) {
                g.successors(v).collect()
            } else {
                Vec::new()
            }
        })
        .collect();

    for root in g.vertices() {
        if index[root] != UNVISITED {
            continue;
        }
        let mut call: Vec<(Vertex, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = g.empty_set();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.insert(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// Vertices from which some play visits `target` infinitely often.
pub fn coop_buchi(g: &SubGame, target: &VertexSet) -> VertexSet {
    let mut recurrent = g.empty_set();
    for comp in cyclic_sccs(g) {
        if !comp.is_disjoint(target) {
            recurrent.union_with(&comp);
        }
    }
    coop_reach(g, &recurrent)
}

/// Vertices from which some play eventually stays in `target`.
pub fn coop_cobuchi(g: &SubGame, target: &VertexSet) -> VertexSet {
    coop_reach(g, &coop_safety(g, target))
}

/// Cooperative parity region: for each even priority `q`, cycles through a
/// `q`-vertex inside the `≤ q` part of the view are winning; the region is
/// everything that can reach one of them.
pub fn coop_parity(g: &SubGame, p: &PriorityFn) -> VertexSet {
    let mut good = g.empty_set();
    let mut evens: Vec<u32> = g
        .vertices()
        .map(|v| p.get(v))
        .filter(|q| q % 2 == 0)
        .collect();
    evens.sort_unstable();
    evens.dedup();
    for q in evens {
        let mut low = g.empty_set();
        for v in g.vertices().filter(|&v| p.get(v) <= q) {
            low.insert(v);
        }
        let sub = g.induced(&low);
        for comp in cyclic_sccs(&sub) {
            if comp.iter().any(|v| p.get(v) == q) {
                good.union_with(&comp);
            }
        }
    }
    coop_reach(g, &good)
}

/// Cooperative region of a conjunction of parity objectives.
///
/// A strongly connected set is a witness when its maximal priority is even
/// under every objective. Components failing some objective lose their
/// vertices of that odd maximum and are split again.
pub fn coop_parity_conjunction(g: &SubGame, objectives: &[&PriorityFn]) -> VertexSet {
    let mut good = g.empty_set();
    let mut work = cyclic_sccs(g);
    while let Some(comp) = work.pop() {
        let failing = objectives.iter().find_map(|p| {
            let top = p.max_in(&comp)?;
            (top % 2 == 1).then_some((p, top))
        });
        match failing {
            None => good.union_with(&comp),
            Some((p, top)) => {
                let rest = comp.difference(&p.priority_set(top, &comp));
                work.extend(cyclic_sccs(&g.induced(&rest)));
            }
        }
    }
    coop_reach(g, &good)
}

/// Zero-sum solution of the parity game in which player 0 holds `p`.
///
/// Returns `(w0, w1)`. The view must be closed.
pub fn zielonka(g: &SubGame, p: &PriorityFn) -> (VertexSet, VertexSet) {
    let [w0, w1] = zielonka_rec(g, p);
    (w0, w1)
}

fn zielonka_rec(g: &SubGame, p: &PriorityFn) -> [VertexSet; 2] {
    let Some(d) = p.max_in(g.domain()) else {
        return [g.empty_set(), g.empty_set()];
    };
    let me = if d % 2 == 0 {
        Player::Zero
    } else {
        Player::One
    };
    let opp = me.opponent();
    let top = p.priority_set(d, g.domain());
    let a = force_reach(g, &top, me);
    let sub = g.induced(&g.domain().difference(&a));
    let inner = zielonka_rec(&sub, p);
    let mut out = [g.empty_set(), g.empty_set()];
    if inner[opp.index()].is_empty() {
        out[me.index()] = g.domain().clone();
        return out;
    }
    let b = force_reach(g, &inner[opp.index()], opp);
    let rest = g.induced(&g.domain().difference(&b));
    let again = zielonka_rec(&rest, p);
    out[me.index()] = again[me.index()].clone();
    out[opp.index()] = again[opp.index()].union(&b);
    out
}
