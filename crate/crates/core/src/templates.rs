//! Strategy templates over edges, their semantics on lassos, the
//! conflict-freeness check and round-robin strategy extraction.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::game::{Edge, EdgeSet, GameGraph, Player, PriorityFn, SubGame, Vertex, VertexSet};

/// A set of edges of which one must be taken infinitely often whenever a
/// source of the group is visited infinitely often.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiveGroup {
    pub edges: EdgeSet,
}

impl LiveGroup {
    pub fn new(edges: EdgeSet) -> Self {
        LiveGroup { edges }
    }

    pub fn sources(&self) -> BTreeSet<Vertex> {
        self.edges.iter().map(|&(u, _)| u).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl<const N: usize> From<[Edge; N]> for LiveGroup {
    fn from(edges: [Edge; N]) -> Self {
        LiveGroup::new(EdgeSet::from(edges))
    }
}

/// Live groups that only need to be served when a vertex of `cond` is
/// visited infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondLiveGroup {
    pub cond: VertexSet,
    pub groups: Vec<LiveGroup>,
}

/// Conjunction of an unsafe-edge set, a co-live edge set and conditional
/// live groups. A plain live group is stored with `cond` = all vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Template {
    pub unsafe_edges: EdgeSet,
    pub colive: EdgeSet,
    pub cond_live: Vec<CondLiveGroup>,
}

impl Template {
    pub fn new() -> Self {
        Template::default()
    }

    pub fn unsafe_only(edges: EdgeSet) -> Self {
        Template {
            unsafe_edges: edges,
            ..Template::default()
        }
    }

    pub fn colive_only(edges: EdgeSet) -> Self {
        Template {
            colive: edges,
            ..Template::default()
        }
    }

    /// Unconditional live groups over a graph of `n` vertices.
    pub fn live(n: usize, groups: Vec<LiveGroup>) -> Self {
        Template::default().with_cond_live(VertexSet::full(n), groups)
    }

    /// Adds a conditional live-group entry, dropping empty groups; nothing is
    /// added if `cond` or the remaining groups are empty.
    pub fn with_cond_live(mut self, cond: VertexSet, groups: Vec<LiveGroup>) -> Self {
        self.push_cond_live(cond, groups);
        self
    }

    pub fn push_cond_live(&mut self, cond: VertexSet, groups: Vec<LiveGroup>) {
        let mut groups: Vec<LiveGroup> = groups.into_iter().filter(|h| !h.is_empty()).collect();
        dedup_keep_order(&mut groups);
        if cond.is_empty() || groups.is_empty() {
            return;
        }
        let entry = CondLiveGroup { cond, groups };
        if !self.cond_live.contains(&entry) {
            self.cond_live.push(entry);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.unsafe_edges.is_empty() && self.colive.is_empty() && self.cond_live.is_empty()
    }

    /// `S ∪ D`.
    pub fn blocked(&self) -> EdgeSet {
        self.unsafe_edges.union(&self.colive).copied().collect()
    }

    /// Every edge mentioned anywhere in the template.
    pub fn edges(&self) -> EdgeSet {
        let mut out = self.blocked();
        for entry in &self.cond_live {
            for h in &entry.groups {
                out.extend(h.edges.iter().copied());
            }
        }
        out
    }

    /// Keeps only edges whose source lies in `sources`; groups left empty
    /// are dropped.
    pub fn restrict_sources(&self, sources: &VertexSet) -> Template {
        let keep = |e: &&Edge| sources.contains(e.0);
        let mut out = Template {
            unsafe_edges: self.unsafe_edges.iter().filter(keep).copied().collect(),
            colive: self.colive.iter().filter(keep).copied().collect(),
            cond_live: Vec::new(),
        };
        for entry in &self.cond_live {
            let groups = entry
                .groups
                .iter()
                .map(|h| LiveGroup::new(h.edges.iter().filter(keep).copied().collect()))
                .collect();
            out.push_cond_live(entry.cond.clone(), groups);
        }
        out
    }

    /// Drops live-group edges whose source has a single successor in `g`.
    /// Such edges are taken whenever their source is visited, so the group
    /// requirement at that source is vacuous.
    pub fn without_forced_edges(&self, g: &SubGame) -> Template {
        let mut out = Template {
            unsafe_edges: self.unsafe_edges.clone(),
            colive: self.colive.clone(),
            cond_live: Vec::new(),
        };
        for entry in &self.cond_live {
            let groups = entry
                .groups
                .iter()
                .map(|h| {
                    LiveGroup::new(
                        h.edges
                            .iter()
                            .filter(|&&(u, _)| g.successors(u).nth(1).is_some())
                            .copied()
                            .collect(),
                    )
                })
                .collect();
            out.push_cond_live(entry.cond.clone(), groups);
        }
        out
    }

    /// All live groups, ignoring their conditions.
    pub fn live_groups(&self) -> impl Iterator<Item = &LiveGroup> {
        self.cond_live.iter().flat_map(|c| c.groups.iter())
    }
}

fn dedup_keep_order<T: PartialEq>(items: &mut Vec<T>) {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for item in items.drain(..) {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    *items = out;
}

/// Component-wise union of two templates.
pub fn conjoin(t1: &Template, t2: &Template) -> Template {
    let mut out = Template {
        unsafe_edges: t1.unsafe_edges.union(&t2.unsafe_edges).copied().collect(),
        colive: t1.colive.union(&t2.colive).copied().collect(),
        cond_live: Vec::new(),
    };
    for entry in t1.cond_live.iter().chain(&t2.cond_live) {
        out.push_cond_live(entry.cond.clone(), entry.groups.clone());
    }
    out
}

/// An ultimately periodic play: `stem` followed by `cycle` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub stem: Vec<Vertex>,
    pub cycle: Vec<Vertex>,
}

impl Lasso {
    pub fn new(stem: Vec<Vertex>, cycle: Vec<Vertex>) -> Self {
        assert!(!cycle.is_empty(), "a lasso needs a non-empty cycle");
        Lasso { stem, cycle }
    }

    pub fn first(&self) -> Vertex {
        self.stem.first().copied().unwrap_or(self.cycle[0])
    }

    /// Edges taken infinitely often, including the wrap-around.
    pub fn cycle_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| (self.cycle[i], self.cycle[(i + 1) % k]))
    }

    /// Edges of the stem, including the junction into the cycle.
    pub fn stem_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let k = self.stem.len();
        (0..k).map(move |i| {
            let next = if i + 1 < k {
                self.stem[i + 1]
            } else {
                self.cycle[0]
            };
            (self.stem[i], next)
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.stem_edges().chain(self.cycle_edges())
    }

    pub fn is_valid_in(&self, g: &GameGraph) -> bool {
        let n = g.vertex_count();
        self.stem.iter().chain(&self.cycle).all(|&v| v < n)
            && self.edges().all(|(u, v)| g.has_edge(u, v))
    }
}

/// Max-parity acceptance: the largest priority on the cycle is even.
pub fn eval_parity(l: &Lasso, p: &PriorityFn) -> bool {
    l.cycle
        .iter()
        .map(|&v| p.get(v))
        .max()
        .expect("non-empty cycle")
        % 2
        == 0
}

pub fn eval_template(l: &Lasso, t: &Template) -> bool {
    if l.edges().any(|e| t.unsafe_edges.contains(&e)) {
        return false;
    }
    let on_cycle: BTreeSet<Edge> = l.cycle_edges().collect();
    if on_cycle.iter().any(|e| t.colive.contains(e)) {
        return false;
    }
    let inf: BTreeSet<Vertex> = l.cycle.iter().copied().collect();
    for entry in &t.cond_live {
        if !inf.iter().any(|&v| entry.cond.contains(v)) {
            continue;
        }
        for h in &entry.groups {
            let active = h.edges.iter().any(|(u, _)| inf.contains(u));
            if active && !h.edges.iter().any(|e| on_cycle.contains(e)) {
                return false;
            }
        }
    }
    true
}

/// A live group that cannot be served from one of its sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupConflict {
    pub group: LiveGroup,
    pub source: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateCheck {
    pub conflict_free: bool,
    /// Vertices whose every outgoing edge is unsafe or co-live.
    pub bad_vertices: VertexSet,
    pub bad_groups: Vec<GroupConflict>,
}

/// Checks that every vertex keeps an edge outside `S ∪ D`, and that every
/// source of every live group keeps a group edge outside `S ∪ D`.
pub fn check_template(g: &SubGame, t: &Template) -> TemplateCheck {
    let blocked = t.blocked();
    let mut bad_vertices = g.empty_set();
    for v in g.vertices() {
        if g.successors(v).all(|w| blocked.contains(&(v, w))) {
            bad_vertices.insert(v);
        }
    }
    let mut bad_groups = Vec::new();
    for h in t.live_groups() {
        for u in h.sources() {
            let served = h
                .edges
                .iter()
                .any(|&(s, w)| s == u && g.has_edge(s, w) && !blocked.contains(&(s, w)));
            let group = GroupConflict {
                group: h.clone(),
                source: u,
            };
            if !served && g.contains(u) && !bad_groups.contains(&group) {
                bad_groups.push(group);
            }
        }
    }
    TemplateCheck {
        conflict_free: bad_vertices.is_empty() && bad_groups.is_empty(),
        bad_vertices,
        bad_groups,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("every edge leaving vertex {0} is unsafe or co-live")]
    ConflictAt(Vertex),
    #[error("no move is defined at vertex {0}")]
    UndefinedAt(Vertex),
}

/// Round-robin strategy: at each owned vertex, cycle through the allowed
/// successors in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    player: Player,
    allowed: Vec<Vec<Vertex>>,
    cursor: Vec<usize>,
}

impl Strategy {
    /// Builds a strategy from explicit successor lists; vertices with an
    /// empty list are left undefined.
    pub fn from_choices(player: Player, allowed: Vec<Vec<Vertex>>) -> Self {
        let cursor = vec![0; allowed.len()];
        Strategy {
            player,
            allowed,
            cursor,
        }
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn allowed(&self, v: Vertex) -> &[Vertex] {
        &self.allowed[v]
    }

    /// Next move from `v`, advancing the round-robin cursor.
    pub fn step(&mut self, v: Vertex) -> Option<Vertex> {
        let options = &self.allowed[v];
        if options.is_empty() {
            return None;
        }
        let w = options[self.cursor[v]];
        self.cursor[v] = (self.cursor[v] + 1) % options.len();
        Some(w)
    }

    pub fn reset(&mut self) {
        self.cursor.iter_mut().for_each(|c| *c = 0);
    }

    fn memory(&self) -> impl Iterator<Item = usize> + '_ {
        self.allowed
            .iter()
            .zip(&self.cursor)
            .filter(|(a, _)| a.len() > 1)
            .map(|(_, &c)| c)
    }
}

/// Round-robin strategy for `player` following `t` on the view `g`.
pub fn extract_strategy(
    g: &SubGame,
    t: &Template,
    player: Player,
) -> Result<Strategy, StrategyError> {
    let blocked = t.blocked();
    let mut allowed = vec![Vec::new(); g.universe()];
    for v in g.owned_by(player).iter() {
        let mut options: Vec<Vertex> = g
            .successors(v)
            .filter(|&w| !blocked.contains(&(v, w)))
            .collect();
        if options.is_empty() {
            return Err(StrategyError::ConflictAt(v));
        }
        options.sort_unstable();
        allowed[v] = options;
    }
    Ok(Strategy::from_choices(player, allowed))
}

/// Plays the profile `(s0, s1)` from `v` until a configuration (vertex and
/// every cursor) repeats, and returns the resulting lasso. Cursors are
/// reset first so the run only depends on the arguments.
pub fn run_profile(
    g: &GameGraph,
    s0: &mut Strategy,
    s1: &mut Strategy,
    v: Vertex,
) -> Result<Lasso, StrategyError> {
    s0.reset();
    s1.reset();
    let mut seen: HashMap<(Vertex, Vec<usize>), usize> = HashMap::new();
    let mut path = Vec::new();
    let mut cur = v;
    loop {
        let key = (cur, s0.memory().chain(s1.memory()).collect::<Vec<_>>());
        if let Some(&start) = seen.get(&key) {
            let cycle = path.split_off(start);
            return Ok(Lasso::new(path, cycle));
        }
        seen.insert(key, path.len());
        path.push(cur);
        let s = match g.owner(cur) {
            Player::Zero => &mut *s0,
            Player::One => &mut *s1,
        };
        cur = s.step(cur).ok_or(StrategyError::UndefinedAt(cur))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{buchi_to_parity, GameGraph};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, Strategy as _};

    fn psi0(g: &GameGraph) -> Template {
        Template::live(g.vertex_count(), vec![LiveGroup::from([(B, D)])])
    }

    #[test]
    fn conjoin_unions_components() {
        let g = example();
        let t = psi0(&g);
        assert_eq!(conjoin(&Template::new(), &t), t);
        assert_eq!(conjoin(&t, &t), t);
        let both = conjoin(&t, &Template::colive_only(EdgeSet::from([(B, D)])));
        assert_eq!(both.colive, EdgeSet::from([(B, D)]));
        assert_eq!(both.cond_live, t.cond_live);
    }

    #[test]
    fn parity_on_lassos() {
        let g = example();
        let p = buchi_to_parity(&g, &g.vertex_set([C]));
        assert!(eval_parity(&Lasso::new(vec![A], vec![C]), &p));
        assert!(!eval_parity(&Lasso::new(vec![], vec![B]), &p));
        assert!(eval_parity(&Lasso::new(vec![B, D], vec![C]), &p));
    }

    #[test]
    fn template_semantics_on_lassos() {
        let g = example();
        let t = psi0(&g);
        assert!(!eval_template(&Lasso::new(vec![], vec![B]), &t));
        assert!(eval_template(&Lasso::new(vec![B, D], vec![C]), &t));
        let colive = Template::colive_only(EdgeSet::from([(A, B)]));
        assert!(!eval_template(
            &Lasso::new(vec![], vec![A, B, D, C]),
            &colive
        ));
        assert!(eval_template(&Lasso::new(vec![A, B, D], vec![C]), &colive));
        let unsafe_ab = Template::unsafe_only(EdgeSet::from([(A, B)]));
        assert!(!eval_template(
            &Lasso::new(vec![A, B, D], vec![C]),
            &unsafe_ab
        ));
    }

    #[test]
    fn conflict_between_live_and_colive() {
        let g = example();
        let pi1_alt = Template::colive_only(EdgeSet::from([(B, D)]));
        let check = check_template(&g.full(), &conjoin(&psi0(&g), &pi1_alt));
        assert!(!check.conflict_free);
        assert!(check.bad_vertices.is_empty());
        assert_eq!(
            check.bad_groups,
            vec![GroupConflict {
                group: LiveGroup::from([(B, D)]),
                source: B
            }]
        );

        let psi1 = Template::colive_only(EdgeSet::from([(A, B)]));
        let pi0 = Template::live(g.vertex_count(), vec![LiveGroup::from([(A, C)])]);
        assert!(check_template(&g.full(), &conjoin(&psi1, &pi0)).conflict_free);
        assert!(check_template(&g.full(), &Template::new()).conflict_free);
    }

    #[test]
    fn extraction_skips_blocked_edges() {
        let g = example();
        let psi1 = Template::colive_only(EdgeSet::from([(A, B)]));
        let pi0 = Template::live(g.vertex_count(), vec![LiveGroup::from([(A, C)])]);
        let s = extract_strategy(&g.full(), &conjoin(&psi1, &pi0), Player::Zero).unwrap();
        assert_eq!(s.allowed(A), &[A, C]);
        assert_eq!(s.allowed(D), &[C]);
        assert!(s.allowed(B).is_empty());

        let all_d = Template::unsafe_only(EdgeSet::from([(D, C)]));
        assert_eq!(
            extract_strategy(&g.full(), &all_d, Player::Zero),
            Err(StrategyError::ConflictAt(D))
        );

        let s = extract_strategy(&g.full(), &Template::new(), Player::Zero).unwrap();
        assert_eq!(s.allowed(A), &[A, B, C]);
    }

    #[test]
    fn round_robin_cycles() {
        let mut s = Strategy::from_choices(Player::Zero, vec![vec![0, 2], vec![]]);
        assert_eq!(s.step(0), Some(0));
        assert_eq!(s.step(0), Some(2));
        assert_eq!(s.step(0), Some(0));
        assert_eq!(s.step(1), None);
    }

    #[test]
    fn profile_runs() {
        let one = self_loop();
        let mut s0 = extract_strategy(&one.full(), &Template::new(), Player::Zero).unwrap();
        let mut s1 = extract_strategy(&one.full(), &Template::new(), Player::One).unwrap();
        assert_eq!(
            run_profile(&one, &mut s0, &mut s1, 0).unwrap(),
            Lasso::new(vec![], vec![0])
        );

        let chain = GameGraph::new(
            vec![Player::Zero, Player::One, Player::Zero, Player::One],
            vec![vec![1], vec![2], vec![3], vec![2]],
        )
        .unwrap();
        let mut s0 = extract_strategy(&chain.full(), &Template::new(), Player::Zero).unwrap();
        let mut s1 = extract_strategy(&chain.full(), &Template::new(), Player::One).unwrap();
        assert_eq!(
            run_profile(&chain, &mut s0, &mut s1, 0).unwrap(),
            Lasso::new(vec![0, 1], vec![2, 3])
        );

        let mut empty = Strategy::from_choices(Player::One, vec![vec![]; 4]);
        assert_eq!(
            run_profile(&chain, &mut s0, &mut empty, 0),
            Err(StrategyError::UndefinedAt(1))
        );
    }

    #[test]
    fn round_robin_alternates_in_the_lasso() {
        let g = example();
        let mut s0 =
            Strategy::from_choices(Player::Zero, vec![vec![A, C], vec![], vec![], vec![C]]);
        let mut s1 = Strategy::from_choices(Player::One, vec![vec![], vec![D], vec![A], vec![]]);
        let l = run_profile(&g, &mut s0, &mut s1, A).unwrap();
        assert!(l.is_valid_in(&g));
        assert!(l.cycle.contains(&A) && l.cycle.contains(&C));
    }

    fn arb_template(n: usize) -> impl proptest::strategy::Strategy<Value = Template> {
        let edge = (0..n, 0..n);
        (
            proptest::collection::btree_set(edge.clone(), 0..4),
            proptest::collection::btree_set(edge.clone(), 0..4),
            proptest::collection::vec(
                (
                    proptest::collection::btree_set(0..n, 1..=n),
                    proptest::collection::vec(proptest::collection::btree_set(edge, 1..3), 1..3),
                ),
                0..3,
            ),
        )
            .prop_map(move |(s, d, h)| {
                let mut t = Template {
                    unsafe_edges: s,
                    colive: d,
                    cond_live: Vec::new(),
                };
                for (cond, groups) in h {
                    t.push_cond_live(
                        VertexSet::from_iter_in(n, cond),
                        groups.into_iter().map(LiveGroup::new).collect(),
                    );
                }
                t
            })
    }

    proptest! {
        #[test]
        fn eval_distributes_over_conjoin(
            t1 in arb_template(4),
            t2 in arb_template(4),
            stem in proptest::collection::vec(0usize..4, 0..3),
            cycle in proptest::collection::vec(0usize..4, 1..5),
        ) {
            let l = Lasso::new(stem, cycle);
            prop_assert_eq!(
                eval_template(&l, &conjoin(&t1, &t2)),
                eval_template(&l, &t1) && eval_template(&l, &t2)
            );
        }

        #[test]
        fn templates_without_blocked_edges_are_conflict_free(t in arb_template(4)) {
            let g = example();
            let live_only = Template { unsafe_edges: EdgeSet::new(), colive: EdgeSet::new(), ..t };
            let live_only = Template {
                cond_live: live_only
                    .cond_live
                    .into_iter()
                    .map(|c| CondLiveGroup {
                        cond: c.cond,
                        groups: c
                            .groups
                            .into_iter()
                            .map(|h| LiveGroup::new(h.edges.into_iter().filter(|&(u, v)| g.has_edge(u, v)).collect()))
                            .filter(|h| !h.is_empty())
                            .collect(),
                    })
                    .filter(|c| !c.groups.is_empty())
                    .collect(),
                ..live_only
            };
            prop_assert!(check_template(&g.full(), &live_only).conflict_free);
        }
    }
}
