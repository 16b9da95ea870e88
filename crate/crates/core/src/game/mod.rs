//! Game graphs, parity objectives and their text encodings.

mod format;
mod subgame;
mod vertex_set;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{
    parse_game, serialize_game, serialize_single, ParseError, ParseErrorKind, ParsedGame,
};
pub use subgame::SubGame;
pub use vertex_set::VertexSet;

/// Dense vertex index.
pub type Vertex = usize;

/// A directed edge `(source, target)`.
pub type Edge = (Vertex, Vertex);

/// Ordered edge set; the ordering keeps every serialized output stable.
pub type EdgeSet = BTreeSet<Edge>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Player {
    Zero,
    One,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Zero, Player::One];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Player::Zero => 0,
            Player::One => 1,
        }
    }

    #[inline]
    pub fn opponent(self) -> Player {
        match self {
            Player::Zero => Player::One,
            Player::One => Player::Zero,
        }
    }

    pub fn from_index(i: usize) -> Option<Player> {
        match i {
            0 => Some(Player::Zero),
            1 => Some(Player::One),
            _ => None,
        }
    }
}

impl From<Player> for u8 {
    fn from(p: Player) -> u8 {
        p.index() as u8
    }
}

impl TryFrom<u8> for Player {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Player::from_index(v as usize).ok_or_else(|| format!("invalid player {v}"))
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vertex {0} has no successors")]
    EmptySuccessors(Vertex),
    #[error("vertex {vertex} lists successor {target} twice")]
    DuplicateSuccessor { vertex: Vertex, target: Vertex },
    #[error("edge {vertex} -> {target} leaves the vertex range 0..{n}")]
    TargetOutOfRange {
        vertex: Vertex,
        target: Vertex,
        n: usize,
    },
    #[error("expected {expected} entries in {what}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("vertex {0} has no successor inside the restriction set")]
    NotClosed(Vertex),
}

/// Finite game graph with a two-player vertex partition and a total
/// successor relation. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameGraph {
    owner: Vec<Player>,
    successors: Vec<Vec<Vertex>>,
    predecessors: Vec<Vec<Vertex>>,
    names: Vec<Option<String>>,
    edge_count: usize,
}

impl GameGraph {
    pub fn new(owner: Vec<Player>, successors: Vec<Vec<Vertex>>) -> Result<Self, GameError> {
        let n = owner.len();
        Self::with_names(owner, successors, vec![None; n])
    }

    pub fn with_names(
        owner: Vec<Player>,
        successors: Vec<Vec<Vertex>>,
        names: Vec<Option<String>>,
    ) -> Result<Self, GameError> {
        let n = owner.len();
        if successors.len() != n {
            return Err(GameError::LengthMismatch {
                what: "successor lists",
                expected: n,
                found: successors.len(),
            });
        }
        if names.len() != n {
            return Err(GameError::LengthMismatch {
                what: "vertex names",
                expected: n,
                found: names.len(),
            });
        }
        let mut predecessors = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (v, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(GameError::EmptySuccessors(v));
            }
            let mut seen = BTreeSet::new();
            for &w in succ {
                if w >= n {
                    return Err(GameError::TargetOutOfRange {
                        vertex: v,
                        target: w,
                        n,
                    });
                }
                if !seen.insert(w) {
                    return Err(GameError::DuplicateSuccessor {
                        vertex: v,
                        target: w,
                    });
                }
                predecessors[w].push(v);
                edge_count += 1;
            }
        }
        Ok(GameGraph {
            owner,
            successors,
            predecessors,
            names,
            edge_count,
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    #[inline]
    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.successors[v]
    }

    #[inline]
    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.predecessors[v]
    }

    pub fn name(&self, v: Vertex) -> Option<&str> {
        self.names[v].as_deref()
    }

    /// Name of `v` if it has one, its index otherwise.
    pub fn label(&self, v: Vertex) -> String {
        self.name(v).map_or_else(|| v.to_string(), str::to_owned)
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.vertex_count()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.vertex_count() && self.successors[u].contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    pub fn owned_by(&self, player: Player) -> VertexSet {
        VertexSet::from_iter_in(
            self.vertex_count(),
            self.vertices().filter(|&v| self.owner[v] == player),
        )
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.vertex_count())
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn vertex_set(&self, members: impl IntoIterator<Item = Vertex>) -> VertexSet {
        VertexSet::from_iter_in(self.vertex_count(), members)
    }

    /// Looks a vertex up by name.
    pub fn find(&self, name: &str) -> Option<Vertex> {
        self.names.iter().position(|n| n.as_deref() == Some(name))
    }

    /// The whole graph as a subgame view.
    pub fn full(&self) -> SubGame<'_> {
        SubGame::new(self, self.all_vertices())
    }
}

/// Materializes the subgraph induced on `u`.
///
/// Returns the new graph together with the map from new indices to the
/// original ones.
pub fn restrict(g: &GameGraph, u: &VertexSet) -> Result<(GameGraph, Vec<Vertex>), RestrictError> {
    let keep: Vec<Vertex> = u.iter().collect();
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    let mut successors = Vec::with_capacity(keep.len());
    for &v in &keep {
        let succ: Vec<Vertex> = g
            .successors(v)
            .iter()
            .filter(|&&w| u.contains(w))
            .map(|&w| index[w])
            .collect();
        if succ.is_empty() {
            return Err(RestrictError::NotClosed(v));
        }
        successors.push(succ);
    }
    let owner = keep.iter().map(|&v| g.owner(v)).collect();
    let names = keep.iter().map(|&v| g.names[v].clone()).collect();
    let graph = GameGraph::with_names(owner, successors, names)
        .expect("an induced subgraph of a valid graph is valid once closed");
    Ok((graph, keep))
}

/// Vertex-to-priority mapping of a max-parity objective: a play wins when
/// the largest priority seen infinitely often is even.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriorityFn {
    priorities: Vec<u32>,
}

impl PriorityFn {
    pub fn new(priorities: Vec<u32>) -> Self {
        PriorityFn { priorities }
    }

    /// Constant priority function.
    pub fn uniform(n: usize, priority: u32) -> Self {
        PriorityFn::new(vec![priority; n])
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> u32 {
        self.priorities[v]
    }

    pub fn set(&mut self, v: Vertex, priority: u32) {
        self.priorities[v] = priority;
    }

    pub fn len(&self) -> usize {
        self.priorities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priorities.is_empty()
    }

    /// The maximal priority `d`; zero for an empty function.
    pub fn max(&self) -> u32 {
        self.priorities.iter().copied().max().unwrap_or(0)
    }

    /// Maximal priority over the members of `set`, `None` for an empty set.
    pub fn max_in(&self, set: &VertexSet) -> Option<u32> {
        set.iter().map(|v| self.priorities[v]).max()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.priorities
    }

    /// The priority set `P^j` restricted to `within`.
    pub fn priority_set(&self, j: u32, within: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(within.universe());
        for v in within.iter() {
            if self.priorities[v] == j {
                out.insert(v);
            }
        }
        out
    }

    /// Pulls the function back along an index map as returned by [`restrict`].
    pub fn reindexed(&self, map: &[Vertex]) -> PriorityFn {
        PriorityFn::new(map.iter().map(|&v| self.priorities[v]).collect())
    }
}

/// Büchi objective "visit `target` infinitely often" as a parity function.
pub fn buchi_to_parity(g: &GameGraph, target: &VertexSet) -> PriorityFn {
    PriorityFn::new(
        g.vertices()
            .map(|v| if target.contains(v) { 2 } else { 1 })
            .collect(),
    )
}

/// Co-Büchi objective "eventually stay in `target`" as a parity function.
pub fn cobuchi_to_parity(g: &GameGraph, target: &VertexSet) -> PriorityFn {
    PriorityFn::new(
        g.vertices()
            .map(|v| if target.contains(v) { 0 } else { 1 })
            .collect(),
    )
}

/// A game graph with one parity objective per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoObjectiveGame {
    pub graph: GameGraph,
    pub p0: PriorityFn,
    pub p1: PriorityFn,
}

impl TwoObjectiveGame {
    pub fn new(graph: GameGraph, p0: PriorityFn, p1: PriorityFn) -> Result<Self, GameError> {
        for p in [&p0, &p1] {
            if p.len() != graph.vertex_count() {
                return Err(GameError::LengthMismatch {
                    what: "priorities",
                    expected: graph.vertex_count(),
                    found: p.len(),
                });
            }
        }
        Ok(TwoObjectiveGame { graph, p0, p1 })
    }

    pub fn objective(&self, player: Player) -> &PriorityFn {
        match player {
            Player::Zero => &self.p0,
            Player::One => &self.p1,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validation_rejects_bad_graphs() {
        assert_eq!(
            GameGraph::new(vec![Player::Zero], vec![vec![]]),
            Err(GameError::EmptySuccessors(0))
        );
        assert!(matches!(
            GameGraph::new(vec![Player::Zero], vec![vec![1]]),
            Err(GameError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            GameGraph::new(vec![Player::Zero], vec![vec![0, 0]]),
            Err(GameError::DuplicateSuccessor { .. })
        ));
    }

    #[test]
    fn restrict_filters_edges() {
        let g = example();
        let (sub, map) = restrict(&g, &g.vertex_set([A, C])).unwrap();
        assert_eq!(map, vec![A, C]);
        let edges: Vec<_> = sub.edges().map(|(u, v)| (map[u], map[v])).collect();
        assert_eq!(edges, vec![(A, A), (A, C), (C, C), (C, A)]);

        let (sub, map) = restrict(&g, &g.vertex_set([B, C])).unwrap();
        let edges: Vec<_> = sub.edges().map(|(u, v)| (map[u], map[v])).collect();
        assert_eq!(edges, vec![(B, B), (C, C)]);
    }

    #[test]
    fn restrict_to_everything_is_identity() {
        let g = example();
        let (sub, map) = restrict(&g, &g.all_vertices()).unwrap();
        assert_eq!(sub, g);
        assert_eq!(map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn restrict_rejects_open_sets() {
        let g = example();
        assert_eq!(
            restrict(&g, &g.vertex_set([D])),
            Err(RestrictError::NotClosed(D))
        );
    }

    #[test]
    fn objective_encodings() {
        let g = example();
        assert_eq!(
            buchi_to_parity(&g, &g.vertex_set([C])).as_slice(),
            &[1, 1, 2, 1]
        );
        assert_eq!(
            cobuchi_to_parity(&g, &g.vertex_set([A, C, D])).as_slice(),
            &[0, 1, 0, 0]
        );
        assert_eq!(cobuchi_to_parity(&g, &g.all_vertices()).max(), 0);
    }
}
