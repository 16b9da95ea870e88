use crate::game::{Edge, EdgeSet, GameGraph, Player, RestrictError, Vertex, VertexSet};

/// A game graph seen through a vertex mask.
///
/// All solvers work on views so that sets and edges keep the indices of the
/// ambient graph while the algorithms repeatedly shrink the arena. A view
/// built with [`SubGame::restrict`] is closed (every member keeps a
/// successor inside the mask); [`SubGame::induced`] may leave dead ends,
/// which the cooperative solvers handle as vertices without infinite plays.
#[derive(Clone)]
pub struct SubGame<'g> {
    graph: &'g GameGraph,
    domain: VertexSet,
}

impl<'g> SubGame<'g> {
    pub(crate) fn new(graph: &'g GameGraph, domain: VertexSet) -> Self {
        debug_assert_eq!(domain.universe(), graph.vertex_count());
        SubGame { graph, domain }
    }

    #[inline]
    pub fn graph(&self) -> &'g GameGraph {
        self.graph
    }

    #[inline]
    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.domain.contains(v)
    }

    #[inline]
    pub fn owner(&self, v: Vertex) -> Player {
        self.graph.owner(v)
    }

    pub fn universe(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.universe())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.domain.iter()
    }

    pub fn successors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.graph
            .successors(v)
            .iter()
            .copied()
            .filter(move |&w| self.domain.contains(w))
    }

    pub fn predecessors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.graph
            .predecessors(v)
            .iter()
            .copied()
            .filter(move |&u| self.domain.contains(u))
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.contains(u) && self.contains(v) && self.graph.has_edge(u, v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices()
            .flat_map(move |u| self.successors(u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|u| self.successors(u).count()).sum()
    }

    /// Edges of the view leading from `from` into `to`.
    pub fn edges_between(&self, from: &VertexSet, to: &VertexSet) -> EdgeSet {
        let mut out = EdgeSet::new();
        for u in from.iter().filter(|&u| self.contains(u)) {
            for v in self.successors(u).filter(|&v| to.contains(v)) {
                out.insert((u, v));
            }
        }
        out
    }

    pub fn owned_by(&self, player: Player) -> VertexSet {
        let mut out = self.empty_set();
        for v in self.vertices().filter(|&v| self.owner(v) == player) {
            out.insert(v);
        }
        out
    }

    /// Closed sub-view on `u ∩ domain`.
    pub fn restrict(&self, u: &VertexSet) -> Result<SubGame<'g>, RestrictError> {
        let domain = u.intersection(&self.domain);
        for v in domain.iter() {
            if !self.graph.successors(v).iter().any(|&w| domain.contains(w)) {
                return Err(RestrictError::NotClosed(v));
            }
        }
        Ok(SubGame::new(self.graph, domain))
    }

    /// Sub-view on `u ∩ domain` without the closure check.
    pub fn induced(&self, u: &VertexSet) -> SubGame<'g> {
        SubGame::new(self.graph, u.intersection(&self.domain))
    }

    pub fn is_closed(&self) -> bool {
        self.vertices().all(|v| self.successors(v).next().is_some())
    }
}

impl std::fmt::Debug for SubGame<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubGame")
            .field("domain", &self.domain)
            .finish()
    }
}
