//! Weighted graph and hypergraph containers with the cut primitives every
//! other module is built on: exact integer cut values, contraction, induced
//! subhypergraphs and connected components.
//!
//! Values are immutable after construction; contraction and friends return
//! new values. Each vertex carries a stable `label` so that vertices remain
//! traceable through chains of contractions.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Edge and cut weights. Non-negative 64-bit integers throughout; callers
/// with rational weights must pre-scale.
pub type Weight = u64;

/// Stable external identity of a vertex. Input vertices are labeled by their
/// own id; vertices created by contraction get labels chosen by the caller.
pub type Label = u64;

/// Total weight is capped so that flow arithmetic (including the +1 infinity
/// sentinel) never overflows 64 bits.
pub const WEIGHT_CAP: Weight = 1 << 62;

/// One side of a cut together with its exact value and boundary edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub side: BTreeSet<usize>,
    pub value: Weight,
    pub boundary: Vec<usize>,
}

/// Undirected weighted graph over dense vertex ids `0..n`.
///
/// Parallel edges are merged at construction, zero-weight edges dropped and
/// self-loops removed, matching the contraction semantics used everywhere.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    labels: Vec<Label>,
    edges: Vec<(usize, usize, Weight)>,
    adj: Vec<Vec<(usize, usize)>>, // vertex -> (edge id, other endpoint)
}

impl WeightedGraph {
    /// Builds a graph from an edge list. Fails on out-of-range endpoints or
    /// when the summed weight exceeds the overflow cap. Connectivity is not
    /// required here; use [`WeightedGraph::require_connected`] at the API
    /// boundary that needs it.
    pub fn new(n: usize, edge_list: &[(usize, usize, Weight)]) -> Result<Self> {
        let labels = (0..n as u64).collect();
        Self::with_labels(labels, edge_list)
    }

    pub fn with_labels(labels: Vec<Label>, edge_list: &[(usize, usize, Weight)]) -> Result<Self> {
        let n = labels.len();
        let mut merged: std::collections::BTreeMap<(usize, usize), Weight> =
            std::collections::BTreeMap::new();
        for &(u, v, w) in edge_list {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if u == v || w == 0 {
                continue;
            }
            let key = (u.min(v), u.max(v));
            *merged.entry(key).or_insert(0) += w;
        }
        let edges: Vec<(usize, usize, Weight)> =
            merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let total: u128 = edges.iter().map(|&(_, _, w)| w as u128).sum();
        if total >= WEIGHT_CAP as u128 {
            return Err(Error::WeightOverflow);
        }
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v, _)) in edges.iter().enumerate() {
            adj[u].push((id, v));
            adj[v].push((id, u));
        }
        Ok(WeightedGraph { labels, edges, adj })
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.connected_components().len() != 1 {
            return Err(Error::DisconnectedGraph);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, Weight)] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Local vertex id carrying the given label, if any.
    pub fn vertex_by_label(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Exact value `C(X)` of the cut `(X, V \ X)`.
    pub fn cut_value(&self, side: &BTreeSet<usize>) -> Result<Weight> {
        if side.is_empty() || side.len() >= self.n() {
            return Err(Error::EmptyOrFullSide);
        }
        let mut value = 0;
        for &(u, v, w) in &self.edges {
            if side.contains(&u) != side.contains(&v) {
                value += w;
            }
        }
        Ok(value)
    }

    /// Cut with value and boundary edge ids filled in.
    pub fn cut(&self, side: BTreeSet<usize>) -> Result<Cut> {
        let value = self.cut_value(&side)?;
        let boundary = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v, _))| side.contains(&u) != side.contains(&v))
            .map(|(id, _)| id)
            .collect();
        Ok(Cut {
            side,
            value,
            boundary,
        })
    }

    /// Contracts the vertex set `X` into a single new vertex carrying
    /// `label`. Multi-edges are merged and self-loops dropped. Returns the
    /// new graph, the id of the contracted vertex and the old-to-new vertex
    /// map.
    pub fn contract(
        &self,
        x: &BTreeSet<usize>,
        label: Label,
    ) -> Result<(WeightedGraph, usize, Vec<usize>)> {
        if x.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in x {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
        }
        let mut map = vec![usize::MAX; self.n()];
        let mut labels = Vec::new();
        for v in 0..self.n() {
            if !x.contains(&v) {
                map[v] = labels.len();
                labels.push(self.labels[v]);
            }
        }
        let merged = labels.len();
        labels.push(label);
        for &v in x {
            map[v] = merged;
        }
        let edge_list: Vec<(usize, usize, Weight)> = self
            .edges
            .iter()
            .map(|&(u, v, w)| (map[u], map[v], w))
            .collect();
        let g = WeightedGraph::with_labels(labels, &edge_list)?;
        Ok((g, merged, map))
    }

    /// Connected components, each a sorted vertex list; deterministic order
    /// by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        components_from_adj(self.n(), |v| self.adj[v].iter().map(|&(_, u)| u).collect())
    }

    /// Components of the graph with the given edge ids removed. Used by the
    /// isolating-cut machinery to localize per-terminal flow problems.
    pub fn components_avoiding(&self, removed: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        components_from_adj(self.n(), |v| {
            self.adj[v]
                .iter()
                .filter(|(id, _)| !removed.contains(id))
                .map(|&(_, u)| u)
                .collect()
        })
    }

    /// View of this graph as a rank-2 hypergraph (labels preserved).
    pub fn to_hypergraph(&self) -> WeightedHypergraph {
        let edges: Vec<(Vec<usize>, Weight)> = self
            .edges
            .iter()
            .map(|&(u, v, w)| (vec![u, v], w))
            .collect();
        WeightedHypergraph::with_labels(self.labels.clone(), &edges)
            .expect("rank-2 conversion cannot fail")
    }
}

/// Weighted hypergraph over dense vertex ids; each hyperedge is a sorted set
/// of at least two members. Duplicate member sets are merged.
#[derive(Debug, Clone)]
pub struct WeightedHypergraph {
    labels: Vec<Label>,
    edges: Vec<(Vec<usize>, Weight)>,
}

impl WeightedHypergraph {
    pub fn new(n: usize, edge_list: &[(Vec<usize>, Weight)]) -> Result<Self> {
        Self::with_labels((0..n as u64).collect(), edge_list)
    }

    pub fn with_labels(labels: Vec<Label>, edge_list: &[(Vec<usize>, Weight)]) -> Result<Self> {
        let n = labels.len();
        let mut merged: std::collections::BTreeMap<Vec<usize>, Weight> =
            std::collections::BTreeMap::new();
        for (members, w) in edge_list {
            let mut set: BTreeSet<usize> = BTreeSet::new();
            for &v in members {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                set.insert(v);
            }
            // zero-weight and rank-<2 edges vanish, consistent with contraction
            if *w == 0 || set.len() < 2 {
                continue;
            }
            let key: Vec<usize> = set.into_iter().collect();
            *merged.entry(key).or_insert(0) += w;
        }
        let edges: Vec<(Vec<usize>, Weight)> = merged.into_iter().collect();
        let total: u128 = edges.iter().map(|(_, w)| *w as u128).sum();
        if total >= WEIGHT_CAP as u128 {
            return Err(Error::WeightOverflow);
        }
        Ok(WeightedHypergraph { labels, edges })
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.connected_components().len() != 1 {
            return Err(Error::DisconnectedGraph);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Total size `p = Σ|e|`.
    pub fn total_size(&self) -> usize {
        self.edges.iter().map(|(e, _)| e.len()).sum()
    }

    pub fn edges(&self) -> &[(Vec<usize>, Weight)] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|(_, w)| *w).sum()
    }

    pub fn max_rank(&self) -> usize {
        self.edges.iter().map(|(e, _)| e.len()).max().unwrap_or(0)
    }

    /// A hyperedge counts once whenever it has members on both sides.
    pub fn cut_value(&self, side: &BTreeSet<usize>) -> Result<Weight> {
        if side.is_empty() || side.len() >= self.n() {
            return Err(Error::EmptyOrFullSide);
        }
        let mut value = 0;
        for (members, w) in &self.edges {
            let inside = members.iter().filter(|v| side.contains(v)).count();
            if inside > 0 && inside < members.len() {
                value += w;
            }
        }
        Ok(value)
    }

    pub fn cut(&self, side: BTreeSet<usize>) -> Result<Cut> {
        let value = self.cut_value(&side)?;
        let boundary = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, (members, _))| {
                let inside = members.iter().filter(|v| side.contains(v)).count();
                inside > 0 && inside < members.len()
            })
            .map(|(id, _)| id)
            .collect();
        Ok(Cut {
            side,
            value,
            boundary,
        })
    }

    /// Contracts `X` to one vertex: members inside `X` collapse to the new
    /// vertex, hyperedges that shrink below rank 2 vanish.
    pub fn contract(
        &self,
        x: &BTreeSet<usize>,
        label: Label,
    ) -> Result<(WeightedHypergraph, usize, Vec<usize>)> {
        if x.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in x {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
        }
        let mut map = vec![usize::MAX; self.n()];
        let mut labels = Vec::new();
        for v in 0..self.n() {
            if !x.contains(&v) {
                map[v] = labels.len();
                labels.push(self.labels[v]);
            }
        }
        let merged = labels.len();
        labels.push(label);
        for &v in x {
            map[v] = merged;
        }
        let edge_list: Vec<(Vec<usize>, Weight)> = self
            .edges
            .iter()
            .map(|(members, w)| (members.iter().map(|&v| map[v]).collect(), *w))
            .collect();
        let h = WeightedHypergraph::with_labels(labels, &edge_list)?;
        Ok((h, merged, map))
    }

    /// Keeps exactly the hyperedges fully contained in `X`; vertices outside
    /// `X` are removed. The result may be disconnected or empty.
    pub fn induced(&self, x: &BTreeSet<usize>) -> Result<WeightedHypergraph> {
        let mut map = vec![usize::MAX; self.n()];
        let mut labels = Vec::new();
        for &v in x {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
            }
            map[v] = labels.len();
            labels.push(self.labels[v]);
        }
        let edge_list: Vec<(Vec<usize>, Weight)> = self
            .edges
            .iter()
            .filter(|(members, _)| members.iter().all(|v| x.contains(v)))
            .map(|(members, w)| (members.iter().map(|&v| map[v]).collect(), *w))
            .collect();
        WeightedHypergraph::with_labels(labels, &edge_list)
    }

    /// Connectivity via shared hyperedge membership.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n()];
        for (members, _) in &self.edges {
            for win in members.windows(2) {
                adj[win[0]].push(win[1]);
                adj[win[1]].push(win[0]);
            }
        }
        components_from_adj(self.n(), |v| adj[v].clone())
    }

    pub fn components_avoiding(&self, removed: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n()];
        for (id, (members, _)) in self.edges.iter().enumerate() {
            if removed.contains(&id) {
                continue;
            }
            for win in members.windows(2) {
                adj[win[0]].push(win[1]);
                adj[win[1]].push(win[0]);
            }
        }
        components_from_adj(self.n(), |v| adj[v].clone())
    }

    /// Exact rank-2 graph view when every hyperedge has rank 2.
    pub fn to_graph(&self) -> Option<WeightedGraph> {
        if self.max_rank() > 2 {
            return None;
        }
        let edges: Vec<(usize, usize, Weight)> = self
            .edges
            .iter()
            .map(|(members, w)| (members[0], members[1], *w))
            .collect();
        Some(WeightedGraph::with_labels(self.labels.clone(), &edges).expect("same vertex space"))
    }
}

fn components_from_adj<F>(n: usize, neighbors: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> Vec<usize>,
{
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(v);
            for u in neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}
