//! Internal trait that lets the isolating-cut machinery and the cactus
//! pipeline run unchanged on graphs and hypergraphs. Graph queries go
//! through the Dinic solver directly; hypergraph queries go through the
//! bipartite flow gadget with connected-side normalization.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::graph::{Cut, Label, Weight, WeightedGraph, WeightedHypergraph};
use crate::maxflow::{self, Side};

pub(crate) trait CutSystem: Sized + Clone {
    /// Hypercactus pipelines may return brittles from the no-split base case.
    const BRITTLE_BASE: bool;

    fn n(&self) -> usize;
    fn label(&self, v: usize) -> Label;
    fn labels(&self) -> &[Label];
    fn vertex_by_label(&self, label: Label) -> Option<usize>;
    fn is_connected(&self) -> bool;
    fn cut(&self, side: BTreeSet<usize>) -> Result<Cut>;
    fn cut_value(&self, side: &BTreeSet<usize>) -> Result<Weight>;
    /// Exact mincut value separating `a` from `b`.
    fn mincut_value(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Weight>;
    /// Unique inclusion-minimal min-valued `a`-side.
    fn min_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut>;
    /// Unique inclusion-maximal min-valued `a`-side (connected-side
    /// normalized on hypergraphs).
    fn max_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut>;
    fn contract(&self, x: &BTreeSet<usize>, label: Label) -> Result<(Self, usize, Vec<usize>)>;
    fn components_avoiding(&self, removed_edges: &BTreeSet<usize>) -> Vec<Vec<usize>>;
    /// Same structure with labels reset to vertex ids.
    fn identity_labels(&self) -> Self;
}

impl CutSystem for WeightedGraph {
    const BRITTLE_BASE: bool = false;

    fn n(&self) -> usize {
        WeightedGraph::n(self)
    }

    fn label(&self, v: usize) -> Label {
        WeightedGraph::label(self, v)
    }

    fn labels(&self) -> &[Label] {
        WeightedGraph::labels(self)
    }

    fn vertex_by_label(&self, label: Label) -> Option<usize> {
        WeightedGraph::vertex_by_label(self, label)
    }

    fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    fn cut(&self, side: BTreeSet<usize>) -> Result<Cut> {
        WeightedGraph::cut(self, side)
    }

    fn cut_value(&self, side: &BTreeSet<usize>) -> Result<Weight> {
        WeightedGraph::cut_value(self, side)
    }

    fn mincut_value(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Weight> {
        Ok(maxflow::max_flow(self, a, b)?.value)
    }

    fn min_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut> {
        let fr = maxflow::max_flow(self, a, b)?;
        Ok(fr.minimal_source_side(self))
    }

    fn max_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut> {
        let fr = maxflow::max_flow(self, a, b)?;
        Ok(fr.maximal_source_side(self))
    }

    fn contract(&self, x: &BTreeSet<usize>, label: Label) -> Result<(Self, usize, Vec<usize>)> {
        WeightedGraph::contract(self, x, label)
    }

    fn components_avoiding(&self, removed_edges: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        WeightedGraph::components_avoiding(self, removed_edges)
    }

    fn identity_labels(&self) -> Self {
        WeightedGraph::new(self.n(), self.edges()).expect("same vertex space")
    }
}

impl CutSystem for WeightedHypergraph {
    const BRITTLE_BASE: bool = true;

    fn n(&self) -> usize {
        WeightedHypergraph::n(self)
    }

    fn label(&self, v: usize) -> Label {
        WeightedHypergraph::label(self, v)
    }

    fn labels(&self) -> &[Label] {
        WeightedHypergraph::labels(self)
    }

    fn vertex_by_label(&self, label: Label) -> Option<usize> {
        WeightedHypergraph::vertex_by_label(self, label)
    }

    fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    fn cut(&self, side: BTreeSet<usize>) -> Result<Cut> {
        WeightedHypergraph::cut(self, side)
    }

    fn cut_value(&self, side: &BTreeSet<usize>) -> Result<Weight> {
        WeightedHypergraph::cut_value(self, side)
    }

    fn mincut_value(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Weight> {
        Ok(maxflow::hyper_min_cut(self, a, b, Side::Min)?.value)
    }

    fn min_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut> {
        maxflow::hyper_min_cut(self, a, b, Side::Min)
    }

    fn max_side(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Result<Cut> {
        maxflow::hyper_min_cut(self, a, b, Side::Max)
    }

    fn contract(&self, x: &BTreeSet<usize>, label: Label) -> Result<(Self, usize, Vec<usize>)> {
        WeightedHypergraph::contract(self, x, label)
    }

    fn components_avoiding(&self, removed_edges: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        WeightedHypergraph::components_avoiding(self, removed_edges)
    }

    fn identity_labels(&self) -> Self {
        WeightedHypergraph::new(self.n(), self.edges()).expect("same vertex space")
    }
}
