//! Exact max-flow / min-cut via Dinic's blocking-flow algorithm, with
//! residual-graph extraction of the unique minimal and maximal source-side
//! mincuts, plus the hypergraph-to-bipartite flow reduction.
//!
//! Undirected edges are modeled as two opposing arcs sharing capacity. The
//! solver is deterministic, so everything downstream is reproducible.

use std::cell::Cell;
use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Cut, Weight, WeightedGraph, WeightedHypergraph};

thread_local! {
    static FLOW_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of max-flow invocations on the current thread. Used by tests and
/// the divide-and-conquer instrumentation.
pub fn flow_calls() -> u64 {
    FLOW_CALLS.with(|c| c.get())
}

fn bump_flow_calls() {
    FLOW_CALLS.with(|c| c.set(c.get() + 1));
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: Weight,
    rev: usize,
}

/// Directed flow network with residual arcs.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Two opposing arcs, each with the full capacity.
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: Weight) {
        let ru = self.adj[u].len();
        let rv = self.adj[v].len();
        self.adj[u].push(Arc { to: v, cap, rev: rv });
        self.adj[v].push(Arc { to: u, cap, rev: ru });
    }

    /// Forward arc with capacity, reverse residual arc with zero.
    pub fn add_directed(&mut self, u: usize, v: usize, cap: Weight) {
        let ru = self.adj[u].len();
        let rv = self.adj[v].len();
        self.adj[u].push(Arc { to: v, cap, rev: rv });
        self.adj[v].push(Arc { to: u, cap: 0, rev: ru });
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.nodes()];
        let mut q = VecDeque::new();
        level[s] = 0;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for a in &self.adj[v] {
                if a.cap > 0 && level[a.to] < 0 {
                    level[a.to] = level[v] + 1;
                    q.push_back(a.to);
                }
            }
        }
        if level[t] >= 0 {
            Some(level)
        } else {
            None
        }
    }

    fn dfs_augment(
        &mut self,
        v: usize,
        t: usize,
        pushed: Weight,
        level: &[i32],
        iter: &mut [usize],
    ) -> Weight {
        if v == t {
            return pushed;
        }
        while iter[v] < self.adj[v].len() {
            let i = iter[v];
            let (to, cap) = {
                let a = &self.adj[v][i];
                (a.to, a.cap)
            };
            if cap > 0 && level[to] == level[v] + 1 {
                let d = self.dfs_augment(to, t, pushed.min(cap), level, iter);
                if d > 0 {
                    let rev = self.adj[v][i].rev;
                    self.adj[v][i].cap -= d;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            iter[v] += 1;
        }
        0
    }

    /// Runs Dinic to completion; the network is left in its residual state.
    pub fn max_flow(&mut self, s: usize, t: usize) -> Weight {
        bump_flow_calls();
        let mut flow = 0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut iter = vec![0; self.nodes()];
            loop {
                let pushed = self.dfs_augment(s, t, Weight::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Nodes reachable from `s` along positive-residual arcs.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        let mut q = VecDeque::new();
        seen[s] = true;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for a in &self.adj[v] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    q.push_back(a.to);
                }
            }
        }
        seen
    }

    /// Nodes that can reach `t` along positive-residual arcs.
    pub fn residual_coreachable(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes()];
        let mut q = VecDeque::new();
        seen[t] = true;
        q.push_back(t);
        while let Some(v) = q.pop_front() {
            // arc u -> v with residual counts as an in-edge of v
            for a in &self.adj[v] {
                let back = &self.adj[a.to][a.rev];
                if back.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    q.push_back(a.to);
                }
            }
        }
        seen
    }
}

/// Completed st-max-flow over a [`WeightedGraph`], ready for side extraction.
#[derive(Debug)]
pub struct FlowResult {
    pub value: Weight,
    network: FlowNetwork,
    graph_n: usize,
    source: usize,
    sink: usize,
}

/// Exact max flow between the super-source `S` (contracted) and super-sink
/// `T` (contracted). Super nodes are attached with unsaturable sentinel arcs,
/// which is cut-equivalent to physical contraction.
pub fn max_flow(g: &WeightedGraph, sources: &BTreeSet<usize>, sinks: &BTreeSet<usize>) -> Result<FlowResult> {
    if sources.is_empty() || sinks.is_empty() || sources.intersection(sinks).next().is_some() {
        return Err(Error::OverlappingTerminals);
    }
    for &v in sources.iter().chain(sinks.iter()) {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
    }
    let inf = g.total_weight() + 1;
    let s = g.n();
    let t = g.n() + 1;
    let mut net = FlowNetwork::new(g.n() + 2);
    for &(u, v, w) in g.edges() {
        net.add_undirected(u, v, w);
    }
    for &v in sources {
        net.add_directed(s, v, inf);
    }
    for &v in sinks {
        net.add_directed(v, t, inf);
    }
    let value = net.max_flow(s, t);
    Ok(FlowResult {
        value,
        network: net,
        graph_n: g.n(),
        source: s,
        sink: t,
    })
}

impl FlowResult {
    /// The unique inclusion-minimal min-valued source side: vertices
    /// reachable from the source in the residual graph.
    pub fn minimal_source_side(&self, g: &WeightedGraph) -> Cut {
        let reach = self.network.residual_reachable(self.source);
        let side: BTreeSet<usize> = (0..self.graph_n).filter(|&v| reach[v]).collect();
        g.cut(side).expect("flow side is a proper subset")
    }

    /// The unique inclusion-maximal min-valued source side: vertices that do
    /// not reach the sink in the residual graph.
    pub fn maximal_source_side(&self, g: &WeightedGraph) -> Cut {
        let coreach = self.network.residual_coreachable(self.sink);
        let side: BTreeSet<usize> = (0..self.graph_n).filter(|&v| !coreach[v]).collect();
        g.cut(side).expect("flow side is a proper subset")
    }
}

/// Which extreme side of the mincut to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Min,
    Max,
}

/// Flow gadget for a hypergraph: every hyperedge `e` becomes a node pair
/// `(e_in, e_out)` joined by an arc of capacity `w(e)`; members connect with
/// unsaturable arcs `u -> e_in` and `e_out -> u`.
pub struct HyperFlowNetwork {
    pub network: FlowNetwork,
    pub vertex_nodes: usize,
    pub source: usize,
    pub sink: usize,
}

pub fn hyper_flow_network(h: &WeightedHypergraph) -> HyperFlowNetwork {
    let inf = h.total_weight() + 1;
    let n = h.n();
    // layout: vertices, then (e_in, e_out) per hyperedge, then s, t
    let nodes = n + 2 * h.m() + 2;
    let mut net = FlowNetwork::new(nodes);
    for (i, (members, w)) in h.edges().iter().enumerate() {
        let e_in = n + 2 * i;
        let e_out = n + 2 * i + 1;
        net.add_directed(e_in, e_out, *w);
        for &u in members {
            net.add_directed(u, e_in, inf);
            net.add_directed(e_out, u, inf);
        }
    }
    HyperFlowNetwork {
        network: net,
        vertex_nodes: n,
        source: nodes - 2,
        sink: nodes - 1,
    }
}

/// Exact relaxed mincut value between `A` and `B` plus the extreme connected
/// side. The extracted side is normalized to the connected component of
/// `(h/A)[X]` containing the contracted `A`, which enforces the connected
/// A-side constraint without changing the value.
pub fn hyper_min_cut(
    h: &WeightedHypergraph,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    side: Side,
) -> Result<Cut> {
    if a.is_empty() || b.is_empty() || a.intersection(b).next().is_some() {
        return Err(Error::OverlappingTerminals);
    }
    for &v in a.iter().chain(b.iter()) {
        if v >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
        }
    }
    let inf = h.total_weight() + 1;
    let mut gadget = hyper_flow_network(h);
    for &v in a {
        gadget.network.add_directed(gadget.source, v, inf);
    }
    for &v in b {
        gadget.network.add_directed(v, gadget.sink, inf);
    }
    let value = gadget.network.max_flow(gadget.source, gadget.sink);
    let raw: BTreeSet<usize> = match side {
        Side::Min => {
            let reach = gadget.network.residual_reachable(gadget.source);
            (0..gadget.vertex_nodes).filter(|&v| reach[v]).collect()
        }
        Side::Max => {
            let coreach = gadget.network.residual_coreachable(gadget.sink);
            (0..gadget.vertex_nodes).filter(|&v| !coreach[v]).collect()
        }
    };
    let normalized = normalize_connected_side(h, a, &raw);
    let cut = h.cut(normalized)?;
    debug_assert_eq!(cut.value, value);
    Ok(cut)
}

/// Connected component of `(h/A)[X]` containing the contracted `A`, mapped
/// back to original vertices.
pub fn normalize_connected_side(
    h: &WeightedHypergraph,
    a: &BTreeSet<usize>,
    x: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    debug_assert!(a.is_subset(x));
    let (contracted, ra, map) = h.contract(a, u64::MAX).expect("nonempty A");
    let x_img: BTreeSet<usize> = x.iter().map(|&v| map[v]).collect();
    let induced = contracted.induced(&x_img).expect("X within range");
    // induced local id i corresponds to the i-th smallest member of x_img
    let x_img_vec: Vec<usize> = x_img.iter().copied().collect();
    let ra_local = x_img_vec
        .iter()
        .position(|&c| c == ra)
        .expect("contracted vertex is in X");
    let comp = induced
        .connected_components()
        .into_iter()
        .find(|c| c.contains(&ra_local))
        .expect("component exists");
    let keep_contracted: BTreeSet<usize> = comp.iter().map(|&i| x_img_vec[i]).collect();
    let mut out: BTreeSet<usize> = a.clone();
    for &v in x {
        if keep_contracted.contains(&map[v]) {
            out.insert(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn set(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().copied().collect()
    }

    fn k4() -> WeightedGraph {
        WeightedGraph::new(
            4,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)],
        )
        .unwrap()
    }

    fn c4() -> WeightedGraph {
        // ring 0-1-2-3-0
        WeightedGraph::new(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap()
    }

    /// Brute-force oracle over all st-separating subsets.
    fn brute_st_mincuts(
        g: &WeightedGraph,
        s: &BTreeSet<usize>,
        t: &BTreeSet<usize>,
    ) -> (Weight, Vec<BTreeSet<usize>>) {
        let n = g.n();
        let mut best = Weight::MAX;
        let mut sides = Vec::new();
        for mask in 1u64..(1 << n) - 1 {
            let side: BTreeSet<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !s.is_subset(&side) || t.iter().any(|v| side.contains(v)) {
                continue;
            }
            let val = g.cut_value(&side).unwrap();
            if val < best {
                best = val;
                sides.clear();
            }
            if val == best {
                sides.push(side);
            }
        }
        (best, sides)
    }

    #[test]
    fn max_flow_on_path() {
        let g = WeightedGraph::new(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let fr = max_flow(&g, &set(&[0]), &set(&[2])).unwrap();
        assert_eq!(fr.value, 1);
        assert_eq!(fr.minimal_source_side(&g).side, set(&[0]));
        assert_eq!(fr.maximal_source_side(&g).side, set(&[0, 1]));
    }

    #[test]
    fn max_flow_k4_matches_brute_force() {
        let g = k4();
        let (best, _) = brute_st_mincuts(&g, &set(&[0]), &set(&[1]));
        assert_eq!(best, 3);
        let fr = max_flow(&g, &set(&[0]), &set(&[1])).unwrap();
        assert_eq!(fr.value, 3);
    }

    #[test]
    fn max_flow_c4_matches_brute_force() {
        let g = c4();
        let (best, _) = brute_st_mincuts(&g, &set(&[0]), &set(&[2]));
        assert_eq!(best, 2);
        let fr = max_flow(&g, &set(&[0]), &set(&[2])).unwrap();
        assert_eq!(fr.value, 2);
        assert_eq!(fr.minimal_source_side(&g).side, set(&[0]));
        assert_eq!(fr.maximal_source_side(&g).side, set(&[0, 1, 3]));
    }

    #[test]
    fn parallel_paths_minimal_side_is_source() {
        // two parallel 0-t paths through 1 and 2, unit weights
        let g = WeightedGraph::new(4, &[(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)]).unwrap();
        let (best, sides) = brute_st_mincuts(&g, &set(&[0]), &set(&[3]));
        assert_eq!(best, 2);
        let fr = max_flow(&g, &set(&[0]), &set(&[3])).unwrap();
        let min_side = fr.minimal_source_side(&g).side;
        let max_side = fr.maximal_source_side(&g).side;
        assert_eq!(min_side, set(&[0]));
        assert_eq!(max_side, set(&[0, 1, 2]));
        // every brute-force min cut is sandwiched between the extremes
        for s in sides {
            assert!(min_side.is_subset(&s));
            assert!(s.is_subset(&max_side));
        }
    }

    #[test]
    fn single_edge_extremes_coincide() {
        let g = WeightedGraph::new(2, &[(0, 1, 4)]).unwrap();
        let fr = max_flow(&g, &set(&[0]), &set(&[1])).unwrap();
        assert_eq!(fr.value, 4);
        assert_eq!(fr.minimal_source_side(&g).side, set(&[0]));
        assert_eq!(fr.maximal_source_side(&g).side, set(&[0]));
    }

    #[test]
    fn extremes_bracket_all_brute_mincuts_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(4..9);
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v, rng.gen_range(1..6)));
            }
            for _ in 0..n {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    edges.push((u, v, rng.gen_range(1..6)));
                }
            }
            let g = WeightedGraph::new(n, &edges).unwrap();
            let s = set(&[0]);
            let t = set(&[n - 1]);
            let (best, sides) = brute_st_mincuts(&g, &s, &t);
            let fr = max_flow(&g, &s, &t).unwrap();
            assert_eq!(fr.value, best);
            let min_side = fr.minimal_source_side(&g);
            let max_side = fr.maximal_source_side(&g);
            assert_eq!(min_side.value, best);
            assert_eq!(max_side.value, best);
            assert!(min_side.side.is_subset(&max_side.side));
            for side in sides {
                assert!(min_side.side.is_subset(&side));
                assert!(side.is_subset(&max_side.side));
            }
        }
    }

    #[test]
    fn rejects_overlapping_terminals() {
        let g = c4();
        assert!(max_flow(&g, &set(&[0]), &set(&[0, 2])).is_err());
        assert!(max_flow(&g, &set(&[]), &set(&[2])).is_err());
    }

    #[test]
    fn hyper_gadget_structure() {
        let h = WeightedHypergraph::new(3, &[(vec![0, 1, 2], 1)]).unwrap();
        let gadget = hyper_flow_network(&h);
        // 3 vertices + e_in/e_out + s/t placeholders
        assert_eq!(gadget.network.nodes(), 3 + 2 + 2);
    }

    #[test]
    fn hyper_rank2_bottleneck() {
        let h = WeightedHypergraph::new(2, &[(vec![0, 1], 3)]).unwrap();
        let cut = hyper_min_cut(&h, &set(&[0]), &set(&[1]), Side::Min).unwrap();
        assert_eq!(cut.value, 3);
    }

    #[test]
    fn hyper_single_edge_max_side_normalizes() {
        let h = WeightedHypergraph::new(4, &[(vec![0, 1, 2, 3], 1)]).unwrap();
        let cut = hyper_min_cut(&h, &set(&[0]), &set(&[2]), Side::Max).unwrap();
        assert_eq!(cut.value, 1);
        // without the connectivity constraint the side would be {0,1,3}
        assert_eq!(cut.side, set(&[0]));
    }

    #[test]
    fn hyper_path_max_side() {
        let h = WeightedHypergraph::new(3, &[(vec![0, 1], 1), (vec![1, 2], 1)]).unwrap();
        let cut = hyper_min_cut(&h, &set(&[0]), &set(&[2]), Side::Max).unwrap();
        assert_eq!(cut.side, set(&[0, 1]));
        assert_eq!(cut.value, 1);
    }

    /// Brute-force oracle over connected-side cuts of a hypergraph.
    fn brute_hyper_mincuts(
        h: &WeightedHypergraph,
        a: &BTreeSet<usize>,
        b: &BTreeSet<usize>,
    ) -> (Weight, Vec<BTreeSet<usize>>) {
        let n = h.n();
        let mut best = Weight::MAX;
        let mut sides = Vec::new();
        for mask in 1u64..(1 << n) - 1 {
            let side: BTreeSet<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if !a.is_subset(&side) || b.iter().any(|v| side.contains(v)) {
                continue;
            }
            let val = h.cut_value(&side).unwrap();
            if val < best {
                best = val;
                sides.clear();
            }
            if val == best {
                sides.push(side);
            }
        }
        // keep only connected sides among the minimum-valued ones
        let connected: Vec<BTreeSet<usize>> = sides
            .into_iter()
            .filter(|side| {
                let norm = normalize_connected_side(h, a, side);
                norm == *side
            })
            .collect();
        (best, connected)
    }

    #[test]
    fn hyper_min_cut_matches_brute_force_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 40 {
            let n = rng.gen_range(3..8);
            let mut edges = Vec::new();
            let m = rng.gen_range(2..6);
            for _ in 0..m {
                let rank = rng.gen_range(2..=4.min(n));
                let mut members: Vec<usize> = (0..n).collect();
                for i in (1..members.len()).rev() {
                    members.swap(i, rng.gen_range(0..=i));
                }
                members.truncate(rank);
                edges.push((members, rng.gen_range(1..4)));
            }
            let h = WeightedHypergraph::new(n, &edges).unwrap();
            if h.connected_components().len() != 1 {
                continue;
            }
            done += 1;
            let a = set(&[0]);
            let b = set(&[n - 1]);
            let (best, sides) = brute_hyper_mincuts(&h, &a, &b);
            let min_cut = hyper_min_cut(&h, &a, &b, Side::Min).unwrap();
            let max_cut = hyper_min_cut(&h, &a, &b, Side::Max).unwrap();
            assert_eq!(min_cut.value, best);
            assert_eq!(max_cut.value, best);
            // extracted sides are themselves connected-side mincuts
            assert!(sides.contains(&min_cut.side));
            assert!(sides.contains(&max_cut.side));
            // and they are the inclusion extremes
            for s in &sides {
                assert!(min_cut.side.is_subset(s));
                assert!(s.is_subset(&max_cut.side));
            }
        }
    }
}
