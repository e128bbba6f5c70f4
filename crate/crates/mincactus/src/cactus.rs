//! The cactus / hypercactus structure: nodes holding terminal sets, tree
//! edges, cycles and rank->=3 hyperedges, together with structural
//! validation, mincut enumeration, separation queries, the alpha/beta
//! statistics and the force-together contraction used by the incremental
//! maintainer.
//!
//! Edge weights are never materialized: the weight class is the edge kind
//! (cycle edges carry lambda/2, tree edges and hyperedges carry lambda), so
//! odd lambda needs no fractional arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Label, Weight};

/// A cactus representation `(H, phi)` with `lambda = lambda_G(T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cactus {
    /// Terminal labels mapped to each node; empty set = empty node.
    pub(crate) node_terminals: Vec<BTreeSet<Label>>,
    pub(crate) tree_edges: Vec<(usize, usize)>,
    /// Each cycle is a ring of at least three distinct nodes.
    pub(crate) cycles: Vec<Vec<usize>>,
    /// Members of each hyperedge, sorted, rank at least three.
    pub(crate) hyperedges: Vec<Vec<usize>>,
    pub(crate) lambda: Weight,
}

/// One minimum cut of the cactus, as a bipartition of its nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mincut {
    /// Side produced by one tree edge or a pair of edges from one cycle.
    Split(BTreeSet<usize>),
    /// Components left by removing one hyperedge; stands for all
    /// `2^{r-1} - 1` groupings without expanding them.
    HyperComponents(Vec<BTreeSet<usize>>),
}

/// Structural violation reported by [`Cactus::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotConnected,
    CycleTooShort { cycle: usize },
    RepeatedNodeInCycle { cycle: usize },
    EdgeInTwoCycles { a: usize, b: usize },
    HyperedgeRankTooSmall { hyperedge: usize },
    RepeatedMemberInHyperedge { hyperedge: usize },
    HyperedgeRemovalComponents { hyperedge: usize, expected: usize, got: usize },
    TerminalOnTwoNodes { label: Label },
    NodeOutOfRange,
    HollowThreeStar { node: usize },
    EmptyLeaf { node: usize },
    RedundantEmptyNode { node: usize },
}

/// How a node touches the structure; a cycle counts once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Incidence {
    Tree(usize),
    Cycle(usize),
    Hyper(usize),
}

impl Cactus {
    pub(crate) fn from_parts(
        node_terminals: Vec<BTreeSet<Label>>,
        tree_edges: Vec<(usize, usize)>,
        cycles: Vec<Vec<usize>>,
        hyperedges: Vec<Vec<usize>>,
        lambda: Weight,
    ) -> Cactus {
        let mut hyperedges = hyperedges;
        for h in hyperedges.iter_mut() {
            h.sort_unstable();
        }
        Cactus {
            node_terminals,
            tree_edges,
            cycles,
            hyperedges,
            lambda,
        }
    }

    /// Two nodes joined by a tree edge; the smallest useful cactus.
    pub(crate) fn edge_cactus(a: BTreeSet<Label>, b: BTreeSet<Label>, lambda: Weight) -> Cactus {
        Cactus::from_parts(vec![a, b], vec![(0, 1)], vec![], vec![], lambda)
    }

    pub fn node_count(&self) -> usize {
        self.node_terminals.len()
    }

    pub fn lambda(&self) -> Weight {
        self.lambda
    }

    pub fn terminals_at(&self, node: usize) -> &BTreeSet<Label> {
        &self.node_terminals[node]
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    /// All mapped terminal labels.
    pub fn terminals(&self) -> BTreeSet<Label> {
        self.node_terminals.iter().flatten().copied().collect()
    }

    /// phi: terminal label -> node id.
    pub fn phi(&self, label: Label) -> Option<usize> {
        self.node_terminals
            .iter()
            .position(|set| set.contains(&label))
    }

    pub(crate) fn incidences(&self, node: usize) -> Vec<Incidence> {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.tree_edges.iter().enumerate() {
            if a == node || b == node {
                out.push(Incidence::Tree(i));
            }
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            if ring.contains(&node) {
                out.push(Incidence::Cycle(c));
            }
        }
        for (h, members) in self.hyperedges.iter().enumerate() {
            if members.contains(&node) {
                out.push(Incidence::Hyper(h));
            }
        }
        out
    }

    /// Components of the structure with selected pieces removed. A ring edge
    /// `(cycle, p)` joins `ring[p]` and `ring[(p+1) % len]`.
    pub(crate) fn components_without(
        &self,
        removed_tree: &BTreeSet<usize>,
        removed_cycle_edges: &BTreeSet<(usize, usize)>,
        removed_hyper: &BTreeSet<usize>,
    ) -> Vec<BTreeSet<usize>> {
        let n = self.node_count();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &(a, b)) in self.tree_edges.iter().enumerate() {
            if !removed_tree.contains(&i) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            for p in 0..ring.len() {
                if !removed_cycle_edges.contains(&(c, p)) {
                    let a = ring[p];
                    let b = ring[(p + 1) % ring.len()];
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for (h, members) in self.hyperedges.iter().enumerate() {
            if !removed_hyper.contains(&h) {
                for w in members.windows(2) {
                    adj[w[0]].push(w[1]);
                    adj[w[1]].push(w[0]);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = BTreeSet::new();
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Checks the structural invariants and returns every violation found.
    /// Never panics; an empty list means the cactus is well formed, free of
    /// hollow 3-stars, and irredundant by the structural criteria.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.node_count();
        let in_range = |v: usize| v < n;

        for &(a, b) in &self.tree_edges {
            if !in_range(a) || !in_range(b) {
                out.push(Violation::NodeOutOfRange);
            }
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            if ring.iter().any(|&v| !in_range(v)) {
                out.push(Violation::NodeOutOfRange);
                continue;
            }
            if ring.len() < 3 {
                out.push(Violation::CycleTooShort { cycle: c });
            }
            let distinct: BTreeSet<usize> = ring.iter().copied().collect();
            if distinct.len() != ring.len() {
                out.push(Violation::RepeatedNodeInCycle { cycle: c });
            }
        }
        for (h, members) in self.hyperedges.iter().enumerate() {
            if members.iter().any(|&v| !in_range(v)) {
                out.push(Violation::NodeOutOfRange);
                continue;
            }
            if members.len() < 3 {
                out.push(Violation::HyperedgeRankTooSmall { hyperedge: h });
            }
            let distinct: BTreeSet<usize> = members.iter().copied().collect();
            if distinct.len() != members.len() {
                out.push(Violation::RepeatedMemberInHyperedge { hyperedge: h });
            }
        }
        if out.iter().any(|v| matches!(v, Violation::NodeOutOfRange)) {
            return out;
        }

        // every normal edge lies in at most one cycle
        let mut pair_seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut record_pair = |a: usize, b: usize, out: &mut Vec<Violation>| {
            let key = (a.min(b), a.max(b));
            let count = pair_seen.entry(key).or_insert(0);
            *count += 1;
            if *count == 2 {
                out.push(Violation::EdgeInTwoCycles { a: key.0, b: key.1 });
            }
        };
        for &(a, b) in &self.tree_edges {
            record_pair(a, b, &mut out);
        }
        for ring in &self.cycles {
            for p in 0..ring.len() {
                record_pair(ring[p], ring[(p + 1) % ring.len()], &mut out);
            }
        }

        if n > 0
            && self
                .components_without(&BTreeSet::new(), &BTreeSet::new(), &BTreeSet::new())
                .len()
                != 1
        {
            out.push(Violation::NotConnected);
        }

        // removing a rank-r hyperedge must leave exactly r components
        for (h, members) in self.hyperedges.iter().enumerate() {
            let removed: BTreeSet<usize> = [h].into_iter().collect();
            let comps = self.components_without(&BTreeSet::new(), &BTreeSet::new(), &removed);
            if comps.len() != members.len() {
                out.push(Violation::HyperedgeRemovalComponents {
                    hyperedge: h,
                    expected: members.len(),
                    got: comps.len(),
                });
            }
        }

        // terminal map well defined
        let mut owner: BTreeMap<Label, usize> = BTreeMap::new();
        for (node, set) in self.node_terminals.iter().enumerate() {
            for &label in set {
                if owner.insert(label, node).is_some() {
                    out.push(Violation::TerminalOnTwoNodes { label });
                }
            }
        }

        // emptiness rules: empty leaves and empty degree-2 nodes (other than
        // nodes shared by two hyperedges) are contractible, hollow 3-stars
        // are replaced by 3-cycles
        for node in 0..n {
            if !self.node_terminals[node].is_empty() {
                continue;
            }
            let inc = self.incidences(node);
            let trees = inc.iter().filter(|i| matches!(i, Incidence::Tree(_))).count();
            let hypers = inc.iter().filter(|i| matches!(i, Incidence::Hyper(_))).count();
            match inc.len() {
                0 | 1 => out.push(Violation::EmptyLeaf { node }),
                2 if hypers != 2 => out.push(Violation::RedundantEmptyNode { node }),
                3 if trees == 3 => out.push(Violation::HollowThreeStar { node }),
                _ => {}
            }
        }
        out
    }

    /// Number of distinct mincuts without expanding hyperedge groupings.
    pub fn mincut_count(&self) -> u128 {
        let mut count = self.tree_edges.len() as u128;
        for ring in &self.cycles {
            let k = ring.len() as u128;
            count += k * (k - 1) / 2;
        }
        for members in &self.hyperedges {
            count += (1u128 << (members.len() - 1)) - 1;
        }
        count
    }

    /// Every minimum cut of the cactus exactly once: one per tree edge, one
    /// per unordered pair of edges within a cycle, and one component family
    /// per hyperedge.
    pub fn enumerate_mincuts(&self) -> Vec<Mincut> {
        let mut out = Vec::new();
        let none_t = BTreeSet::new();
        let none_c = BTreeSet::new();
        let none_h = BTreeSet::new();
        for i in 0..self.tree_edges.len() {
            let removed: BTreeSet<usize> = [i].into_iter().collect();
            let comps = self.components_without(&removed, &none_c, &none_h);
            debug_assert_eq!(comps.len(), 2);
            out.push(Mincut::Split(side_not_containing_zero(comps)));
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            for p in 0..ring.len() {
                for q in p + 1..ring.len() {
                    let removed: BTreeSet<(usize, usize)> =
                        [(c, p), (c, q)].into_iter().collect();
                    let comps = self.components_without(&none_t, &removed, &none_h);
                    debug_assert_eq!(comps.len(), 2);
                    out.push(Mincut::Split(side_not_containing_zero(comps)));
                }
            }
        }
        for h in 0..self.hyperedges.len() {
            let removed: BTreeSet<usize> = [h].into_iter().collect();
            let comps = self.components_without(&none_t, &none_c, &removed);
            out.push(Mincut::HyperComponents(comps));
        }
        out
    }

    /// True iff some mincut of the cactus puts `phi(A)` strictly on one side
    /// and `phi(T \ A)` on the other.
    pub fn separates(&self, a: &BTreeSet<Label>) -> Result<bool> {
        self.separation_tester()?.separates(a)
    }

    /// Precomputed mincut masks for running many separation queries.
    pub fn separation_tester(&self) -> Result<SeparationTester> {
        if self.node_count() > 128 {
            return Err(Error::VerificationFailed(
                "separation tester supports at most 128 nodes".into(),
            ));
        }
        let mask_of =
            |set: &BTreeSet<usize>| -> u128 { set.iter().fold(0u128, |m, &v| m | (1 << v)) };
        let mut splits = Vec::new();
        let mut hyper_comps = Vec::new();
        for cut in self.enumerate_mincuts() {
            match cut {
                Mincut::Split(side) => splits.push(mask_of(&side)),
                Mincut::HyperComponents(comps) => {
                    hyper_comps.push(comps.iter().map(&mask_of).collect())
                }
            }
        }
        let mut node_of = BTreeMap::new();
        for (node, set) in self.node_terminals.iter().enumerate() {
            for &label in set {
                node_of.insert(label, node);
            }
        }
        Ok(SeparationTester {
            node_of,
            splits,
            hyper_comps,
        })
    }

    /// `alpha` = the largest hyperedge rank (2 when the structure is purely
    /// rank-2), `beta` = the number of nodes incident to exactly one
    /// structural element - exactly the nodes `v` for which `{v}` is a
    /// mincut side.
    pub fn alpha_beta(&self) -> (usize, usize) {
        let alpha = self
            .hyperedges
            .iter()
            .map(|m| m.len())
            .max()
            .unwrap_or(0)
            .max(2);
        let beta = (0..self.node_count())
            .filter(|&v| self.incidences(v).len() == 1)
            .count();
        (alpha, beta)
    }

    /// Contracts the cactus so that exactly the mincuts keeping `nodes` on
    /// one side survive: tree edges on connecting paths collapse, traversed
    /// cycles split into their two arcs re-closed through the merged node,
    /// and hyperedges entered and left lose the crossed members.
    pub fn force_together(&self, nodes: &BTreeSet<usize>) -> Result<Cactus> {
        if nodes.is_empty() {
            return Err(Error::EmptySet);
        }
        for &v in nodes {
            if v >= self.node_count() {
                return Err(Error::UnknownNode(v));
            }
        }
        let mut current = self.clone();
        let mut targets: Vec<usize> = nodes.iter().copied().collect();
        while targets.len() >= 2 {
            let a = targets[0];
            let b = targets[1];
            let (next, map) = current.force_pair(a, b);
            current = next;
            targets = targets.iter().map(|&v| map[v]).collect();
            targets.sort_unstable();
            targets.dedup();
        }
        Ok(current)
    }

    /// Merges `a` and `b`, killing every mincut that separates them.
    /// Returns the new cactus and the old-to-new node map.
    fn force_pair(&self, a: usize, b: usize) -> (Cactus, Vec<usize>) {
        if a == b {
            return (self.clone(), (0..self.node_count()).collect());
        }
        #[derive(Clone, Copy, PartialEq, Eq, Debug)]
        enum Elem {
            Tree(usize),
            Cycle(usize),
            Hyper(usize),
        }
        let n = self.node_count();
        let mut adj: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); n];
        for (i, &(u, v)) in self.tree_edges.iter().enumerate() {
            adj[u].push((v, Elem::Tree(i)));
            adj[v].push((u, Elem::Tree(i)));
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            for p in 0..ring.len() {
                let u = ring[p];
                let v = ring[(p + 1) % ring.len()];
                adj[u].push((v, Elem::Cycle(c)));
                adj[v].push((u, Elem::Cycle(c)));
            }
        }
        for (h, members) in self.hyperedges.iter().enumerate() {
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    adj[members[i]].push((members[j], Elem::Hyper(h)));
                    adj[members[j]].push((members[i], Elem::Hyper(h)));
                }
            }
        }
        let mut parent: Vec<Option<(usize, Elem)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[a] = true;
        queue.push_back(a);
        while let Some(v) = queue.pop_front() {
            if v == b {
                break;
            }
            for &(u, elem) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some((v, elem));
                    queue.push_back(u);
                }
            }
        }
        debug_assert!(seen[b], "cactus is connected");
        let mut hops: Vec<(usize, Elem, usize)> = Vec::new();
        let mut v = b;
        while let Some((prev, elem)) = parent[v] {
            hops.push((prev, elem, v));
            v = prev;
        }
        hops.reverse();

        // group consecutive hops through the same element; only each
        // segment's entry and exit merge
        let mut segments: Vec<(Elem, usize, usize)> = Vec::new();
        for (from, elem, to) in hops {
            match segments.last_mut() {
                Some((e, _, exit)) if *e == elem => *exit = to,
                _ => segments.push((elem, from, to)),
            }
        }

        let mut dsu = Dsu::new(n);
        for &(_, entry, exit) in &segments {
            dsu.union(entry, exit);
        }

        let crossed_trees: BTreeSet<usize> = segments
            .iter()
            .filter_map(|&(e, _, _)| match e {
                Elem::Tree(i) => Some(i),
                _ => None,
            })
            .collect();
        let crossed_cycles: BTreeMap<usize, (usize, usize)> = segments
            .iter()
            .filter_map(|&(e, entry, exit)| match e {
                Elem::Cycle(c) => Some((c, (entry, exit))),
                _ => None,
            })
            .collect();
        let crossed_hypers: BTreeMap<usize, (usize, usize)> = segments
            .iter()
            .filter_map(|&(e, entry, exit)| match e {
                Elem::Hyper(h) => Some((h, (entry, exit))),
                _ => None,
            })
            .collect();

        // assemble the rewritten parts in old node ids, then remap via dsu
        let mut tree_edges: Vec<(usize, usize)> = self
            .tree_edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !crossed_trees.contains(i))
            .map(|(_, &e)| e)
            .collect();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        for (c, ring) in self.cycles.iter().enumerate() {
            match crossed_cycles.get(&c) {
                None => cycles.push(ring.clone()),
                Some(&(entry, exit)) => {
                    // split the ring at entry/exit; each arc re-closes
                    // through the merged node
                    let ei = ring.iter().position(|&x| x == entry).unwrap();
                    let xi = ring.iter().position(|&x| x == exit).unwrap();
                    let len = ring.len();
                    let mut arcs: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
                    let mut p = (ei + 1) % len;
                    while p != xi {
                        arcs[0].push(ring[p]);
                        p = (p + 1) % len;
                    }
                    let mut p = (xi + 1) % len;
                    while p != ei {
                        arcs[1].push(ring[p]);
                        p = (p + 1) % len;
                    }
                    for arc in arcs {
                        match arc.len() {
                            0 => {}
                            1 => tree_edges.push((entry, arc[0])),
                            _ => {
                                let mut new_ring = vec![entry];
                                new_ring.extend(arc);
                                cycles.push(new_ring);
                            }
                        }
                    }
                }
            }
        }
        let mut hyperedges: Vec<Vec<usize>> = Vec::new();
        for (h, members) in self.hyperedges.iter().enumerate() {
            match crossed_hypers.get(&h) {
                None => hyperedges.push(members.clone()),
                Some(&(entry, exit)) => {
                    let shrunk: Vec<usize> =
                        members.iter().filter(|&&m| m != exit).copied().collect();
                    debug_assert!(shrunk.contains(&entry));
                    match shrunk.len() {
                        0 | 1 => {}
                        2 => tree_edges.push((shrunk[0], shrunk[1])),
                        _ => hyperedges.push(shrunk),
                    }
                }
            }
        }

        let interim = Cactus {
            node_terminals: self.node_terminals.clone(),
            tree_edges,
            cycles,
            hyperedges,
            lambda: self.lambda,
        };
        interim.merged_by(&mut dsu)
    }

    /// Applies a node merging, normalizing degenerate structures: rings
    /// collapse adjacent duplicates and dissolve below length 3, rank-2
    /// hyperedge remnants become tree edges, self-loops vanish.
    pub(crate) fn merged_by(&self, dsu: &mut Dsu) -> (Cactus, Vec<usize>) {
        let n = self.node_count();
        let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
        let mut map = vec![usize::MAX; n];
        for v in 0..n {
            let root = dsu.find(v);
            let next = dense.len();
            let id = *dense.entry(root).or_insert(next);
            map[v] = id;
        }
        let count = dense.len();
        let mut node_terminals: Vec<BTreeSet<Label>> = vec![BTreeSet::new(); count];
        for (v, set) in self.node_terminals.iter().enumerate() {
            node_terminals[map[v]].extend(set.iter().copied());
        }
        let mut tree_edges: Vec<(usize, usize)> = Vec::new();
        for &(u, v) in &self.tree_edges {
            let (a, b) = (map[u], map[v]);
            if a != b {
                tree_edges.push((a.min(b), a.max(b)));
            }
        }
        let mut cycles = Vec::new();
        for ring in &self.cycles {
            let mut mapped: Vec<usize> = ring.iter().map(|&v| map[v]).collect();
            // collapse adjacent duplicates, including around the wrap
            let mut changed = true;
            while changed && mapped.len() > 1 {
                changed = false;
                let mut next = Vec::with_capacity(mapped.len());
                for &x in mapped.iter() {
                    if next.last() == Some(&x) {
                        changed = true;
                    } else {
                        next.push(x);
                    }
                }
                while next.len() > 1 && next.first() == next.last() {
                    next.pop();
                    changed = true;
                }
                mapped = next;
            }
            match mapped.len() {
                0 | 1 => {}
                2 => tree_edges.push((mapped[0].min(mapped[1]), mapped[0].max(mapped[1]))),
                _ => cycles.push(mapped),
            }
        }
        let mut hyperedges = Vec::new();
        for members in &self.hyperedges {
            let mapped: BTreeSet<usize> = members.iter().map(|&v| map[v]).collect();
            let mapped: Vec<usize> = mapped.into_iter().collect();
            match mapped.len() {
                0 | 1 => {}
                2 => tree_edges.push((mapped[0], mapped[1])),
                _ => hyperedges.push(mapped),
            }
        }
        tree_edges.sort_unstable();
        tree_edges.dedup();
        (
            Cactus {
                node_terminals,
                tree_edges,
                cycles,
                hyperedges,
                lambda: self.lambda,
            },
            map,
        )
    }

    /// Replaces every hollow 3-star (an empty node whose only incidences are
    /// exactly three tree edges) by a 3-cycle on its neighbors.
    pub(crate) fn normalize_hollow_stars(&mut self) {
        loop {
            let mut target = None;
            for node in 0..self.node_count() {
                if !self.node_terminals[node].is_empty() {
                    continue;
                }
                let inc = self.incidences(node);
                if inc.len() == 3 && inc.iter().all(|i| matches!(i, Incidence::Tree(_))) {
                    target = Some(node);
                    break;
                }
            }
            let Some(center) = target else { break };
            let mut neighbors = Vec::new();
            self.tree_edges.retain(|&(a, b)| {
                if a == center {
                    neighbors.push(b);
                    false
                } else if b == center {
                    neighbors.push(a);
                    false
                } else {
                    true
                }
            });
            debug_assert_eq!(neighbors.len(), 3);
            self.cycles.push(neighbors);
            self.remove_node(center);
        }
    }

    /// Drops one node (which must have no incidences left) and renumbers.
    pub(crate) fn remove_node(&mut self, node: usize) {
        debug_assert!(self.incidences(node).is_empty());
        self.node_terminals.remove(node);
        let remap = |v: usize| if v > node { v - 1 } else { v };
        for e in self.tree_edges.iter_mut() {
            *e = (remap(e.0), remap(e.1));
        }
        for ring in self.cycles.iter_mut() {
            for v in ring.iter_mut() {
                *v = remap(*v);
            }
        }
        for members in self.hyperedges.iter_mut() {
            for v in members.iter_mut() {
                *v = remap(*v);
            }
        }
    }

    /// Semantic irredundancy per edge contraction: redundant iff contracting
    /// some normal or cycle edge preserves the separated terminal
    /// bipartitions. Hyperedge contractions always lose their groupings and
    /// are skipped.
    pub fn is_irredundant(&self) -> Result<bool> {
        let terminals: Vec<Label> = self.terminals().into_iter().collect();
        if terminals.len() > 20 {
            return Err(Error::TooManyTerminals {
                max: 20,
                got: terminals.len(),
            });
        }
        if terminals.len() < 2 {
            return Ok(true);
        }
        let base = self.separated_bipartitions(&terminals)?;
        for variant in self.edge_contractions() {
            if variant.separated_bipartitions(&terminals)? == base {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every canonical proper terminal subset the cactus separates.
    fn separated_bipartitions(&self, terminals: &[Label]) -> Result<BTreeSet<BTreeSet<Label>>> {
        let tester = self.separation_tester()?;
        let k = terminals.len();
        let mut out = BTreeSet::new();
        // canonical: subsets not containing the first terminal
        for mask in 1u64..(1 << (k - 1)) {
            let a: BTreeSet<Label> = (0..k - 1)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| terminals[i + 1])
                .collect();
            if tester.separates(&a)? {
                out.insert(a);
            }
        }
        Ok(out)
    }

    /// One contracted variant per normal or cycle edge.
    fn edge_contractions(&self) -> Vec<Cactus> {
        let mut out = Vec::new();
        for &(u, v) in &self.tree_edges {
            let mut dsu = Dsu::new(self.node_count());
            dsu.union(u, v);
            let mut without = self.clone();
            without.tree_edges.retain(|&e| e != (u, v));
            out.push(without.merged_by(&mut dsu).0);
        }
        for (c, ring) in self.cycles.iter().enumerate() {
            for p in 0..ring.len() {
                let u = ring[p];
                let v = ring[(p + 1) % ring.len()];
                let mut dsu = Dsu::new(self.node_count());
                dsu.union(u, v);
                let mut without = self.clone();
                let mut new_ring: Vec<usize> = Vec::with_capacity(ring.len() - 1);
                for (q, &x) in ring.iter().enumerate() {
                    if q != (p + 1) % ring.len() {
                        new_ring.push(x);
                    }
                }
                without.cycles[c] = new_ring;
                out.push(without.merged_by(&mut dsu).0);
            }
        }
        out
    }
}

fn side_not_containing_zero(mut comps: Vec<BTreeSet<usize>>) -> BTreeSet<usize> {
    debug_assert_eq!(comps.len(), 2);
    if comps[0].contains(&0) {
        comps.remove(1)
    } else {
        comps.remove(0)
    }
}

/// Mincut masks plus the terminal-to-node map, for bulk separation queries.
pub struct SeparationTester {
    node_of: BTreeMap<Label, usize>,
    splits: Vec<u128>,
    hyper_comps: Vec<Vec<u128>>,
}

impl SeparationTester {
    pub fn separates(&self, a: &BTreeSet<Label>) -> Result<bool> {
        let mut a_mask = 0u128;
        for label in a {
            let Some(&node) = self.node_of.get(label) else {
                return Err(Error::InvalidSubset);
            };
            a_mask |= 1 << node;
        }
        let mut rest_mask = 0u128;
        for (label, &node) in &self.node_of {
            if !a.contains(label) {
                rest_mask |= 1 << node;
            }
        }
        if a_mask == 0 || rest_mask == 0 {
            return Err(Error::InvalidSubset);
        }
        if a_mask & rest_mask != 0 {
            return Ok(false);
        }
        for &side in &self.splits {
            let a_in = a_mask & side != 0;
            let a_out = a_mask & !side != 0;
            let r_in = rest_mask & side != 0;
            let r_out = rest_mask & !side != 0;
            if (a_in && !a_out && r_out && !r_in) || (a_out && !a_in && r_in && !r_out) {
                return Ok(true);
            }
        }
        'hyper: for comps in &self.hyper_comps {
            for &comp in comps {
                if a_mask & comp != 0 && rest_mask & comp != 0 {
                    continue 'hyper;
                }
            }
            return Ok(true);
        }
        Ok(false)
    }
}

/// Plain union-find.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(vs: &[u64]) -> BTreeSet<Label> {
        vs.iter().copied().collect()
    }

    fn cycle_cactus(k: usize, lambda: Weight) -> Cactus {
        Cactus::from_parts(
            (0..k).map(|i| labels(&[i as u64])).collect(),
            vec![],
            vec![(0..k).collect()],
            vec![],
            lambda,
        )
    }

    fn star_cactus(leaves: usize, lambda: Weight) -> Cactus {
        // node 0 = empty center, nodes 1..=leaves carry one terminal each
        let mut nodes = vec![BTreeSet::new()];
        let mut edges = Vec::new();
        for i in 1..=leaves {
            nodes.push(labels(&[(i - 1) as u64]));
            edges.push((0, i));
        }
        Cactus::from_parts(nodes, edges, vec![], vec![], lambda)
    }

    fn brittle(k: usize, lambda: Weight) -> Cactus {
        Cactus::from_parts(
            (0..k).map(|i| labels(&[i as u64])).collect(),
            vec![],
            vec![],
            vec![(0..k).collect()],
            lambda,
        )
    }

    fn path3(lambda: Weight) -> Cactus {
        Cactus::from_parts(
            vec![labels(&[0]), labels(&[1]), labels(&[2])],
            vec![(0, 1), (1, 2)],
            vec![],
            vec![],
            lambda,
        )
    }

    #[test]
    fn validate_examples() {
        assert!(cycle_cactus(6, 2).validate().is_empty());
        assert!(star_cactus(4, 3).validate().is_empty());
        let two_cycle = Cactus::from_parts(
            vec![labels(&[0]), labels(&[1])],
            vec![],
            vec![vec![0, 1]],
            vec![],
            2,
        );
        assert!(two_cycle
            .validate()
            .contains(&Violation::CycleTooShort { cycle: 0 }));
    }

    #[test]
    fn validate_flags_bad_hyperedge_components() {
        // hyperedge whose members stay connected through an extra tree edge
        let c = Cactus::from_parts(
            vec![labels(&[0]), labels(&[1]), labels(&[2])],
            vec![(0, 1)],
            vec![],
            vec![vec![0, 1, 2]],
            1,
        );
        assert!(c
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::HyperedgeRemovalComponents { .. })));
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(path3(1).enumerate_mincuts().len(), 2);
        for k in 3..=7 {
            assert_eq!(cycle_cactus(k, 2).mincut_count() as usize, k * (k - 1) / 2);
            assert_eq!(
                cycle_cactus(k, 2).enumerate_mincuts().len(),
                k * (k - 1) / 2
            );
        }
        assert_eq!(brittle(4, 1).mincut_count(), 7);
    }

    #[test]
    fn separates_star() {
        let c = star_cactus(4, 3);
        assert!(c.separates(&labels(&[0])).unwrap());
        assert!(!c.separates(&labels(&[0, 1])).unwrap());
        assert!(c.separates(&labels(&[1, 2, 3])).unwrap());
    }

    #[test]
    fn separates_cycle_arcs() {
        let c = cycle_cactus(6, 2);
        assert!(c.separates(&labels(&[1, 2, 3])).unwrap());
        assert!(c.separates(&labels(&[4])).unwrap());
        assert!(!c.separates(&labels(&[0, 2])).unwrap());
    }

    #[test]
    fn separates_brittle_everything() {
        let c = brittle(5, 1);
        for mask in 1u32..(1 << 4) {
            let a: BTreeSet<Label> = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i as u64 + 1)
                .collect();
            assert!(c.separates(&a).unwrap());
        }
    }

    #[test]
    fn separates_rejects_bad_subsets() {
        let c = star_cactus(4, 3);
        assert!(c.separates(&labels(&[])).is_err());
        assert!(c.separates(&labels(&[0, 9])).is_err());
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(star_cactus(4, 3).alpha_beta(), (2, 4));
        assert_eq!(brittle(4, 1).alpha_beta(), (4, 4));
        assert_eq!(path3(1).alpha_beta(), (2, 2));
        // cycle: every node is a singleton mincut class
        assert_eq!(cycle_cactus(6, 2).alpha_beta(), (2, 6));
    }

    /// Oracle: surviving separated bipartitions after forcing = original
    /// separated bipartitions whose sides keep the forced nodes together.
    fn force_oracle(c: &Cactus, forced: &BTreeSet<usize>) {
        let after = c.force_together(forced).unwrap();
        let terminals: Vec<Label> = c.terminals().into_iter().collect();
        let forced_labels: BTreeSet<Label> = forced
            .iter()
            .flat_map(|&v| c.terminals_at(v).iter().copied())
            .collect();
        for mask in 1u64..(1 << (terminals.len() - 1)) {
            let a: BTreeSet<Label> = (0..terminals.len() - 1)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| terminals[i + 1])
                .collect();
            let crosses = forced_labels.iter().any(|l| a.contains(l))
                && forced_labels.iter().any(|l| !a.contains(l));
            let before = c.separates(&a).unwrap();
            let now = after.separates(&a).unwrap();
            let expected = before && !crosses;
            assert_eq!(now, expected, "bipartition {a:?}");
        }
    }

    #[test]
    fn force_cycle4_antipodal() {
        let c = cycle_cactus(4, 2);
        let forced = [0usize, 2].into_iter().collect();
        let after = c.force_together(&forced).unwrap();
        assert_eq!(after.mincut_count(), 2);
        force_oracle(&c, &forced);
    }

    #[test]
    fn force_single_node_is_identity() {
        let c = cycle_cactus(5, 2);
        let after = c.force_together(&[3].into_iter().collect()).unwrap();
        assert_eq!(after, c);
    }

    #[test]
    fn force_brittle_pair() {
        let c = brittle(4, 1);
        let forced: BTreeSet<usize> = [0, 1].into_iter().collect();
        let after = c.force_together(&forced).unwrap();
        assert_eq!(after.hyperedges().len(), 1);
        assert_eq!(after.hyperedges()[0].len(), 3);
        assert_eq!(after.mincut_count(), 3);
        force_oracle(&c, &forced);
    }

    #[test]
    fn force_everything_collapses() {
        let c = cycle_cactus(4, 2);
        let all: BTreeSet<usize> = (0..4).collect();
        let after = c.force_together(&all).unwrap();
        assert_eq!(after.node_count(), 1);
        assert_eq!(after.mincut_count(), 0);
    }

    #[test]
    fn force_on_mixed_structure_matches_oracle() {
        // star center 0 with leaves 1,2; cycle (0,3,4,5); brittle {0,6,7,8}
        let mut nodes: Vec<BTreeSet<Label>> = Vec::new();
        for i in 0..9u64 {
            nodes.push(labels(&[i]));
        }
        let c = Cactus::from_parts(
            nodes,
            vec![(0, 1), (0, 2)],
            vec![vec![0, 3, 4, 5]],
            vec![vec![0, 6, 7, 8]],
            2,
        );
        assert!(c.validate().is_empty());
        for forced in [
            vec![1, 2],
            vec![1, 4],
            vec![3, 5],
            vec![6, 7],
            vec![1, 6],
            vec![4, 7],
            vec![2, 3, 6],
        ] {
            force_oracle(&c, &forced.into_iter().collect());
        }
    }

    #[test]
    fn irredundancy_examples() {
        assert!(cycle_cactus(5, 2).is_irredundant().unwrap());
        assert!(star_cactus(4, 3).is_irredundant().unwrap());
        assert!(brittle(4, 1).is_irredundant().unwrap());
        // path with an empty middle node: both edges give the same
        // bipartition, so contraction preserves everything
        let redundant = Cactus::from_parts(
            vec![labels(&[0]), BTreeSet::new(), labels(&[1])],
            vec![(0, 1), (1, 2)],
            vec![],
            vec![],
            1,
        );
        assert!(!redundant.is_irredundant().unwrap());
    }

    #[test]
    fn hollow_star_normalization() {
        let mut c = star_cactus(3, 2);
        assert!(c
            .validate()
            .contains(&Violation::HollowThreeStar { node: 0 }));
        c.normalize_hollow_stars();
        assert!(c.validate().is_empty());
        assert_eq!(c.node_count(), 3);
        assert_eq!(c.cycles().len(), 1);
        for i in 0..3u64 {
            assert!(c.separates(&labels(&[i])).unwrap());
        }
    }
}
