//! The Steiner cactus pipeline: good split collections from sampled maximal
//! isolating mincuts, induced decompositions along disjoint splits, the
//! divide-and-conquer recursion, and the anchor-based merge procedures.
//!
//! The same engine drives the hypergraph pipeline (see `hyper`); the only
//! differences are the flow backend picked by the `CutSystem` impl and the
//! star-or-brittle base case.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cactus::{Cactus, Incidence};
use crate::config::{derive_seed, Config};
use crate::error::{Error, Result};
use crate::graph::{Label, Weight, WeightedGraph};
use crate::isolating::{
    connectivity_partition_generic, maximal_isolating_generic, minimal_isolating_generic,
    steiner_mincut_value_generic, LambdaMode,
};
use crate::maxflow::flow_calls;
use crate::system::CutSystem;

/// An ordered list of disjoint T-splits, or one balanced split.
#[derive(Debug, Clone)]
pub struct SplitCollection {
    /// Vertex sets, pairwise disjoint.
    pub splits: Vec<BTreeSet<usize>>,
    /// True when the collection is a single balanced split.
    pub balanced: bool,
}

/// Execution metadata gathered by the pipeline, used by the acceptance
/// suite: recursion depth, per-depth max-flow counts, and the terminal side
/// of every split used.
#[derive(Debug, Clone, Default)]
pub struct PipelineStats {
    pub max_depth: usize,
    pub flows_by_depth: Vec<u64>,
    /// For every split used anywhere in the recursion: the terminal labels
    /// (of the preprocessed root problem) on the split side.
    pub split_trace: Vec<BTreeSet<Label>>,
}

impl PipelineStats {
    fn count_flows(&mut self, depth: usize, delta: u64) {
        if self.flows_by_depth.len() <= depth {
            self.flows_by_depth.resize(depth + 1, 0);
        }
        self.flows_by_depth[depth] += delta;
        self.max_depth = self.max_depth.max(depth);
    }
}

pub(crate) struct Ctx {
    pub cfg: Config,
    pub lambda: Weight,
    next_anchor: Label,
    /// Per-subproblem sampling seed, re-derived for every child.
    seed: u64,
    depth: usize,
    pub stats: PipelineStats,
    /// Anchor label -> a real terminal label inside the split it stands for.
    anchor_rep: BTreeMap<Label, Label>,
}

impl Ctx {
    pub(crate) fn new(cfg: Config, lambda: Weight, first_anchor: Label) -> Ctx {
        let seed = derive_seed(cfg.seed, 0x9c7, 0);
        Ctx {
            cfg,
            lambda,
            next_anchor: first_anchor,
            seed,
            depth: 0,
            stats: PipelineStats::default(),
            anchor_rep: BTreeMap::new(),
        }
    }

    fn fresh_anchor(&mut self, rep: Label) -> Label {
        let label = self.next_anchor;
        self.next_anchor += 1;
        self.anchor_rep.insert(label, rep);
        label
    }

    /// Resolves a terminal label to a real terminal label of the root
    /// problem (anchors resolve through their recorded representative).
    fn resolve_rep(&self, label: Label) -> Label {
        let mut cur = label;
        while let Some(&next) = self.anchor_rep.get(&cur) {
            cur = next;
        }
        cur
    }
}

// ---------------------------------------------------------------------------
// good split collection (sampling + filtering)
// ---------------------------------------------------------------------------

pub(crate) fn good_split_collection_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    ctx: &mut Ctx,
) -> Result<SplitCollection> {
    let tset: BTreeSet<usize> = terminals.iter().copied().collect();
    let k = tset.len();
    let lambda = ctx.lambda;
    let max_rate = (usize::BITS - (k - 1).leading_zeros()) as usize;
    let rounds = ctx.cfg.repetitions(sys.n());

    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut candidates: Vec<BTreeSet<usize>> = Vec::new();
    for round in 0..rounds {
        for rate in 1..=max_rate {
            let seed = derive_seed(ctx.seed, round as u64, rate as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = 0.5f64.powi(rate as i32);
            let sample: Vec<usize> = terminals.iter().copied().filter(|_| rng.gen_bool(p)).collect();
            if sample.len() < 2 {
                continue;
            }
            let cuts = maximal_isolating_generic(sys, &sample)?;
            for cut in cuts.values() {
                if cut.value != lambda {
                    continue;
                }
                let inside = cut.side.intersection(&tset).count();
                // keep only T-splits: at least two terminals on both sides
                if inside < 2 || k - inside < 2 {
                    continue;
                }
                if seen.insert(cut.side.clone()) {
                    candidates.push(cut.side.clone());
                }
            }
        }
    }

    // a single balanced split suffices
    let mut balanced: Vec<&BTreeSet<usize>> = candidates
        .iter()
        .filter(|side| {
            let inside = side.intersection(&tset).count();
            4 * inside >= k && 4 * (k - inside) >= k
        })
        .collect();
    if !balanced.is_empty() {
        balanced.sort_by_key(|side| (side.len(), (*side).clone()));
        let chosen = balanced[0].clone();
        if ctx.cfg.defensive_verify {
            verify_split(sys, &chosen, &tset, lambda)?;
        }
        return Ok(SplitCollection {
            splits: vec![chosen],
            balanced: true,
        });
    }

    // keep only small T-splits
    let small: Vec<BTreeSet<usize>> = candidates
        .into_iter()
        .filter(|side| {
            let inside = side.intersection(&tset).count();
            inside >= 2 && 4 * inside <= k
        })
        .collect();

    // per-terminal largest-container selection, ties to the lower index
    let mut selected: Vec<usize> = Vec::new();
    for &t in &tset {
        let mut best: Option<usize> = None;
        for (i, side) in small.iter().enumerate() {
            if side.contains(&t) {
                best = match best {
                    None => Some(i),
                    Some(j) if side.len() > small[j].len() => Some(i),
                    keep => keep,
                };
            }
        }
        if let Some(i) = best {
            if !selected.contains(&i) {
                selected.push(i);
            }
        }
    }
    selected.sort_unstable();

    // enforce disjointness in index order
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut splits: Vec<BTreeSet<usize>> = Vec::new();
    for i in selected {
        let pruned: BTreeSet<usize> = small[i].difference(&taken).copied().collect();
        let inside = pruned.intersection(&tset).count();
        if inside < 2 || k - inside < 2 || pruned.is_empty() {
            if ctx.cfg.defensive_verify {
                return Err(Error::VerificationFailed(
                    "pruned split lost its terminals".into(),
                ));
            }
            continue;
        }
        if ctx.cfg.defensive_verify {
            verify_split(sys, &pruned, &tset, lambda)?;
        }
        taken.extend(pruned.iter().copied());
        splits.push(pruned);
    }
    Ok(SplitCollection {
        splits,
        balanced: false,
    })
}

fn verify_split<S: CutSystem>(
    sys: &S,
    side: &BTreeSet<usize>,
    tset: &BTreeSet<usize>,
    lambda: Weight,
) -> Result<()> {
    let value = sys.cut_value(side)?;
    if value != lambda {
        return Err(Error::VerificationFailed(format!(
            "split value {value} != lambda {lambda}"
        )));
    }
    let inside = side.intersection(tset).count();
    if inside < 2 || tset.len() - inside < 2 {
        return Err(Error::VerificationFailed(
            "split is not a T-split".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// induced decomposition
// ---------------------------------------------------------------------------

pub(crate) struct SubUnit<S> {
    pub sys: S,
    /// Local vertex ids of the terminals.
    pub terminals: Vec<usize>,
    /// Expansion of each terminal label to root terminal labels.
    pub expand: BTreeMap<Label, BTreeSet<Label>>,
}

pub(crate) struct Decomposition<S> {
    /// One subproblem per split, then the remainder holding every anchor.
    pub subs: Vec<SubUnit<S>>,
    /// Anchor labels in split order.
    pub anchors: Vec<Label>,
}

/// Builds the k+1 subproblems induced by disjoint splits: each split side
/// with the outside contracted to a fresh anchor, plus the remainder with
/// every split contracted to its anchor.
pub(crate) fn induced_decomposition_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    splits: &[BTreeSet<usize>],
    expand: &BTreeMap<Label, BTreeSet<Label>>,
    ctx: &mut Ctx,
) -> Result<Decomposition<S>> {
    let tset: BTreeSet<usize> = terminals.iter().copied().collect();
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for side in splits {
        if side.intersection(&union).next().is_some() {
            return Err(Error::OverlappingSplits);
        }
        union.extend(side.iter().copied());
    }
    let root_all: BTreeSet<Label> = tset
        .iter()
        .flat_map(|t| expand[&sys.label(*t)].iter().copied())
        .collect();

    let mut anchors = Vec::new();
    let mut subs = Vec::new();
    for side in splits {
        let side_terms: Vec<usize> = tset.intersection(side).copied().collect();
        let rep = ctx.resolve_rep(sys.label(side_terms[0]));
        let anchor = ctx.fresh_anchor(rep);
        anchors.push(anchor);

        let side_roots: BTreeSet<Label> = side_terms
            .iter()
            .flat_map(|t| expand[&sys.label(*t)].iter().copied())
            .collect();
        ctx.stats.split_trace.push(side_roots.clone());

        let outside: BTreeSet<usize> = (0..sys.n()).filter(|v| !side.contains(v)).collect();
        let (sub, pivot, map) = sys.contract(&outside, anchor)?;
        let mut sub_terminals: Vec<usize> = side_terms.iter().map(|&t| map[t]).collect();
        sub_terminals.push(pivot);
        sub_terminals.sort_unstable();
        let mut sub_expand = BTreeMap::new();
        for &t in &side_terms {
            let l = sys.label(t);
            sub_expand.insert(l, expand[&l].clone());
        }
        let anchor_roots: BTreeSet<Label> =
            root_all.difference(&side_roots).copied().collect();
        sub_expand.insert(anchor, anchor_roots);
        subs.push(SubUnit {
            sys: sub,
            terminals: sub_terminals,
            expand: sub_expand,
        });
    }

    // remainder: contract every split to its anchor
    let mut cur = sys.clone();
    let mut cur_map: Vec<usize> = (0..sys.n()).collect();
    let mut anchor_vertices: Vec<usize> = Vec::new();
    for (side, &anchor) in splits.iter().zip(&anchors) {
        let image: BTreeSet<usize> = side.iter().map(|&v| cur_map[v]).collect();
        let (next, merged, map) = cur.contract(&image, anchor)?;
        cur = next;
        for slot in cur_map.iter_mut() {
            *slot = map[*slot];
        }
        anchor_vertices = anchor_vertices.into_iter().map(|v| map[v]).collect();
        anchor_vertices.push(merged);
    }
    let mut rem_terminals: Vec<usize> = tset
        .iter()
        .filter(|t| !union.contains(t))
        .map(|&t| cur_map[t])
        .collect();
    rem_terminals.extend(anchor_vertices.iter().copied());
    rem_terminals.sort_unstable();
    rem_terminals.dedup();
    let mut rem_expand = BTreeMap::new();
    for &t in tset.iter().filter(|t| !union.contains(t)) {
        let l = sys.label(t);
        rem_expand.insert(l, expand[&l].clone());
    }
    for (side, &anchor) in splits.iter().zip(&anchors) {
        let side_roots: BTreeSet<Label> = tset
            .intersection(side)
            .flat_map(|t| expand[&sys.label(*t)].iter().copied())
            .collect();
        rem_expand.insert(anchor, side_roots);
    }
    subs.push(SubUnit {
        sys: cur,
        terminals: rem_terminals,
        expand: rem_expand,
    });
    Ok(Decomposition { subs, anchors })
}

// ---------------------------------------------------------------------------
// base cases
// ---------------------------------------------------------------------------

/// Cactus for 2 or 3 terminals from exhaustive bipartition mincuts.
pub(crate) fn trivial_cactus_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    lambda: Weight,
) -> Result<Cactus> {
    let ts: Vec<usize> = {
        let mut v: Vec<usize> = terminals.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    match ts.len() {
        2 => {
            let a = [sys.label(ts[0])].into_iter().collect();
            let b = [sys.label(ts[1])].into_iter().collect();
            Ok(Cactus::edge_cactus(a, b, lambda))
        }
        3 => {
            let mut values = [0; 3];
            for (i, &t) in ts.iter().enumerate() {
                let a: BTreeSet<usize> = [t].into_iter().collect();
                let b: BTreeSet<usize> = ts.iter().filter(|&&x| x != t).copied().collect();
                values[i] = sys.mincut_value(&a, &b)?;
            }
            let min = *values.iter().min().unwrap();
            if min != lambda {
                return Err(Error::VerificationFailed(format!(
                    "trivial base case found lambda {min}, expected {lambda}"
                )));
            }
            let tight: Vec<usize> = (0..3).filter(|&i| values[i] == lambda).collect();
            let lab =
                |i: usize| -> BTreeSet<Label> { [sys.label(ts[i])].into_iter().collect() };
            let cactus = match tight.len() {
                3 => Cactus::from_parts(
                    vec![lab(0), lab(1), lab(2)],
                    vec![],
                    vec![vec![0, 1, 2]],
                    vec![],
                    lambda,
                ),
                2 => {
                    // tight terminals are the path endpoints
                    let mid = (0..3).find(|i| !tight.contains(i)).unwrap();
                    Cactus::from_parts(
                        vec![lab(tight[0]), lab(mid), lab(tight[1])],
                        vec![(0, 1), (1, 2)],
                        vec![],
                        vec![],
                        lambda,
                    )
                }
                _ => {
                    // only one terminal is separable: the other two share a node
                    let t = tight[0];
                    let rest: BTreeSet<Label> = (0..3)
                        .filter(|&i| i != t)
                        .map(|i| sys.label(ts[i]))
                        .collect();
                    Cactus::edge_cactus(lab(t).into_iter().collect(), rest, lambda)
                }
            };
            Ok(cactus)
        }
        got => Err(Error::WrongSize { got }),
    }
}

/// Star cactus for the no-split case: leaves are the terminals whose
/// isolating mincut value equals lambda; the at-most-one remaining terminal
/// maps to the center. With `allow_brittle`, a single 2-vs-rest flow first
/// distinguishes the brittle case.
pub(crate) fn star_cactus_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    ctx: &Ctx,
    allow_brittle: bool,
) -> Result<Cactus> {
    let ts: Vec<usize> = terminals.to_vec();
    let lambda = ctx.lambda;
    if allow_brittle {
        let mut by_label = ts.clone();
        by_label.sort_by_key(|&v| sys.label(v));
        let a: BTreeSet<usize> = by_label[..2].iter().copied().collect();
        let b: BTreeSet<usize> = by_label[2..].iter().copied().collect();
        let value = sys.mincut_value(&a, &b)?;
        if value == lambda {
            let nodes: Vec<BTreeSet<Label>> = ts
                .iter()
                .map(|&t| [sys.label(t)].into_iter().collect())
                .collect();
            let all: Vec<usize> = (0..nodes.len()).collect();
            return Ok(Cactus::from_parts(nodes, vec![], vec![], vec![all], lambda));
        }
    }
    let iso = minimal_isolating_generic(sys, &ts)?;
    let mut leaves = Vec::new();
    let mut center_terms: BTreeSet<Label> = BTreeSet::new();
    for &t in &ts {
        if iso[&t].value == lambda {
            leaves.push(sys.label(t));
        } else {
            center_terms.insert(sys.label(t));
        }
    }
    if center_terms.len() > 1 || leaves.len() < 2 {
        // a T-split must exist, contradicting the no-split precondition
        return Err(Error::SplitExists);
    }
    let mut nodes = vec![center_terms];
    let mut edges = Vec::new();
    for (i, &leaf) in leaves.iter().enumerate() {
        nodes.push([leaf].into_iter().collect());
        edges.push((0, i + 1));
    }
    Ok(Cactus::from_parts(nodes, edges, vec![], vec![], lambda))
}

// ---------------------------------------------------------------------------
// merge procedures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AnchorKind {
    Leaf,
    Cycle(usize),
    Hyper(usize),
}

fn classify_anchor(c: &Cactus, node: usize) -> Result<AnchorKind> {
    let inc = c.incidences(node);
    match inc.as_slice() {
        [Incidence::Tree(_)] => Ok(AnchorKind::Leaf),
        [Incidence::Cycle(cy)] => Ok(AnchorKind::Cycle(*cy)),
        [Incidence::Hyper(h)] => Ok(AnchorKind::Hyper(*h)),
        _ => {
            eprintln!("DBG classify: node {node} incidences {:?} cactus {c:?}", inc);
            Err(Error::AnchorNotLeaflike)
        }
    }
}

/// Minimum-label terminal in the petal of `node`: its component after
/// removing all ring edges of `cycle`.
fn petal_terminal(c: &Cactus, cycle: usize, node: usize) -> Result<Label> {
    let ring_edges: BTreeSet<(usize, usize)> =
        (0..c.cycles()[cycle].len()).map(|p| (cycle, p)).collect();
    let comps = c.components_without(&BTreeSet::new(), &ring_edges, &BTreeSet::new());
    let comp = comps
        .into_iter()
        .find(|comp| comp.contains(&node))
        .expect("node exists");
    comp.iter()
        .flat_map(|&v| c.terminals_at(v).iter().copied())
        .min()
        .ok_or(Error::AnchorNotLeaflike)
}

/// Joins two sub-cactuses at a shared anchor terminal. The anchor node must
/// be a leaf, a degree-2 cycle member, or a hyperedge member of degree 1 in
/// both; the cycle-cycle case is disambiguated by two mincut value tests on
/// the parent graph.
pub(crate) fn merge_pair_generic<S: CutSystem>(
    acc: &Cactus,
    other: &Cactus,
    anchor: Label,
    sys: &S,
    ctx: &mut Ctx,
) -> Result<Cactus> {
    let lambda = ctx.lambda;
    let na = acc.phi(anchor).ok_or(Error::UnknownNode(usize::MAX))?;
    let nb = other.phi(anchor).ok_or(Error::UnknownNode(usize::MAX))?;
    if acc.terminals_at(na).len() != 1 || other.terminals_at(nb).len() != 1 {
        eprintln!("DBG anchor node not singleton: acc={:?} other={:?} anchor={anchor}", acc.terminals_at(na), other.terminals_at(nb));
        return Err(Error::AnchorNotLeaflike);
    }
    let kind_a = classify_anchor(acc, na)?;
    let kind_b = classify_anchor(other, nb)?;

    // combined node space: acc nodes, then other nodes shifted
    let offset = acc.node_count();
    let mut nodes: Vec<BTreeSet<Label>> = acc.node_terminals.clone();
    nodes.extend(other.node_terminals.iter().cloned());
    let mut tree_edges = acc.tree_edges.clone();
    tree_edges.extend(other.tree_edges.iter().map(|&(u, v)| (u + offset, v + offset)));
    let mut cycles = acc.cycles.clone();
    cycles.extend(other.cycles.iter().map(|ring| {
        ring.iter().map(|&v| v + offset).collect::<Vec<usize>>()
    }));
    let mut hyperedges = acc.hyperedges.clone();
    hyperedges.extend(
        other
            .hyperedges
            .iter()
            .map(|m| m.iter().map(|&v| v + offset).collect::<Vec<usize>>()),
    );
    let nb = nb + offset;
    let kind_b = match kind_b {
        AnchorKind::Cycle(cy) => AnchorKind::Cycle(cy + acc.cycles.len()),
        AnchorKind::Hyper(h) => AnchorKind::Hyper(h + acc.hyperedges.len()),
        AnchorKind::Leaf => AnchorKind::Leaf,
    };
    nodes[na].clear();
    nodes[nb].clear();

    let neighbor_of_leaf = |edges: &[(usize, usize)], node: usize| -> usize {
        edges
            .iter()
            .find_map(|&(u, v)| {
                if u == node {
                    Some(v)
                } else if v == node {
                    Some(u)
                } else {
                    None
                }
            })
            .expect("leaf anchor has its tree edge")
    };
    // ring as a path from one anchor neighbor to the other, anchor removed
    let ring_path = |cycles: &[Vec<usize>], cy: usize, node: usize| -> Vec<usize> {
        let ring = &cycles[cy];
        let p = ring.iter().position(|&x| x == node).expect("anchor in ring");
        let len = ring.len();
        (1..len).map(|i| ring[(p + i) % len]).collect()
    };

    let mut drop_nodes: Vec<usize> = Vec::new();
    match (kind_a, kind_b) {
        (AnchorKind::Leaf, AnchorKind::Leaf) => {
            let x = neighbor_of_leaf(&tree_edges, na);
            let y = neighbor_of_leaf(&tree_edges, nb);
            tree_edges.retain(|&(u, v)| u != na && v != na && u != nb && v != nb);
            tree_edges.push((x, y));
            drop_nodes.extend([na, nb]);
        }
        (AnchorKind::Leaf, AnchorKind::Cycle(cy)) | (AnchorKind::Cycle(cy), AnchorKind::Leaf) => {
            let (leaf_node, cyc_node) = if matches!(kind_a, AnchorKind::Leaf) {
                (na, nb)
            } else {
                (nb, na)
            };
            let x = neighbor_of_leaf(&tree_edges, leaf_node);
            tree_edges.retain(|&(u, v)| u != leaf_node && v != leaf_node);
            for slot in cycles[cy].iter_mut() {
                if *slot == cyc_node {
                    *slot = x;
                }
            }
            drop_nodes.extend([leaf_node, cyc_node]);
        }
        (AnchorKind::Cycle(cy1), AnchorKind::Cycle(cy2)) => {
            let path_a = ring_path(&cycles, cy1, na); // x1 .. y1
            let path_b = ring_path(&cycles, cy2, nb); // x2 .. y2
            let (x1, y1) = (path_a[0], *path_a.last().unwrap());
            let (x2, y2) = (path_b[0], *path_b.last().unwrap());
            let rep = |node: usize, cy: usize| -> Result<BTreeSet<usize>> {
                let label = petal_terminal(
                    &Cactus::from_parts(
                        nodes.clone(),
                        tree_edges.clone(),
                        cycles.clone(),
                        hyperedges.clone(),
                        lambda,
                    ),
                    cy,
                    node,
                )?;
                let root = ctx.resolve_rep(label);
                let v = sys
                    .vertex_by_label(root)
                    .ok_or(Error::AnchorNotLeaflike)?;
                Ok([v].into_iter().collect())
            };
            let vx1 = rep(x1, cy1)?;
            let vy1 = rep(y1, cy1)?;
            let vx2 = rep(x2, cy2)?;
            let vy2 = rep(y2, cy2)?;
            let before = flow_calls();
            let join_xx: BTreeSet<usize> = vx1.union(&vx2).copied().collect();
            let join_yy: BTreeSet<usize> = vy1.union(&vy2).copied().collect();
            let test_xx = sys.mincut_value(&join_xx, &join_yy)?;
            let join_xy: BTreeSet<usize> = vx1.union(&vy2).copied().collect();
            let join_yx: BTreeSet<usize> = vy1.union(&vx2).copied().collect();
            let test_xy = sys.mincut_value(&join_xy, &join_yx)?;
            ctx.stats.count_flows(ctx.depth, flow_calls() - before);
            if test_xx == lambda && test_xy == lambda {
                return Err(Error::VerificationFailed(
                    "both cycle concatenations claim lambda".into(),
                ));
            }
            let keep = |cycles: &mut Vec<Vec<usize>>, drop1: usize, drop2: usize| {
                let mut i = 0;
                cycles.retain(|_| {
                    let keep = i != drop1 && i != drop2;
                    i += 1;
                    keep
                });
            };
            if test_xx == lambda {
                // one bigger cycle closed by (x1,x2) and (y1,y2)
                let mut ring = path_a.clone();
                ring.extend(path_b.iter().rev());
                keep(&mut cycles, cy1.min(cy2), cy1.max(cy2));
                cycles.push(ring);
                drop_nodes.extend([na, nb]);
            } else if test_xy == lambda {
                // closed by (x1,y2) and (y1,x2)
                let mut ring = path_a.clone();
                ring.extend(path_b.iter());
                keep(&mut cycles, cy1.min(cy2), cy1.max(cy2));
                cycles.push(ring);
                drop_nodes.extend([na, nb]);
            } else {
                // separate cycles joined through one shared empty node
                for slot in cycles[cy2].iter_mut() {
                    if *slot == nb {
                        *slot = na;
                    }
                }
                drop_nodes.push(nb);
            }
        }
        (AnchorKind::Leaf, AnchorKind::Hyper(h)) | (AnchorKind::Hyper(h), AnchorKind::Leaf) => {
            let (leaf_node, hyper_node) = if matches!(kind_a, AnchorKind::Leaf) {
                (na, nb)
            } else {
                (nb, na)
            };
            let x = neighbor_of_leaf(&tree_edges, leaf_node);
            tree_edges.retain(|&(u, v)| u != leaf_node && v != leaf_node);
            for slot in hyperedges[h].iter_mut() {
                if *slot == hyper_node {
                    *slot = x;
                }
            }
            drop_nodes.extend([leaf_node, hyper_node]);
        }
        (AnchorKind::Cycle(_), AnchorKind::Hyper(h)) => {
            for slot in hyperedges[h].iter_mut() {
                if *slot == nb {
                    *slot = na;
                }
            }
            drop_nodes.push(nb);
        }
        (AnchorKind::Hyper(_), AnchorKind::Cycle(cy)) => {
            for slot in cycles[cy].iter_mut() {
                if *slot == nb {
                    *slot = na;
                }
            }
            drop_nodes.push(nb);
        }
        (AnchorKind::Hyper(_), AnchorKind::Hyper(h2)) => {
            for slot in hyperedges[h2].iter_mut() {
                if *slot == nb {
                    *slot = na;
                }
            }
            drop_nodes.push(nb);
        }
    }

    let mut merged = Cactus::from_parts(nodes, tree_edges, cycles, hyperedges, lambda);
    drop_nodes.sort_unstable();
    for &node in drop_nodes.iter().rev() {
        merged.remove_node(node);
    }
    merged.normalize_hollow_stars();
    Ok(merged)
}

// ---------------------------------------------------------------------------
// the divide-and-conquer framework
// ---------------------------------------------------------------------------

pub(crate) fn build_cactus_rec<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    expand: &BTreeMap<Label, BTreeSet<Label>>,
    ctx: &mut Ctx,
) -> Result<Cactus> {
    ctx.stats.count_flows(ctx.depth, 0);
    if terminals.len() <= 3 {
        let before = flow_calls();
        let c = trivial_cactus_generic(sys, terminals, ctx.lambda)?;
        ctx.stats.count_flows(ctx.depth, flow_calls() - before);
        return Ok(c);
    }

    let before = flow_calls();
    let collection = good_split_collection_generic(sys, terminals, ctx)?;
    ctx.stats.count_flows(ctx.depth, flow_calls() - before);

    if collection.splits.is_empty() {
        let before = flow_calls();
        let c = star_cactus_generic(sys, terminals, ctx, S::BRITTLE_BASE)?;
        ctx.stats.count_flows(ctx.depth, flow_calls() - before);
        return Ok(c);
    }

    let decomposition =
        induced_decomposition_generic(sys, terminals, &collection.splits, expand, ctx)?;

    let parent_seed = ctx.seed;
    let mut sub_cactuses = Vec::new();
    for (i, unit) in decomposition.subs.iter().enumerate() {
        ctx.seed = derive_seed(parent_seed, 0xc41d, i as u64);
        ctx.depth += 1;
        let sub = build_cactus_rec(&unit.sys, &unit.terminals, &unit.expand, ctx)?;
        ctx.depth -= 1;
        sub_cactuses.push(sub);
    }
    ctx.seed = parent_seed;

    // the remainder (or the complement side, for a balanced split) accretes
    // each split cactus at its anchor
    let mut acc = sub_cactuses.pop().unwrap();
    for (cactus, &anchor) in sub_cactuses.iter().zip(&decomposition.anchors) {
        acc = merge_pair_generic(&acc, cactus, anchor, sys, ctx)?;
    }
    Ok(acc)
}

/// Shared preprocessing + recursion entry: computes lambda, contracts the
/// lambda-connectivity classes onto representative terminals, runs the
/// divide and conquer, and re-expands the terminal map.
pub(crate) fn compute_pipeline<S: CutSystem>(
    sys_in: &S,
    terminals: &[usize],
    cfg: &Config,
) -> Result<(Cactus, PipelineStats)> {
    if !sys_in.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let mut ts: Vec<usize> = terminals.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::TooFewTerminals {
            need: 2,
            got: ts.len(),
        });
    }
    for &t in &ts {
        if t >= sys_in.n() {
            return Err(Error::VertexOutOfRange {
                vertex: t,
                n: sys_in.n(),
            });
        }
    }
    let sys = sys_in.identity_labels();
    let lambda = steiner_mincut_value_generic(&sys, &ts, LambdaMode::Exact, cfg)?;
    let parts = connectivity_partition_generic(&sys, &ts, lambda, cfg)?;

    // contract each class to its minimum-id terminal so that every
    // remaining terminal pair is separated by some lambda mincut
    let mut cur = sys.clone();
    let mut map: Vec<usize> = (0..sys.n()).collect();
    let mut part_of: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for part in &parts {
        let rep = part[0] as Label;
        part_of.insert(rep, part.iter().map(|&t| t as Label).collect());
        if part.len() < 2 {
            continue;
        }
        let image: BTreeSet<usize> = part.iter().map(|&t| map[t]).collect();
        let (next, _, m) = cur.contract(&image, rep)?;
        cur = next;
        for slot in map.iter_mut() {
            *slot = m[*slot];
        }
    }
    let reps: Vec<usize> = parts.iter().map(|p| map[p[0]]).collect();
    let expand: BTreeMap<Label, BTreeSet<Label>> = parts
        .iter()
        .map(|p| (p[0] as Label, [p[0] as Label].into_iter().collect()))
        .collect();

    let mut ctx = Ctx::new(cfg.clone(), lambda, sys.n() as Label);
    let mut cactus = build_cactus_rec(&cur, &reps, &expand, &mut ctx)?;

    // re-expand phi: every class member joins its representative's node
    for node in cactus.node_terminals.iter_mut() {
        let labels: Vec<Label> = node.iter().copied().collect();
        for rep in labels {
            if let Some(full) = part_of.get(&rep) {
                node.extend(full.iter().copied());
            }
        }
    }
    Ok((cactus, ctx.stats))
}

/// Computes a T-Steiner cactus of a connected weighted graph: a cactus
/// `(H, phi)` such that an A-mincut of T has value lambda exactly when some
/// mincut of `H` separates `phi(A)` from the rest.
pub fn compute_steiner_cactus(
    g: &WeightedGraph,
    terminals: &[usize],
    cfg: &Config,
) -> Result<Cactus> {
    Ok(compute_pipeline(g, terminals, cfg)?.0)
}

/// Same, returning the recursion statistics.
pub fn compute_steiner_cactus_with_stats(
    g: &WeightedGraph,
    terminals: &[usize],
    cfg: &Config,
) -> Result<(Cactus, PipelineStats)> {
    compute_pipeline(g, terminals, cfg)
}

/// Public wrapper around the split-collection step on graphs.
pub fn good_split_collection(
    g: &WeightedGraph,
    terminals: &[usize],
    lambda: Weight,
    cfg: &Config,
) -> Result<SplitCollection> {
    let sys = CutSystem::identity_labels(g);
    let mut ctx = Ctx::new(cfg.clone(), lambda, g.n() as Label);
    good_split_collection_generic(&sys, terminals, &mut ctx)
}

/// Trivial cactus (2 or 3 terminals) on a graph.
pub fn trivial_cactus(g: &WeightedGraph, terminals: &[usize], cfg: &Config) -> Result<Cactus> {
    let sys = CutSystem::identity_labels(g);
    let ts: Vec<usize> = terminals.to_vec();
    if ts.len() < 2 || ts.len() > 3 {
        return Err(Error::WrongSize { got: ts.len() });
    }
    let lambda = steiner_mincut_value_generic(&sys, &ts, LambdaMode::Exact, cfg)?;
    trivial_cactus_generic(&sys, &ts, lambda)
}

/// Star cactus for a graph with no T-split.
pub fn star_cactus(g: &WeightedGraph, terminals: &[usize], cfg: &Config) -> Result<Cactus> {
    let sys = CutSystem::identity_labels(g);
    let ts: Vec<usize> = terminals.to_vec();
    if ts.len() < 4 {
        return Err(Error::TooFewTerminals { need: 4, got: ts.len() });
    }
    let lambda = steiner_mincut_value_generic(&sys, &ts, LambdaMode::Exact, cfg)?;
    let ctx = Ctx::new(cfg.clone(), lambda, g.n() as Label);
    star_cactus_generic(&sys, &ts, &ctx, false)
}
