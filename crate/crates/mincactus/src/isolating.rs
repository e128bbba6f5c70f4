//! Isolating mincuts: the minimal variant (log-many flows plus localized
//! per-terminal flows), the maximal variant via pivoted divide-and-conquer,
//! Steiner mincut values, and the lambda-connectivity preprocessing
//! partition. Everything runs on graphs and hypergraphs through the same
//! generic core.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{derive_seed, Config};
use crate::error::{Error, Result};
use crate::graph::{Cut, Label, Weight, WeightedGraph, WeightedHypergraph};
use crate::system::CutSystem;

/// Per-terminal isolating mincuts over a common terminal set.
#[derive(Debug, Clone)]
pub struct IsolatingCutSet {
    /// Sorted terminal vertex ids.
    pub terminals: Vec<usize>,
    /// Terminal -> its isolating mincut (side in original vertex ids).
    pub cuts: BTreeMap<usize, Cut>,
}

impl IsolatingCutSet {
    /// Sum of side sizes; bounded by `2n` for maximal isolating mincuts.
    pub fn total_side_size(&self) -> usize {
        self.cuts.values().map(|c| c.side.len()).sum()
    }
}

/// How to compute a Steiner mincut value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMode {
    /// `|T| - 1` flows from a fixed terminal; deterministic.
    Exact,
    /// Minimal isolating cuts of terminal subsamples at geometric rates;
    /// correct with high probability, seeded through [`Config`].
    Sampled,
}

fn check_terminals<S: CutSystem>(sys: &S, terminals: &[usize], need: usize) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = terminals.iter().copied().collect();
    if set.len() < need {
        return Err(Error::TooFewTerminals {
            need,
            got: set.len(),
        });
    }
    for &t in &set {
        if t >= sys.n() {
            return Err(Error::VertexOutOfRange {
                vertex: t,
                n: sys.n(),
            });
        }
    }
    Ok(set.into_iter().collect())
}

// ---------------------------------------------------------------------------
// minimal isolating mincuts
// ---------------------------------------------------------------------------

/// Generic isolating-cut scheme: ceil(log |T|) bit-partition flows isolate
/// the terminals into disjoint regions, then one localized flow per terminal
/// extracts its minimal isolating mincut.
pub(crate) fn minimal_isolating_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
) -> Result<BTreeMap<usize, Cut>> {
    let ts = check_terminals(sys, terminals, 2)?;
    let k = ts.len();
    let bits = usize::BITS - (k - 1).leading_zeros();
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    for bit in 0..bits {
        let a: BTreeSet<usize> = ts
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> bit & 1 == 0)
            .map(|(_, &t)| t)
            .collect();
        let b: BTreeSet<usize> = ts
            .iter()
            .filter(|t| !a.contains(t))
            .copied()
            .collect();
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let cut = sys.min_side(&a, &b)?;
        removed.extend(cut.boundary.iter().copied());
    }
    let comps = sys.components_avoiding(&removed);
    let mut comp_of = vec![usize::MAX; sys.n()];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }
    let mut out = BTreeMap::new();
    for &t in &ts {
        let region: BTreeSet<usize> = comps[comp_of[t]].iter().copied().collect();
        debug_assert_eq!(
            region.iter().filter(|v| ts.contains(v)).count(),
            1,
            "bit cuts isolate each terminal"
        );
        let outside: BTreeSet<usize> = (0..sys.n()).filter(|v| !region.contains(v)).collect();
        debug_assert!(!outside.is_empty());
        let (sub, pivot, map) = sys.contract(&outside, u64::MAX)?;
        let t_local: BTreeSet<usize> = [map[t]].into_iter().collect();
        let pivot_set: BTreeSet<usize> = [pivot].into_iter().collect();
        let local = sub.min_side(&t_local, &pivot_set)?;
        let side: BTreeSet<usize> = local
            .side
            .iter()
            .map(|&v| {
                sys.vertex_by_label(sub.label(v))
                    .expect("non-pivot vertices keep their labels")
            })
            .collect();
        let cut = sys.cut(side)?;
        debug_assert_eq!(cut.value, local.value);
        out.insert(t, cut);
    }
    Ok(out)
}

/// Minimal t-isolating mincuts for every `t` in `terminals`; the returned
/// sides are pairwise disjoint.
pub fn minimal_isolating_mincuts(g: &WeightedGraph, terminals: &[usize]) -> Result<IsolatingCutSet> {
    let sys = CutSystem::identity_labels(g);
    let cuts = minimal_isolating_generic(&sys, terminals)?;
    Ok(IsolatingCutSet {
        terminals: cuts.keys().copied().collect(),
        cuts,
    })
}

/// Hypergraph variant; sides satisfy the connected-side constraint.
pub fn minimal_isolating_mincuts_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
) -> Result<IsolatingCutSet> {
    let sys = CutSystem::identity_labels(h);
    let cuts = minimal_isolating_generic(&sys, terminals)?;
    Ok(IsolatingCutSet {
        terminals: cuts.keys().copied().collect(),
        cuts,
    })
}

// ---------------------------------------------------------------------------
// maximal isolating mincuts (pivoted divide and conquer)
// ---------------------------------------------------------------------------

/// A contracted recursion unit: at most one contracted vertex (the pivot),
/// which is always a terminal.
pub(crate) struct Subproblem<S: CutSystem> {
    pub sys: S,
    /// Local vertex ids, sorted by label.
    pub terminals: Vec<usize>,
    pub pivot: Option<usize>,
}

const PIVOT_LABEL: Label = u64::MAX;

fn maximal_isolating_rec<S: CutSystem>(
    sub: Subproblem<S>,
    out: &mut BTreeMap<Label, (BTreeSet<Label>, Weight)>,
    flow_budget_check: &mut dyn FnMut(),
) -> Result<()> {
    let ts = &sub.terminals;
    if ts.len() <= 4 {
        for &t in ts {
            if Some(t) == sub.pivot {
                continue;
            }
            let a: BTreeSet<usize> = [t].into_iter().collect();
            let rest: BTreeSet<usize> = ts.iter().filter(|&&x| x != t).copied().collect();
            flow_budget_check();
            let cut = sub.sys.max_side(&a, &rest)?;
            let side: BTreeSet<Label> = cut.side.iter().map(|&v| sub.sys.label(v)).collect();
            debug_assert!(!side.contains(&PIVOT_LABEL));
            out.insert(sub.sys.label(t), (side, cut.value));
        }
        return Ok(());
    }

    // deterministic halving: non-pivot terminals sorted by label, split at
    // the midpoint
    let mut non_pivot: Vec<usize> = ts
        .iter()
        .filter(|&&t| Some(t) != sub.pivot)
        .copied()
        .collect();
    non_pivot.sort_by_key(|&v| sub.sys.label(v));
    let mid = non_pivot.len().div_ceil(2);
    let halves = [&non_pivot[..mid], &non_pivot[mid..]];

    for half in halves {
        let a: BTreeSet<usize> = half.iter().copied().collect();
        let rest: BTreeSet<usize> = ts.iter().filter(|t| !a.contains(t)).copied().collect();
        flow_budget_check();
        let x_a = sub.sys.max_side(&a, &rest)?;
        let outside: BTreeSet<usize> = (0..sub.sys.n()).filter(|v| !x_a.side.contains(v)).collect();
        let (contracted, pivot, map) = sub.sys.contract(&outside, PIVOT_LABEL)?;
        let mut child_terminals: Vec<usize> = half.iter().map(|&t| map[t]).collect();
        child_terminals.push(pivot);
        child_terminals.sort_by_key(|&v| contracted.label(v));
        maximal_isolating_rec(
            Subproblem {
                sys: contracted,
                terminals: child_terminals,
                pivot: Some(pivot),
            },
            out,
            flow_budget_check,
        )?;
    }
    Ok(())
}

pub(crate) fn maximal_isolating_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
) -> Result<BTreeMap<usize, Cut>> {
    let ts = check_terminals(sys, terminals, 2)?;
    let mut raw = BTreeMap::new();
    maximal_isolating_rec(
        Subproblem {
            sys: sys.clone(),
            terminals: ts.clone(),
            pivot: None,
        },
        &mut raw,
        &mut || {},
    )?;
    let mut out = BTreeMap::new();
    for &t in &ts {
        let (side_labels, value) = raw
            .remove(&sys.label(t))
            .expect("every terminal is solved in exactly one leaf");
        let side: BTreeSet<usize> = side_labels
            .iter()
            .map(|&l| sys.vertex_by_label(l).expect("label survives contraction"))
            .collect();
        let cut = sys.cut(side)?;
        debug_assert_eq!(cut.value, value);
        out.insert(t, cut);
    }
    Ok(out)
}

/// Maximal t-isolating mincuts for every terminal, computed by the pivoted
/// recursion: split the terminals in half, take the maximal side for each
/// half, contract the complements into pivots and recurse.
pub fn maximal_isolating_mincuts(g: &WeightedGraph, terminals: &[usize]) -> Result<IsolatingCutSet> {
    let sys = CutSystem::identity_labels(g);
    let cuts = maximal_isolating_generic(&sys, terminals)?;
    Ok(IsolatingCutSet {
        terminals: cuts.keys().copied().collect(),
        cuts,
    })
}

/// Hypergraph variant; every returned side is connected after contracting
/// its terminal.
pub fn maximal_isolating_mincuts_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
) -> Result<IsolatingCutSet> {
    let sys = CutSystem::identity_labels(h);
    let cuts = maximal_isolating_generic(&sys, terminals)?;
    Ok(IsolatingCutSet {
        terminals: cuts.keys().copied().collect(),
        cuts,
    })
}

// ---------------------------------------------------------------------------
// Steiner mincut value and the lambda-connectivity partition
// ---------------------------------------------------------------------------

/// Salt decoupling the preprocessing sampling streams from the split-finding
/// streams.
const SAMPLE_SALT: u64 = 0x5ee0;

/// Runs the sampling schedule and hands every minimal isolating cut found to
/// `sink`. Rate index 0 (the full terminal set) runs once; rates `2^-i` for
/// i = 1..=ceil(log2 |T|) run `cfg.repetitions(n)` times each.
pub(crate) fn sample_minimal_cuts<S, F>(
    sys: &S,
    terminals: &[usize],
    cfg: &Config,
    mut sink: F,
) -> Result<()>
where
    S: CutSystem,
    F: FnMut(usize, &Cut),
{
    let ts = check_terminals(sys, terminals, 2)?;
    let k = ts.len();
    let full = minimal_isolating_generic(sys, &ts)?;
    for (t, cut) in &full {
        sink(*t, cut);
    }
    let max_rate = (usize::BITS - (k - 1).leading_zeros()) as usize;
    let rounds = cfg.repetitions(sys.n());
    for round in 0..rounds {
        for rate in 1..=max_rate {
            let seed = derive_seed(
                cfg.seed.wrapping_add(SAMPLE_SALT),
                round as u64,
                rate as u64,
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = 0.5f64.powi(rate as i32);
            let sample: Vec<usize> = ts.iter().copied().filter(|_| rng.gen_bool(p)).collect();
            if sample.len() < 2 {
                continue;
            }
            let cuts = minimal_isolating_generic(sys, &sample)?;
            for (t, cut) in &cuts {
                sink(*t, cut);
            }
        }
    }
    Ok(())
}

pub(crate) fn steiner_mincut_value_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    mode: LambdaMode,
    cfg: &Config,
) -> Result<Weight> {
    let ts = check_terminals(sys, terminals, 2)?;
    match mode {
        LambdaMode::Exact => {
            let t0 = ts[0];
            let a: BTreeSet<usize> = [t0].into_iter().collect();
            let mut best = Weight::MAX;
            for &t in &ts[1..] {
                let b: BTreeSet<usize> = [t].into_iter().collect();
                best = best.min(sys.mincut_value(&a, &b)?);
            }
            Ok(best)
        }
        LambdaMode::Sampled => {
            let mut best = Weight::MAX;
            sample_minimal_cuts(sys, &ts, cfg, |_, cut| {
                best = best.min(cut.value);
            })?;
            Ok(best)
        }
    }
}

/// Value of the T-Steiner mincut.
pub fn steiner_mincut_value(
    g: &WeightedGraph,
    terminals: &[usize],
    mode: LambdaMode,
    cfg: &Config,
) -> Result<Weight> {
    steiner_mincut_value_generic(&CutSystem::identity_labels(g), terminals, mode, cfg)
}

pub fn steiner_mincut_value_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
    mode: LambdaMode,
    cfg: &Config,
) -> Result<Weight> {
    steiner_mincut_value_generic(&CutSystem::identity_labels(h), terminals, mode, cfg)
}

/// Partition the terminals so that `u` and `v` land in different parts
/// exactly when some lambda-valued Steiner mincut separates them. Built as
/// the common refinement of every lambda-valued minimal isolating cut found
/// by the sampling schedule; correct with high probability.
pub(crate) fn connectivity_partition_generic<S: CutSystem>(
    sys: &S,
    terminals: &[usize],
    lambda: Weight,
    cfg: &Config,
) -> Result<Vec<Vec<usize>>> {
    let ts = check_terminals(sys, terminals, 2)?;
    let tset: BTreeSet<usize> = ts.iter().copied().collect();
    let mut witnesses: Vec<BTreeSet<usize>> = Vec::new();
    sample_minimal_cuts(sys, &ts, cfg, |_, cut| {
        if cut.value == lambda {
            witnesses.push(cut.side.intersection(&tset).copied().collect());
        }
    })?;
    let mut parts: Vec<BTreeSet<usize>> = vec![tset];
    for w in &witnesses {
        let mut next = Vec::new();
        for part in parts {
            let inside: BTreeSet<usize> = part.intersection(w).copied().collect();
            let outside: BTreeSet<usize> = part.difference(w).copied().collect();
            if inside.is_empty() || outside.is_empty() {
                next.push(part);
            } else {
                next.push(inside);
                next.push(outside);
            }
        }
        parts = next;
    }
    let mut out: Vec<Vec<usize>> = parts
        .into_iter()
        .map(|p| p.into_iter().collect::<Vec<usize>>())
        .collect();
    out.sort_by_key(|p| p[0]);
    Ok(out)
}

pub fn connectivity_partition(
    g: &WeightedGraph,
    terminals: &[usize],
    lambda: Weight,
    cfg: &Config,
) -> Result<Vec<Vec<usize>>> {
    connectivity_partition_generic(&CutSystem::identity_labels(g), terminals, lambda, cfg)
}

pub fn connectivity_partition_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
    lambda: Weight,
    cfg: &Config,
) -> Result<Vec<Vec<usize>>> {
    connectivity_partition_generic(&CutSystem::identity_labels(h), terminals, lambda, cfg)
}
