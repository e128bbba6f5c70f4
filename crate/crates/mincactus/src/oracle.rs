//! Brute-force ground truth: exhaustive bipartition mincut tables, direct
//! per-terminal maximal isolating mincuts, and cactus-vs-table equivalence
//! checking. Everything here exists to make the randomized constructions
//! testable; the flows are exact, only the enumeration is exponential.

use std::collections::{BTreeMap, BTreeSet};

use crate::cactus::Cactus;
use crate::error::{Error, Result};
use crate::graph::{Label, Weight, WeightedGraph, WeightedHypergraph};
use crate::isolating::IsolatingCutSet;
use crate::system::CutSystem;

/// Exact mincut value for every proper terminal bipartition, keyed by the
/// canonical side (the one not containing the smallest terminal).
#[derive(Debug, Clone)]
pub struct BipartitionTable {
    pub terminals: Vec<usize>,
    pub entries: BTreeMap<BTreeSet<usize>, Weight>,
    pub lambda: Weight,
}

const MAX_TERMINALS: usize = 20;

fn table_generic<S: CutSystem>(sys: &S, terminals: &[usize]) -> Result<BipartitionTable> {
    let mut ts: Vec<usize> = terminals.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::TooFewTerminals { need: 2, got: ts.len() });
    }
    if ts.len() > MAX_TERMINALS {
        return Err(Error::TooManyTerminals {
            max: MAX_TERMINALS,
            got: ts.len(),
        });
    }
    let k = ts.len();
    let mut entries = BTreeMap::new();
    let mut lambda = Weight::MAX;
    for mask in 1u64..(1 << (k - 1)) {
        // canonical side: never contains ts[0]
        let a: BTreeSet<usize> = (0..k - 1)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ts[i + 1])
            .collect();
        let b: BTreeSet<usize> = ts.iter().filter(|t| !a.contains(t)).copied().collect();
        let value = sys.mincut_value(&a, &b)?;
        lambda = lambda.min(value);
        entries.insert(a, value);
    }
    Ok(BipartitionTable {
        terminals: ts,
        entries,
        lambda,
    })
}

/// All `2^{|T|-1} - 1` bipartition mincut values of a graph, by max-flow.
pub fn brute_bipartition_table_graph(
    g: &WeightedGraph,
    terminals: &[usize],
) -> Result<BipartitionTable> {
    table_generic(&CutSystem::identity_labels(g), terminals)
}

/// Hypergraph variant; relaxed values, which coincide with the
/// connected-side values.
pub fn brute_bipartition_table_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
) -> Result<BipartitionTable> {
    table_generic(&CutSystem::identity_labels(h), terminals)
}

fn direct_generic<S: CutSystem>(sys: &S, terminals: &[usize]) -> Result<IsolatingCutSet> {
    let mut ts: Vec<usize> = terminals.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::TooFewTerminals { need: 2, got: ts.len() });
    }
    let mut cuts = BTreeMap::new();
    for &t in &ts {
        let a: BTreeSet<usize> = [t].into_iter().collect();
        let b: BTreeSet<usize> = ts.iter().filter(|&&x| x != t).copied().collect();
        cuts.insert(t, sys.max_side(&a, &b)?);
    }
    Ok(IsolatingCutSet { terminals: ts, cuts })
}

/// Definitional oracle for maximal isolating mincuts: one direct flow per
/// terminal against all the others.
pub fn direct_maximal_isolating(g: &WeightedGraph, terminals: &[usize]) -> Result<IsolatingCutSet> {
    direct_generic(&CutSystem::identity_labels(g), terminals)
}

pub fn direct_maximal_isolating_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
) -> Result<IsolatingCutSet> {
    direct_generic(&CutSystem::identity_labels(h), terminals)
}

/// One direction of a failed iff-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceViolation {
    /// The table says lambda but the cactus does not separate the side.
    MissingSeparation(BTreeSet<usize>),
    /// The cactus separates a side whose true value exceeds lambda.
    ExtraSeparation(BTreeSet<usize>),
    LambdaMismatch { table: Weight, cactus: Weight },
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub checked: usize,
    pub violations: Vec<EquivalenceViolation>,
}

/// Checks, for every bipartition in the table, that its mincut value equals
/// lambda exactly when the cactus separates it.
pub fn check_equivalence(c: &Cactus, table: &BipartitionTable) -> Result<EquivalenceReport> {
    let mut violations = Vec::new();
    if c.lambda() != table.lambda {
        violations.push(EquivalenceViolation::LambdaMismatch {
            table: table.lambda,
            cactus: c.lambda(),
        });
    }
    let phi_domain = c.terminals();
    for &t in &table.terminals {
        if !phi_domain.contains(&(t as Label)) {
            return Err(Error::InvalidSubset);
        }
    }
    let tester = c.separation_tester()?;
    let mut checked = 0;
    for (side, &value) in &table.entries {
        checked += 1;
        let labels: BTreeSet<Label> = side.iter().map(|&t| t as Label).collect();
        let separated = tester.separates(&labels)?;
        let is_mincut = value == table.lambda;
        if is_mincut && !separated {
            violations.push(EquivalenceViolation::MissingSeparation(side.clone()));
        } else if !is_mincut && separated {
            violations.push(EquivalenceViolation::ExtraSeparation(side.clone()));
        }
    }
    Ok(EquivalenceReport {
        checked,
        violations,
    })
}
