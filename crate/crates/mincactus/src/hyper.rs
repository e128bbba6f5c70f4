//! Steiner hypercactus construction: the same divide-and-conquer engine as
//! the graph pipeline, driven by connected-side maximal isolating mincuts,
//! with a star-or-brittle base case and the extended merge cases. Also the
//! trace checker for the never-split-higher-rank-hyperedges guarantee.

use std::collections::BTreeSet;

use crate::cactus::Cactus;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::graph::{Label, Weight, WeightedHypergraph};
use crate::isolating::{steiner_mincut_value_generic, LambdaMode};
use crate::steiner::{
    compute_pipeline, good_split_collection_generic, star_cactus_generic, Ctx, PipelineStats,
    SplitCollection,
};
use crate::system::CutSystem;

/// Computes a T-Steiner hypercactus of a connected weighted hypergraph.
pub fn compute_steiner_hypercactus(
    h: &WeightedHypergraph,
    terminals: &[usize],
    cfg: &Config,
) -> Result<Cactus> {
    Ok(compute_pipeline(h, terminals, cfg)?.0)
}

/// Same, returning recursion statistics (depth, flow counts, split trace).
pub fn compute_steiner_hypercactus_with_stats(
    h: &WeightedHypergraph,
    terminals: &[usize],
    cfg: &Config,
) -> Result<(Cactus, PipelineStats)> {
    compute_pipeline(h, terminals, cfg)
}

/// Split-collection step on hypergraphs, using connected-side maximal
/// isolating mincuts inside the sampler.
pub fn good_split_collection_hyper(
    h: &WeightedHypergraph,
    terminals: &[usize],
    lambda: Weight,
    cfg: &Config,
) -> Result<SplitCollection> {
    let sys = CutSystem::identity_labels(h);
    let mut ctx = Ctx::new(cfg.clone(), lambda, h.n() as Label);
    good_split_collection_generic(&sys, terminals, &mut ctx)
}

/// Base case when no accessible T-split exists: one 2-vs-rest flow
/// distinguishes a brittle (every bipartition is a mincut) from a star.
pub fn star_or_brittle_cactus(
    h: &WeightedHypergraph,
    terminals: &[usize],
    cfg: &Config,
) -> Result<Cactus> {
    let sys = CutSystem::identity_labels(h);
    let ts: Vec<usize> = terminals.to_vec();
    if ts.len() < 4 {
        return Err(Error::TooFewTerminals { need: 4, got: ts.len() });
    }
    let lambda = steiner_mincut_value_generic(&sys, &ts, LambdaMode::Exact, cfg)?;
    let ctx = Ctx::new(cfg.clone(), lambda, h.n() as Label);
    star_cactus_generic(&sys, &ts, &ctx, true)
}

/// Violation of the hyperedge split property found by
/// [`check_never_splits_hyperedge`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTraceViolation {
    pub split_index: usize,
    pub hyperedge: usize,
}

/// Verifies that every split in the trace includes 0, 1, `|e|-1` or `|e|`
/// components of every rank->=3 hyperedge `e` of the final hypercactus.
/// Splits are given as root-terminal label sets (the pipeline's
/// `split_trace`); a component with terminals on both sides means the split
/// cut lives inside it, so `e` itself is not crossed.
pub fn check_never_splits_hyperedge(
    cactus: &Cactus,
    trace: &[BTreeSet<Label>],
) -> Vec<SplitTraceViolation> {
    let mut violations = Vec::new();
    let all_terminals = cactus.terminals();
    for (h, members) in cactus.hyperedges().iter().enumerate() {
        // terminal sets of the components hanging off each member
        let removed: BTreeSet<usize> = [h].into_iter().collect();
        let comps =
            cactus.components_without(&BTreeSet::new(), &BTreeSet::new(), &removed);
        debug_assert_eq!(comps.len(), members.len());
        let comp_terms: Vec<BTreeSet<Label>> = comps
            .iter()
            .map(|comp| {
                comp.iter()
                    .flat_map(|&v| cactus.terminals_at(v).iter().copied())
                    .collect()
            })
            .collect();
        for (i, side) in trace.iter().enumerate() {
            let mut full_in = 0;
            let mut full_out = 0;
            let mut mixed = 0;
            for terms in &comp_terms {
                if terms.is_empty() {
                    full_out += 1;
                    continue;
                }
                let inside = terms.intersection(side).count();
                if inside == 0 {
                    full_out += 1;
                } else if inside == terms.len() {
                    full_in += 1;
                } else {
                    mixed += 1;
                }
            }
            let r = comp_terms.len();
            let ok = match mixed {
                0 => full_in <= 1 || full_in >= r - 1,
                1 => full_in == 0 || full_out == 0,
                _ => false,
            };
            if !ok {
                violations.push(SplitTraceViolation {
                    split_index: i,
                    hyperedge: h,
                });
            }
        }
    }
    // splits must also be proper sides of the root terminal set
    debug_assert!(trace
        .iter()
        .all(|side| !side.is_empty() && side.len() < all_terminals.len().max(2)));
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn cfg() -> Config {
        Config::with_seed(777)
    }

    fn check_against_oracle(h: &WeightedHypergraph, terminals: &[usize], c: &Cactus) {
        let table = oracle::brute_bipartition_table_hyper(h, terminals).unwrap();
        let report = oracle::check_equivalence(c, &table).unwrap();
        assert!(
            report.violations.is_empty(),
            "equivalence violations: {:?}",
            report.violations
        );
        assert!(c.validate().is_empty(), "validate: {:?}", c.validate());
        assert!(c.is_irredundant().unwrap(), "redundant hypercactus");
    }

    #[test]
    fn single_hyperedge_is_brittle() {
        let h = WeightedHypergraph::new(4, &[(vec![0, 1, 2, 3], 1)]).unwrap();
        let terminals: Vec<usize> = (0..4).collect();
        let c = compute_steiner_hypercactus(&h, &terminals, &cfg()).unwrap();
        assert_eq!(c.lambda(), 1);
        assert_eq!(c.hyperedges().len(), 1);
        assert_eq!(c.hyperedges()[0].len(), 4);
        assert_eq!(c.mincut_count(), 7);
        check_against_oracle(&h, &terminals, &c);
    }

    #[test]
    fn star_or_brittle_examples() {
        let h = WeightedHypergraph::new(4, &[(vec![0, 1, 2, 3], 1)]).unwrap();
        let c = star_or_brittle_cactus(&h, &[0, 1, 2, 3], &cfg()).unwrap();
        assert_eq!(c.hyperedges().len(), 1);

        // clique-like rank-2 structure: the 2-vs-rest test exceeds lambda
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                edges.push((vec![u, v], 1));
            }
        }
        let h = WeightedHypergraph::new(4, &edges).unwrap();
        let c = star_or_brittle_cactus(&h, &[0, 1, 2, 3], &cfg()).unwrap();
        assert!(c.hyperedges().is_empty());
        assert_eq!(c.tree_edges().len(), 4);

        let h = WeightedHypergraph::new(5, &[(vec![0, 1, 2, 3, 4], 2)]).unwrap();
        let c = star_or_brittle_cactus(&h, &[0, 1, 2, 3, 4], &cfg()).unwrap();
        assert_eq!(c.hyperedges()[0].len(), 5);
    }

    #[test]
    fn good_splits_on_brittle_input_is_empty() {
        let h = WeightedHypergraph::new(5, &[(vec![0, 1, 2, 3, 4], 1)]).unwrap();
        let sc = good_split_collection_hyper(&h, &[0, 1, 2, 3, 4], 1, &cfg()).unwrap();
        assert!(sc.splits.is_empty());
    }

    #[test]
    fn rank2_behaves_as_graph_case() {
        let edges = [(0usize, 1usize, 1u64), (1, 2, 1), (2, 3, 1), (3, 0, 1)];
        let g = crate::WeightedGraph::new(4, &edges).unwrap();
        let h = g.to_hypergraph();
        let terminals: Vec<usize> = (0..4).collect();
        let sc = good_split_collection_hyper(&h, &terminals, 2, &cfg()).unwrap();
        let sg = crate::steiner::good_split_collection(&g, &terminals, 2, &cfg()).unwrap();
        assert_eq!(sc.balanced, sg.balanced);
        assert_eq!(sc.splits, sg.splits);
    }

    #[test]
    fn two_brittles_sharing_a_vertex() {
        let h = WeightedHypergraph::new(
            7,
            &[(vec![0, 1, 2, 3], 1), (vec![3, 4, 5, 6], 1)],
        )
        .unwrap();
        let terminals: Vec<usize> = (0..7).collect();
        let c = compute_steiner_hypercactus(&h, &terminals, &cfg()).unwrap();
        check_against_oracle(&h, &terminals, &c);
        assert_eq!(c.hyperedges().len(), 2);
    }

    #[test]
    fn brittle_with_pendant_terminal() {
        // leaf-brittle splice: rank-3 hyperedge plus a heavy pendant edge
        let h = WeightedHypergraph::new(
            4,
            &[(vec![0, 1, 2], 1), (vec![2, 3], 2)],
        )
        .unwrap();
        let terminals: Vec<usize> = (0..4).collect();
        let c = compute_steiner_hypercactus(&h, &terminals, &cfg()).unwrap();
        check_against_oracle(&h, &terminals, &c);
    }

    #[test]
    fn hyperedge_plus_triangle() {
        let h = WeightedHypergraph::new(
            5,
            &[
                (vec![0, 1, 2], 1),
                (vec![2, 3], 1),
                (vec![3, 4], 1),
                (vec![4, 2], 1),
            ],
        )
        .unwrap();
        let terminals: Vec<usize> = (0..5).collect();
        let c = compute_steiner_hypercactus(&h, &terminals, &cfg()).unwrap();
        check_against_oracle(&h, &terminals, &c);
    }

    #[test]
    fn rank2_only_matches_graph_pipeline() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(88);
        for case in 0..10 {
            let n = rng.gen_range(4..9);
            let mut edges = Vec::new();
            for v in 1..n {
                edges.push((rng.gen_range(0..v), v, rng.gen_range(1..4)));
            }
            for _ in 0..n / 2 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    edges.push((u, v, rng.gen_range(1..4)));
                }
            }
            let g = crate::WeightedGraph::new(n, &edges).unwrap();
            let h = g.to_hypergraph();
            let terminals: Vec<usize> = (0..n).collect();
            let cfg = Config::with_seed(case);
            let cg = crate::steiner::compute_steiner_cactus(&g, &terminals, &cfg).unwrap();
            let ch = compute_steiner_hypercactus(&h, &terminals, &cfg).unwrap();
            // same mincut sets: both equivalent to the same table
            let table = oracle::brute_bipartition_table_graph(&g, &terminals).unwrap();
            assert!(oracle::check_equivalence(&cg, &table)
                .unwrap()
                .violations
                .is_empty());
            assert!(oracle::check_equivalence(&ch, &table)
                .unwrap()
                .violations
                .is_empty());
        }
    }

    #[test]
    fn randomized_hypercactus_oracle_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4040);
        let mut done = 0;
        while done < 15 {
            let n = rng.gen_range(4..9);
            let m = rng.gen_range(2..7);
            let mut edges = Vec::new();
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
            let tcount = rng.gen_range(2..=n.min(6));
            let mut terminals: Vec<usize> = (0..n).collect();
            for i in (1..terminals.len()).rev() {
                terminals.swap(i, rng.gen_range(0..=i));
            }
            terminals.truncate(tcount);
            terminals.sort_unstable();
            let cfg = Config::with_seed(done as u64);
            let (c, stats) =
                compute_steiner_hypercactus_with_stats(&h, &terminals, &cfg).unwrap();
            check_against_oracle(&h, &terminals, &c);
            let violations = check_never_splits_hyperedge(&c, &stats.split_trace);
            assert!(violations.is_empty(), "split trace violations: {violations:?}");
        }
    }

    #[test]
    fn trace_checker_accepts_graph_only_traces() {
        // no hyperedges: vacuously true
        let c = Cactus::from_parts(
            vec![
                [0u64].into_iter().collect(),
                [1u64].into_iter().collect(),
            ],
            vec![(0, 1)],
            vec![],
            vec![],
            1,
        );
        let trace = vec![[0u64].into_iter().collect()];
        assert!(check_never_splits_hyperedge(&c, &trace).is_empty());
    }

    #[test]
    fn trace_checker_flags_forbidden_splits() {
        // brittle on 5 nodes: a split taking 2 of 5 components crosses the
        // hyperedge in a forbidden way
        let c = Cactus::from_parts(
            (0..5).map(|i| [i as u64].into_iter().collect()).collect(),
            vec![],
            vec![],
            vec![(0..5).collect()],
            1,
        );
        let bad: BTreeSet<Label> = [0u64, 1].into_iter().collect();
        let violations = check_never_splits_hyperedge(&c, &[bad]);
        assert_eq!(violations.len(), 1);
        let good: BTreeSet<Label> = [0u64].into_iter().collect();
        assert!(check_never_splits_hyperedge(&c, &[good]).is_empty());
    }
}
