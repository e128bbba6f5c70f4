use mincactus::*;
fn main() {
    let edges: Vec<(usize, usize, u64)> = (0..6).map(|i| (i, (i + 1) % 6, 1)).collect();
    let g = WeightedGraph::new(6, &edges).unwrap();
    let terminals: Vec<usize> = (0..6).collect();
    let cfg = Config::with_seed(12345);
    match steiner::compute_steiner_cactus(&g, &terminals, &cfg) {
        Ok(c) => println!("ok: nodes={} cycles={:?} trees={:?}", c.node_count(), c.cycles(), c.tree_edges()),
        Err(e) => println!("err: {e}"),
    }
}
