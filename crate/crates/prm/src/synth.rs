//! Deterministic synthetic graph generators for tests and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{EdgeList, InfluenceGraph};
use crate::rng::RngStream;

/// Random simple directed graph: `m` distinct edges (no self-loops) with
/// probabilities uniform in `prob_range`.
pub fn random_graph(n: usize, m: usize, seed: u64, prob_range: (f64, f64)) -> InfluenceGraph {
    assert!(n >= 2, "need at least two nodes");
    assert!(m <= n * (n - 1), "too many edges for a simple digraph");
    let mut rng = RngStream::new(seed).child("synth-random").rng();
    let mut chosen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v || !chosen.insert((u, v)) {
            continue;
        }
        let p = rng.gen_range(prob_range.0..=prob_range.1);
        edges.push((u, v, p));
    }
    InfluenceGraph::from_edges(n, &edges)
}

/// Ten-node demo network with certain (p=1) edges, used across tests and the
/// bundled example files. Two promotion waves each reach five nodes:
/// seeds {1,5} cover {1,2,3,5,6} and seed {9} covers {9,0,2,3,6}, so the
/// waves overlap in three nodes and no three seeds reach more than seven.
pub fn demo_two_wave_graph() -> InfluenceGraph {
    InfluenceGraph::from_edges(
        10,
        &[
            (1, 2, 1.0),
            (2, 3, 1.0),
            (5, 6, 1.0),
            (9, 0, 1.0),
            (9, 2, 1.0),
            (9, 6, 1.0),
        ],
    )
}

/// Scale-free graph in the style of collaboration networks: preferential
/// attachment with `m_attach` links per incoming node, every undirected link
/// materialized as two directed edges. Probabilities follow the
/// weighted-cascade rule `p(u,v) = 1/in-degree(v)`.
pub fn scale_free_weighted_cascade(n: usize, m_attach: usize, seed: u64) -> InfluenceGraph {
    let pairs = preferential_attachment_pairs(n, m_attach, seed);
    let directed: Vec<(u32, u32)> = pairs
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .collect();
    EdgeList::from_pairs(n, &directed)
        .apply_weighted_cascade()
        .expect("generated pairs are simple")
}

/// Undirected preferential-attachment edge list: node `i` attaches to
/// `m_attach` distinct earlier nodes chosen proportionally to degree.
fn preferential_attachment_pairs(n: usize, m_attach: usize, seed: u64) -> Vec<(u32, u32)> {
    assert!(n > m_attach && m_attach >= 1);
    let mut rng = RngStream::new(seed).child("synth-pa").rng();
    // Repeated-endpoints urn: picking a uniform element is degree-proportional.
    let mut urn: Vec<u32> = Vec::with_capacity(2 * n * m_attach);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    // Seed clique over the first m_attach+1 nodes.
    for a in 0..=(m_attach as u32) {
        for b in 0..a {
            pairs.push((b, a));
            urn.push(a);
            urn.push(b);
        }
    }
    for v in (m_attach as u32 + 1)..n as u32 {
        let mut targets = std::collections::HashSet::new();
        while targets.len() < m_attach {
            let &t = urn.choose(&mut rng).expect("urn never empty");
            targets.insert(t);
        }
        let mut sorted: Vec<u32> = targets.into_iter().collect();
        sorted.sort_unstable();
        for t in sorted {
            pairs.push((t, v));
            urn.push(v);
            urn.push(t);
        }
    }
    pairs
}
