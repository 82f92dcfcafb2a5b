//! Shared fixtures and brute-force oracles for the integration suites.

use prm::diffusion::{exact, exact_spread_small};
use prm::graph::{InfluenceGraph, NodeId};
use prm::popularity::{ratio_via_iteration, RoundWeights, ScenarioConfig};
use prm::rng::RngStream;
use prm::sampling::{CollectionKind, RRCollection, RRSampler};
use prm::synth;
use rand::seq::index::sample as index_sample;
use rand::Rng;

pub struct CorpusEntry {
    pub name: &'static str,
    pub graph: InfluenceGraph,
    pub config: ScenarioConfig,
}

/// Small graphs (all with at most 12 edges, so spreads are exactly
/// enumerable) paired with scenario parameters.
pub fn small_corpus() -> Vec<CorpusEntry> {
    let chain = InfluenceGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
    let two = InfluenceGraph::from_edges(2, &[(0, 1, 0.5)]);
    let star_edges: Vec<(u32, u32, f64)> = (1..6).map(|i| (0, i, 1.0)).collect();
    let star = InfluenceGraph::from_edges(6, &star_edges);
    vec![
        CorpusEntry {
            name: "two-wave-demo",
            graph: synth::demo_two_wave_graph(),
            config: ScenarioConfig::new(2.0, 8.0, 5.0, 2).unwrap(),
        },
        CorpusEntry {
            name: "single-coin-edge",
            graph: two,
            config: ScenarioConfig::new(3.0, 12.0, 2.0, 2).unwrap(),
        },
        CorpusEntry {
            name: "certain-chain",
            graph: chain,
            config: ScenarioConfig::new(5.0, 20.0, 3.0, 2).unwrap(),
        },
        CorpusEntry {
            name: "random-5",
            graph: synth::random_graph(5, 8, 101, (0.2, 0.9)),
            config: ScenarioConfig::new(4.0, 16.0, 2.0, 3).unwrap(),
        },
        CorpusEntry {
            name: "random-6",
            graph: synth::random_graph(6, 10, 102, (0.2, 0.9)),
            config: ScenarioConfig::new(6.0, 18.0, 4.0, 2).unwrap(),
        },
        CorpusEntry {
            name: "random-7",
            graph: synth::random_graph(7, 12, 103, (0.1, 0.8)),
            config: ScenarioConfig::new(5.0, 25.0, 3.0, 3).unwrap(),
        },
        CorpusEntry {
            name: "certain-star",
            graph: star,
            config: ScenarioConfig::new(4.0, 12.0, 2.0, 2).unwrap(),
        },
    ]
}

/// Random allocation with distinct nodes and uniform rounds.
pub fn random_ns_pairs(
    graph: &InfluenceGraph,
    t_max: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Vec<(NodeId, usize)> {
    let nodes = index_sample(rng, graph.node_count(), k.min(graph.node_count()));
    nodes
        .iter()
        .map(|v| (NodeId(v as u32), rng.gen_range(1..=t_max)))
        .collect()
}

/// Random allocation with distinct (node, round) pairs.
pub fn random_os_pairs(
    graph: &InfluenceGraph,
    t_max: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Vec<(NodeId, usize)> {
    let universe = graph.node_count() * t_max;
    let picks = index_sample(rng, universe, k.min(universe));
    picks
        .iter()
        .map(|i| (NodeId((i / t_max) as u32), i % t_max + 1))
        .collect()
}

/// Exact round-weighted influence of per-round seed sets (overlapping form).
pub fn exact_rho_oi(graph: &InfluenceGraph, rounds: &[Vec<NodeId>], weights: &RoundWeights) -> f64 {
    rounds
        .iter()
        .enumerate()
        .map(|(t, seeds)| weights.at(t + 1) * exact_spread_small(graph, seeds).unwrap())
        .sum()
}

/// Exhaustive optimum of the overlapping-influence surrogate over all
/// distinct-node allocations of at most `k` pairs.
pub fn exhaustive_opt_oins(graph: &InfluenceGraph, weights: &RoundWeights, k: usize) -> f64 {
    let n = graph.node_count();
    let t_max = weights.rounds();
    let mut sigma_memo: std::collections::HashMap<u32, f64> = std::collections::HashMap::new();
    let mut sigma = |mask: u32| -> f64 {
        *sigma_memo.entry(mask).or_insert_with(|| {
            let seeds: Vec<NodeId> = (0..n as u32).filter(|i| mask >> i & 1 == 1).map(NodeId).collect();
            exact_spread_small(graph, &seeds).unwrap()
        })
    };
    let mut best = 0.0f64;
    for node_mask in 0u32..(1 << n) {
        let c = node_mask.count_ones() as usize;
        if c > k {
            continue;
        }
        let chosen: Vec<u32> = (0..n as u32).filter(|i| node_mask >> i & 1 == 1).collect();
        // Every assignment of the chosen nodes to rounds.
        let mut assignment = vec![0usize; c];
        loop {
            let mut round_masks = vec![0u32; t_max];
            for (i, &v) in chosen.iter().enumerate() {
                round_masks[assignment[i]] |= 1 << v;
            }
            let value: f64 = round_masks
                .iter()
                .enumerate()
                .map(|(t, &mask)| weights.at(t + 1) * sigma(mask))
                .sum();
            best = best.max(value);
            // Next mixed-radix assignment.
            let mut pos = 0;
            loop {
                if pos == c {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < t_max {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == c {
                break;
            }
        }
    }
    best
}

/// Exhaustive optimum of the non-overlapping-influence surrogate over all
/// pair sets of at most `k` distinct (node, round) pairs, using the exact
/// per-round activation probabilities.
pub fn exhaustive_opt_nios(graph: &InfluenceGraph, weights: &RoundWeights, k: usize) -> f64 {
    let n = graph.node_count();
    let t_max = weights.rounds();
    let universe: Vec<(u32, usize)> = (0..n as u32)
        .flat_map(|v| (1..=t_max).map(move |t| (v, t)))
        .collect();
    let mut ap_memo: std::collections::HashMap<u32, Vec<f64>> = std::collections::HashMap::new();
    let mut ap = |mask: u32| -> Vec<f64> {
        ap_memo
            .entry(mask)
            .or_insert_with(|| {
                let seeds: Vec<NodeId> =
                    (0..n as u32).filter(|i| mask >> i & 1 == 1).map(NodeId).collect();
                exact::activation_probabilities(graph, &seeds)
            })
            .clone()
    };
    let mut best = 0.0f64;
    let m = universe.len();
    let mut combo: Vec<usize> = Vec::new();
    // Depth-first over combinations of size <= k.
    fn rec(
        start: usize,
        k: usize,
        m: usize,
        universe: &[(u32, usize)],
        combo: &mut Vec<usize>,
        eval: &mut dyn FnMut(&[usize]) -> f64,
        best: &mut f64,
    ) {
        let value = eval(combo);
        if value > *best {
            *best = value;
        }
        if combo.len() == k {
            return;
        }
        for i in start..m {
            combo.push(i);
            rec(i + 1, k, m, universe, combo, eval, best);
            combo.pop();
        }
    }
    let mut eval = |combo: &[usize]| -> f64 {
        let mut round_masks = vec![0u32; t_max];
        for &i in combo {
            let (v, t) = universe[i];
            round_masks[t - 1] |= 1 << v;
        }
        let q: Vec<Vec<f64>> = round_masks.iter().map(|&mask| ap(mask)).collect();
        let mut total = 0.0;
        for v in 0..n {
            let mut none_before = 1.0;
            for t in 0..t_max {
                total += weights.at(t + 1) * q[t][v] * none_before;
                none_before *= 1.0 - q[t][v];
            }
        }
        total
    };
    rec(0, k, m, &universe, &mut combo, &mut eval, &mut best);
    best
}

/// Best reachable final ratio on an edgeless graph at budget `k`: spreads are
/// seed counts, so enumerate every split of the budget over rounds.
pub fn edgeless_best_ratio(config: &ScenarioConfig, k: usize, n: usize) -> f64 {
    fn splits(total: usize, rounds: usize) -> Vec<Vec<usize>> {
        if rounds == 1 {
            return vec![vec![total]];
        }
        (0..=total)
            .flat_map(|first| {
                splits(total - first, rounds - 1).into_iter().map(move |mut rest| {
                    let mut s = vec![first];
                    s.append(&mut rest);
                    s
                })
            })
            .collect()
    }
    splits(k.min(n), config.horizon)
        .into_iter()
        .map(|s| {
            let sigmas: Vec<f64> = s.iter().map(|&b| b as f64).collect();
            ratio_via_iteration(config, &sigmas).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random RR collection of either kind for greedy cross-checks.
pub fn random_collection(
    kind: CollectionKind,
    seed: u64,
) -> (InfluenceGraph, RRCollection, RoundWeights) {
    let mut rng = RngStream::new(seed).child("collection-params").rng();
    let n = rng.gen_range(5..=9);
    let m = rng.gen_range(6..=14).min(n * (n - 1));
    let t_max = rng.gen_range(2..=3);
    let theta = rng.gen_range(40..=120);
    let graph = synth::random_graph(n, m, seed.wrapping_mul(31).wrapping_add(7), (0.1, 0.9));
    let mut coll = RRCollection::new(kind, &graph, t_max);
    let mut sampler = RRSampler::new(&graph, t_max, RngStream::new(seed).child("collection"));
    sampler.extend(&mut coll, theta).unwrap();
    // Generic decreasing weights so value ties are structural, not numeric.
    let mut w = Vec::with_capacity(t_max);
    let mut cur = rng.gen_range(0.5..1.0);
    for _ in 0..t_max {
        w.push(cur);
        cur *= rng.gen_range(0.3..0.95);
    }
    (graph, coll, RoundWeights::new(w).unwrap())
}
