//! Forward independent-cascade simulation and spread estimation.
//!
//! A cascade starts from a seed set; each newly active node tries each of its
//! inactive out-neighbors exactly once with the edge's probability. The
//! frontier is processed breadth-first in adjacency order, so a fixed
//! [`RngStream`] yields a bit-identical outcome. Monte Carlo estimators run
//! simulations in parallel with one stream id per simulation; aggregate
//! statistics are therefore independent of the worker count.
//!
//! The [`exact`] submodule holds the brute-force live-edge enumeration
//! oracles used to verify every sampling-based estimate in this crate.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeId};
use crate::rng::RngStream;

/// Result of one realized cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationOutcome {
    /// The seed set the cascade started from.
    pub seeds: Vec<NodeId>,
    /// All activated nodes (seeds included), in activation order.
    pub activated: Vec<NodeId>,
}

impl ActivationOutcome {
    pub fn spread(&self) -> usize {
        self.activated.len()
    }
}

/// Mean and sampling error of a Monte Carlo spread estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub num_sims: usize,
}

fn check_seeds(graph: &InfluenceGraph, seeds: &[NodeId]) -> Result<()> {
    for &s in seeds {
        if !graph.contains(s) {
            return Err(Error::domain(format!(
                "seed {} outside the graph (N={})",
                s,
                graph.node_count()
            )));
        }
    }
    Ok(())
}

/// Run one cascade. Duplicate seeds are activated once.
pub fn simulate_ic(graph: &InfluenceGraph, seeds: &[NodeId], rng: RngStream) -> Result<ActivationOutcome> {
    check_seeds(graph, seeds)?;
    let mut rng = rng.rng();
    let mut active = vec![false; graph.node_count()];
    let mut activated = Vec::with_capacity(seeds.len());
    for &s in seeds {
        if !active[s.index()] {
            active[s.index()] = true;
            activated.push(s);
        }
    }
    let mut head = 0;
    while head < activated.len() {
        let u = activated[head];
        head += 1;
        for (v, p) in graph.out_edges(u) {
            if !active[v.index()] && rng.gen::<f64>() < p {
                active[v.index()] = true;
                activated.push(v);
            }
        }
    }
    Ok(ActivationOutcome {
        seeds: seeds.to_vec(),
        activated,
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of the influence spread `sigma(S)`.
pub fn estimate_spread(
    graph: &InfluenceGraph,
    seeds: &[NodeId],
    num_sims: usize,
    rng: RngStream,
) -> Result<SpreadEstimate> {
    if num_sims == 0 {
        return Err(Error::domain("num_sims must be at least 1"));
    }
    check_seeds(graph, seeds)?;
    if seeds.is_empty() {
        return Ok(SpreadEstimate { mean: 0.0, std_err: 0.0, num_sims });
    }
    let values: Vec<f64> = (0..num_sims)
        .into_par_iter()
        .map(|i| {
            let out = simulate_ic(graph, seeds, rng.stream(i as u64)).expect("seeds validated");
            out.spread() as f64
        })
        .collect();
    let (mean, std_err) = mean_and_se(&values);
    Ok(SpreadEstimate { mean, std_err, num_sims })
}

/// Monte Carlo estimate of the non-overlapping marginal spread of `current`
/// given prior rounds' seed sets: nodes reached by `current` in a fresh
/// live-edge sample that no prior round reached in its own fresh sample.
pub fn estimate_marginal_ni(
    graph: &InfluenceGraph,
    current: &[NodeId],
    priors: &[Vec<NodeId>],
    num_sims: usize,
    rng: RngStream,
) -> Result<SpreadEstimate> {
    if num_sims == 0 {
        return Err(Error::domain("num_sims must be at least 1"));
    }
    check_seeds(graph, current)?;
    for p in priors {
        check_seeds(graph, p)?;
    }
    let values: Vec<f64> = (0..num_sims)
        .into_par_iter()
        .map(|i| {
            let sim = rng.stream(i as u64);
            let mut covered = vec![false; graph.node_count()];
            for (j, prior) in priors.iter().enumerate() {
                let out = simulate_ic(graph, prior, sim.child(&format!("round{j}")))
                    .expect("seeds validated");
                for v in out.activated {
                    covered[v.index()] = true;
                }
            }
            let out = simulate_ic(graph, current, sim.child("current")).expect("seeds validated");
            out.activated.iter().filter(|v| !covered[v.index()]).count() as f64
        })
        .collect();
    let (mean, std_err) = mean_and_se(&values);
    Ok(SpreadEstimate { mean, std_err, num_sims })
}

/// Exact influence spread by enumerating all `2^M` live-edge graphs.
/// Guarded to `M <= 20`.
pub fn exact_spread_small(graph: &InfluenceGraph, seeds: &[NodeId]) -> Result<f64> {
    check_seeds(graph, seeds)?;
    exact::check_edge_budget(graph)?;
    Ok(exact::activation_probabilities(graph, seeds).iter().sum())
}

/// Brute-force live-edge enumeration oracles for small graphs.
pub mod exact {
    use super::*;

    pub(crate) const MAX_EDGES: usize = 20;

    pub(crate) fn check_edge_budget(graph: &InfluenceGraph) -> Result<()> {
        if graph.edge_count() > MAX_EDGES {
            return Err(Error::domain(format!(
                "exact enumeration refused: {} edges exceeds the {} edge cap",
                graph.edge_count(),
                MAX_EDGES
            )));
        }
        Ok(())
    }

    /// Flattened edge list `(source, target, probability)` in a fixed order.
    fn edge_vec(graph: &InfluenceGraph) -> Vec<(u32, u32, f64)> {
        graph
            .nodes()
            .flat_map(|u| graph.out_edges(u).map(move |(v, p)| (u.0, v.0, p)))
            .collect()
    }

    fn reach_under_mask(
        n: usize,
        edges: &[(u32, u32, f64)],
        mask: u32,
        seeds: &[NodeId],
    ) -> Vec<bool> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[u as usize].push(v);
            }
        }
        let mut active = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        for &s in seeds {
            if !active[s.index()] {
                active[s.index()] = true;
                stack.push(s.0);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in &adj[u as usize] {
                if !active[v as usize] {
                    active[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        active
    }

    /// Exact activation probability of every node under seed set `seeds`,
    /// by summing over all live-edge graphs.
    pub fn activation_probabilities(graph: &InfluenceGraph, seeds: &[NodeId]) -> Vec<f64> {
        let n = graph.node_count();
        let edges = edge_vec(graph);
        let m = edges.len();
        assert!(m <= MAX_EDGES, "edge budget checked by callers");
        let mut probs = vec![0.0; n];
        for mask in 0u32..(1u32 << m) {
            let mut pr = 1.0;
            for (i, &(_, _, p)) in edges.iter().enumerate() {
                pr *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
            }
            if pr == 0.0 {
                continue;
            }
            let reach = reach_under_mask(n, &edges, mask, seeds);
            for (v, hit) in reach.into_iter().enumerate() {
                if hit {
                    probs[v] += pr;
                }
            }
        }
        probs
    }

    /// Exact round-weighted non-overlapping influence value of a per-round
    /// seed allocation, by enumerating the full tuple of live-edge graphs
    /// `(L_1, ..., L_T)`. Guarded to `M * T <= 22`.
    pub fn rho_ni_by_tuple_enumeration(
        graph: &InfluenceGraph,
        per_round_seeds: &[Vec<NodeId>],
        weights: &[f64],
    ) -> Result<f64> {
        let t_max = per_round_seeds.len();
        if weights.len() != t_max {
            return Err(Error::domain("weights length must match round count"));
        }
        let m = graph.edge_count();
        if m * t_max > 22 {
            return Err(Error::domain(format!(
                "tuple enumeration refused: M*T = {} exceeds 22",
                m * t_max
            )));
        }
        let n = graph.node_count();
        let edges = edge_vec(graph);
        let masks = 1u64 << (m * t_max);
        let mut total = 0.0;
        for tuple in 0..masks {
            let mut pr = 1.0;
            for t in 0..t_max {
                let mask = (tuple >> (m * t)) as u32 & ((1u32 << m) - 1);
                for (i, &(_, _, p)) in edges.iter().enumerate() {
                    pr *= if mask >> i & 1 == 1 { p } else { 1.0 - p };
                }
            }
            if pr == 0.0 {
                continue;
            }
            // Value of this realization: each node contributes the weight of
            // the earliest round that reaches it.
            let mut value = 0.0;
            let mut covered = vec![false; n];
            for t in 0..t_max {
                let mask = (tuple >> (m * t)) as u32 & ((1u32 << m) - 1);
                let reach = reach_under_mask(n, &edges, mask, &per_round_seeds[t]);
                for v in 0..n {
                    if reach[v] && !covered[v] {
                        covered[v] = true;
                        value += weights[t];
                    }
                }
            }
            total += value * pr;
        }
        Ok(total)
    }

    /// Exact round-weighted non-overlapping influence via per-round activation
    /// probabilities. Rounds use independent live-edge graphs, so a node's
    /// contribution telescopes over the first round that covers it. Cheaper
    /// than tuple enumeration (only `T * 2^M` work) and cross-checked against
    /// it in tests.
    pub fn rho_ni_by_round_probs(
        graph: &InfluenceGraph,
        per_round_seeds: &[Vec<NodeId>],
        weights: &[f64],
    ) -> Result<f64> {
        if weights.len() != per_round_seeds.len() {
            return Err(Error::domain("weights length must match round count"));
        }
        check_edge_budget(graph)?;
        let n = graph.node_count();
        let q: Vec<Vec<f64>> = per_round_seeds
            .iter()
            .map(|seeds| activation_probabilities(graph, seeds))
            .collect();
        let mut total = 0.0;
        for v in 0..n {
            let mut none_before = 1.0;
            for (t, w) in weights.iter().enumerate() {
                total += w * q[t][v] * none_before;
                none_before *= 1.0 - q[t][v];
            }
        }
        Ok(total)
    }
}
