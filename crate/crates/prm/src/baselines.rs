//! Comparison strategies: simple seed-then-place heuristics built on
//! single-round IMM, pure random placement, and a simulation-driven greedy.
//!
//! Every baseline returns a [`SeedAllocation`] for a budget `k` and the
//! scenario horizon, satisfying its setting's disjointness rules exactly and
//! spending `min(k, feasible)` seeds.

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeId};
use crate::popularity::{round_weights, ScenarioConfig, SeedAllocation, Setting, WeightMode};
use crate::rng::RngStream;
use crate::selection::{imm_single_round, ImmParams};

/// Which baseline to run; `sims_per_estimate` applies to `Greedy` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineSpec {
    OneShot,
    UniNs,
    UniOs,
    RandRound,
    RandSeedRound,
    DecNs,
    DecOs,
    Greedy { sims_per_estimate: usize },
}

impl BaselineSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineSpec::OneShot => "oneshot",
            BaselineSpec::UniNs => "uni-ns",
            BaselineSpec::UniOs => "uni-os",
            BaselineSpec::RandRound => "rand-round",
            BaselineSpec::RandSeedRound => "rand-seed-round",
            BaselineSpec::DecNs => "dec-ns",
            BaselineSpec::DecOs => "dec-os",
            BaselineSpec::Greedy { .. } => "greedy",
        }
    }
}

/// NS places ranked nodes into disjoint rounds; OS repeats round-1 seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitVariant {
    Ns,
    Os,
}

/// All seeds in round 1, picked by single-round IMM.
pub fn one_shot(
    graph: &InfluenceGraph,
    _config: &ScenarioConfig,
    k: usize,
    params: &ImmParams,
    rng: RngStream,
) -> Result<SeedAllocation> {
    let seeds = imm_single_round(graph, k, params, rng)?;
    SeedAllocation::new(Setting::Oins, seeds.into_iter().map(|v| (v, 1)).collect())
}

/// Spread the IMM ranking evenly over the horizon. NS: consecutive blocks of
/// size `floor(k/T)`, the first `k mod T` rounds getting one extra, in greedy
/// order. OS: `ceil(k/T)` nodes repeated round after round until the budget
/// runs out.
pub fn uniform_split(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    variant: SplitVariant,
    params: &ImmParams,
    rng: RngStream,
) -> Result<SeedAllocation> {
    let t_max = config.horizon;
    if k == 0 {
        return Ok(SeedAllocation::empty(match variant {
            SplitVariant::Ns => Setting::Oins,
            SplitVariant::Os => Setting::Nios,
        }));
    }
    match variant {
        SplitVariant::Ns => {
            let ranked = imm_single_round(graph, k, params, rng)?;
            let base = k / t_max;
            let extra = k % t_max;
            let mut pairs = Vec::with_capacity(k);
            let mut cursor = 0;
            for t in 1..=t_max {
                let size = base + usize::from(t <= extra);
                for _ in 0..size {
                    if cursor < ranked.len() {
                        pairs.push((ranked[cursor], t));
                        cursor += 1;
                    }
                }
            }
            SeedAllocation::new(Setting::Oins, pairs)
        }
        SplitVariant::Os => {
            let m = k.div_ceil(t_max);
            let ranked = imm_single_round(graph, m, params, rng)?;
            let mut pairs = Vec::with_capacity(k);
            let mut t = 1;
            let mut remaining = k;
            while remaining > 0 {
                for &v in ranked.iter().take(remaining.min(ranked.len())) {
                    pairs.push((v, t));
                }
                remaining -= remaining.min(ranked.len());
                t += 1;
            }
            SeedAllocation::new(Setting::Nios, pairs)
        }
    }
}

/// IMM's top-k nodes, each assigned an independent uniform round.
pub fn rand_round(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    params: &ImmParams,
    rng: RngStream,
) -> Result<SeedAllocation> {
    if k == 0 {
        return Ok(SeedAllocation::empty(Setting::Oins));
    }
    let seeds = imm_single_round(graph, k, params, rng.child("imm"))?;
    let mut r = rng.child("rounds").rng();
    let pairs = seeds
        .into_iter()
        .map(|v| (v, r.gen_range(1..=config.horizon)))
        .collect();
    SeedAllocation::new(Setting::Oins, pairs)
}

/// `k` distinct uniform nodes with independent uniform rounds.
pub fn rand_seed_round(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    rng: RngStream,
) -> Result<SeedAllocation> {
    let n = graph.node_count();
    if k > n {
        return Err(Error::domain(format!("k={k} exceeds N={n}")));
    }
    let mut r = rng.rng();
    let nodes = index_sample(&mut r, n, k);
    let pairs = nodes
        .iter()
        .map(|v| (NodeId(v as u32), r.gen_range(1..=config.horizon)))
        .collect();
    SeedAllocation::new(Setting::Oins, pairs)
}

/// Per-round budgets of the decreasing split: one fifth (rounded up) of the
/// remaining budget each round, any leftover at round `T` dumped there.
pub fn decreasing_budgets(k: usize, t_max: usize) -> Vec<usize> {
    let mut budgets = Vec::new();
    let mut remaining = k;
    for t in 1..=t_max {
        if remaining == 0 {
            break;
        }
        let b = if t == t_max {
            remaining
        } else {
            remaining.div_ceil(5)
        };
        budgets.push(b);
        remaining -= b;
    }
    budgets
}

/// IMM ranking placed by the decreasing-budget rule. OS repeats the round-1
/// seed set with each later round's (smaller) budget.
pub fn decreasing_split(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    variant: SplitVariant,
    params: &ImmParams,
    rng: RngStream,
) -> Result<SeedAllocation> {
    if k == 0 {
        return Ok(SeedAllocation::empty(match variant {
            SplitVariant::Ns => Setting::Oins,
            SplitVariant::Os => Setting::Nios,
        }));
    }
    let budgets = decreasing_budgets(k, config.horizon);
    match variant {
        SplitVariant::Ns => {
            let ranked = imm_single_round(graph, k, params, rng)?;
            let mut pairs = Vec::with_capacity(k);
            let mut cursor = 0;
            for (ti, &b) in budgets.iter().enumerate() {
                for _ in 0..b {
                    if cursor < ranked.len() {
                        pairs.push((ranked[cursor], ti + 1));
                        cursor += 1;
                    }
                }
            }
            SeedAllocation::new(Setting::Oins, pairs)
        }
        SplitVariant::Os => {
            let first = budgets.first().copied().unwrap_or(0);
            let ranked = imm_single_round(graph, first, params, rng)?;
            let mut pairs = Vec::with_capacity(k);
            for (ti, &b) in budgets.iter().enumerate() {
                for &v in ranked.iter().take(b) {
                    pairs.push((v, ti + 1));
                }
            }
            SeedAllocation::new(Setting::Nios, pairs)
        }
    }
}

/// Pre-sampled live-edge masks for one greedy iteration: `masks[s][t]` holds
/// one bit per edge. Shared across candidates so comparisons use common
/// random numbers.
struct LiveEdgeBatch {
    blocks_per_mask: usize,
    bits: Vec<u64>,
    rounds: usize,
}

impl LiveEdgeBatch {
    fn sample(graph: &InfluenceGraph, sims: usize, rounds: usize, rng: RngStream) -> Self {
        let probs: Vec<f64> = graph
            .nodes()
            .flat_map(|u| graph.out_edges(u).map(move |(_, p)| p))
            .collect();
        let m = probs.len();
        let blocks_per_mask = m.div_ceil(64).max(1);
        let mut bits = vec![0u64; blocks_per_mask * sims * rounds];
        for s in 0..sims {
            let mut r = rng.stream(s as u64).rng();
            for t in 0..rounds {
                let off = (s * rounds + t) * blocks_per_mask;
                for (e, &p) in probs.iter().enumerate() {
                    if r.gen::<f64>() < p {
                        bits[off + e / 64] |= 1u64 << (e % 64);
                    }
                }
            }
        }
        LiveEdgeBatch {
            blocks_per_mask,
            bits,
            rounds,
        }
    }

    fn live(&self, s: usize, t: usize, e: usize) -> bool {
        let off = (s * self.rounds + t) * self.blocks_per_mask;
        self.bits[off + e / 64] >> (e % 64) & 1 == 1
    }

    /// Reachable set from `seeds` in the `(s, t)` mask, as a visited bitmap.
    fn reach(&self, n: usize, s: usize, t: usize, seeds: &[NodeId], out_adj: &[Vec<(usize, u32)>]) -> Vec<bool> {
        let mut active = vec![false; n];
        let mut stack = Vec::new();
        for &v in seeds {
            if !active[v.index()] {
                active[v.index()] = true;
                stack.push(v.0);
            }
        }
        while let Some(u) = stack.pop() {
            for &(e, v) in &out_adj[u as usize] {
                if !active[v as usize] && self.live(s, t, e) {
                    active[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        active
    }
}

/// Simulation-estimated greedy over `(node, round)` pairs: each iteration
/// evaluates every feasible candidate's marginal gain of the round-weighted
/// objective on a fresh batch of live-edge samples (common across candidates)
/// and picks the best. Intended for small graphs.
pub fn greedy_simulation(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    sims_per_estimate: usize,
    setting: Setting,
    rng: RngStream,
) -> Result<SeedAllocation> {
    if sims_per_estimate < 1 {
        return Err(Error::domain("sims_per_estimate must be at least 1"));
    }
    let n = graph.node_count();
    let t_max = config.horizon;
    let capacity = if setting.distinct_nodes() { n } else { n * t_max };
    if k > capacity {
        return Err(Error::domain(format!(
            "budget k={k} exceeds the {capacity} feasible picks under {}",
            setting.name()
        )));
    }
    let weights = round_weights(config, WeightMode::Base)?;
    let out_adj: Vec<Vec<(usize, u32)>> = {
        let mut eid = 0;
        graph
            .nodes()
            .map(|u| {
                graph
                    .out_edges(u)
                    .map(|(v, _)| {
                        let e = (eid, v.0);
                        eid += 1;
                        e
                    })
                    .collect()
            })
            .collect()
    };

    let mut rounds: Vec<Vec<NodeId>> = vec![Vec::new(); t_max];
    let mut pairs: Vec<(NodeId, usize)> = Vec::new();
    let mut node_used = vec![false; n];

    for iter in 0..k {
        let batch = LiveEdgeBatch::sample(
            graph,
            sims_per_estimate,
            t_max,
            rng.child(&format!("iter{iter}")),
        );
        // Per-simulation baseline state shared by all candidates.
        let base_reach: Vec<Vec<Vec<bool>>> = (0..sims_per_estimate)
            .into_par_iter()
            .map(|s| {
                (0..t_max)
                    .map(|t| batch.reach(n, s, t, &rounds[t], &out_adj))
                    .collect()
            })
            .collect();
        // Under marginal influence, a node's current earliest covered round
        // per simulation; t_max means "uncovered" (weight 0 sentinel fits
        // weights.at(t_max+1)).
        let earliest: Vec<Vec<usize>> = if setting.marginal_influence() {
            base_reach
                .iter()
                .map(|per_round| {
                    (0..n)
                        .map(|v| {
                            (0..t_max)
                                .find(|&t| per_round[t][v])
                                .map(|t| t + 1)
                                .unwrap_or(t_max + 1)
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };

        let candidates: Vec<(NodeId, usize)> = (0..n as u32)
            .flat_map(|v| (1..=t_max).map(move |t| (NodeId(v), t)))
            .filter(|&(v, t)| {
                if setting.distinct_nodes() {
                    !node_used[v.index()]
                } else {
                    !pairs.contains(&(v, t))
                }
            })
            .collect();
        if candidates.is_empty() {
            break;
        }

        let scored: Vec<((NodeId, usize), f64)> = candidates
            .par_iter()
            .map(|&(v, t)| {
                let mut total = 0.0;
                for s in 0..sims_per_estimate {
                    let add = batch.reach(n, s, t - 1, &[v], &out_adj);
                    if setting.marginal_influence() {
                        for u in 0..n {
                            if add[u] {
                                let cur = earliest[s][u];
                                if t < cur {
                                    total += weights.at(t) - weights.at(cur);
                                }
                            }
                        }
                    } else {
                        let already = &base_reach[s][t - 1];
                        let fresh = (0..n).filter(|&u| add[u] && !already[u]).count();
                        total += weights.at(t) * fresh as f64;
                    }
                }
                ((v, t), total / sims_per_estimate as f64)
            })
            .collect();

        let mut best = scored[0];
        for &cand in &scored[1..] {
            if cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0) {
                best = cand;
            }
        }
        let ((v, t), _) = best;
        pairs.push((v, t));
        rounds[t - 1].push(v);
        node_used[v.index()] = true;
    }

    SeedAllocation::new(
        if setting.distinct_nodes() {
            Setting::Oins
        } else {
            Setting::Nios
        },
        pairs,
    )
}

/// Dispatch a baseline by spec.
pub fn run_baseline(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    k: usize,
    spec: &BaselineSpec,
    params: &ImmParams,
    setting: Setting,
    rng: RngStream,
) -> Result<SeedAllocation> {
    match spec {
        BaselineSpec::OneShot => one_shot(graph, config, k, params, rng),
        BaselineSpec::UniNs => uniform_split(graph, config, k, SplitVariant::Ns, params, rng),
        BaselineSpec::UniOs => uniform_split(graph, config, k, SplitVariant::Os, params, rng),
        BaselineSpec::RandRound => rand_round(graph, config, k, params, rng),
        BaselineSpec::RandSeedRound => rand_seed_round(graph, config, k, rng),
        BaselineSpec::DecNs => decreasing_split(graph, config, k, SplitVariant::Ns, params, rng),
        BaselineSpec::DecOs => decreasing_split(graph, config, k, SplitVariant::Os, params, rng),
        BaselineSpec::Greedy { sims_per_estimate } => {
            greedy_simulation(graph, config, k, *sims_per_estimate, setting, rng)
        }
    }
}
