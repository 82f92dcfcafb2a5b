//! PRM-IMM seed allocation: greedy weighted coverage over RR collections plus
//! the sample-size schedule that backs the approximation guarantee.
//!
//! The sampling side follows the IMM pattern: guess an upper bound `x_i` on
//! the optimum and halve it per iteration, growing the collection to
//! `theta_i` samples, until the greedy solution's estimate certifies a lower
//! bound `LB`; then regenerate a fresh collection of `theta~` samples sized
//! by `LB` and run the greedy once more. Under non-overlapping seeds the
//! feasible sets form a partition matroid (one round per node) and greedy is
//! a 1/2 approximation of the surrogate optimum; under overlapping seeds the
//! constraint is a plain cardinality bound and greedy gives `1 - 1/e`.
//!
//! Node selection is deterministic: ties in the lazy-greedy heap break toward
//! the lowest `(node, round)` pair, so a fixed RNG stream fixes the output.

use std::collections::BinaryHeap;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeId};
use crate::popularity::{
    round_weights, RoundWeights, ScenarioConfig, SeedAllocation, Setting, WeightMode,
};
use crate::rng::RngStream;
use crate::sampling::{rho_hat, rho_hat_ni, CollectionKind, RRCollection, RRSampler};

/// Parameters of the sampling guarantee: with probability at least
/// `1 - 1/N^ell` the output surrogate value is within the setting's greedy
/// factor (minus `epsilon`) of optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmParams {
    pub k: usize,
    pub epsilon: f64,
    pub ell: f64,
    /// Override for the halving-phase accuracy; defaults to `sqrt(2)*epsilon`.
    pub epsilon_prime: Option<f64>,
}

impl ImmParams {
    pub fn new(k: usize, epsilon: f64, ell: f64) -> Result<Self> {
        let p = ImmParams {
            k,
            epsilon,
            ell,
            epsilon_prime: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::domain("budget k must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain("epsilon must lie in (0,1)"));
        }
        if !(self.ell > 0.0) {
            return Err(Error::domain("ell must be positive"));
        }
        if let Some(ep) = self.epsilon_prime {
            if !(ep > 0.0) {
                return Err(Error::domain("epsilon_prime override must be positive"));
            }
        }
        Ok(())
    }

    pub fn with_k(&self, k: usize) -> Self {
        ImmParams { k, ..self.clone() }
    }

    pub fn eps_prime(&self) -> f64 {
        self.epsilon_prime
            .unwrap_or(std::f64::consts::SQRT_2 * self.epsilon)
    }
}

/// One halving iteration of the sampling schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct HalvingIteration {
    pub iteration: usize,
    pub x_i: f64,
    pub theta_i: usize,
    pub rho_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PickRecord {
    pub node: NodeId,
    pub round: usize,
    pub gain: f64,
}

/// Internals of a PRM-IMM run, for reporting and re-verification.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub iterations: Vec<HalvingIteration>,
    pub lower_bound: f64,
    pub theta_final: usize,
    pub picks: Vec<PickRecord>,
}

impl SelectionTrace {
    /// Flat `key=value` log lines, one record per line.
    pub fn log_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for it in &self.iterations {
            lines.push(format!(
                "halving i={} x_i={} theta_i={} rho_hat={}",
                it.iteration, it.x_i, it.theta_i, it.rho_hat
            ));
        }
        lines.push(format!(
            "final lb={} theta_final={}",
            self.lower_bound, self.theta_final
        ));
        for p in &self.picks {
            lines.push(format!("pick node={} round={} gain={}", p.node, p.round, p.gain));
        }
        lines
    }
}

/// Greedy output: pairs in selection order with their recorded marginal
/// coverage gains (unnormalized, in weight units).
#[derive(Debug, Clone, PartialEq)]
pub struct GreedySelection {
    pub pairs: Vec<(NodeId, usize)>,
    pub gains: Vec<f64>,
}

impl GreedySelection {
    pub fn covered_weight(&self) -> f64 {
        self.gains.iter().sum()
    }
}

// Lazy-greedy heap entry; max-heap order: larger gain first, then lower node,
// then lower round.
#[derive(PartialEq)]
struct HeapEntry {
    gain: f64,
    node: u32,
    round: u16,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.round.cmp(&self.round))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn check_caps(caps: Option<&[usize]>, t_max: usize) -> Result<()> {
    if let Some(c) = caps {
        if c.len() != t_max {
            return Err(Error::domain(format!(
                "per-round budget vector has {} entries, expected {}",
                c.len(),
                t_max
            )));
        }
    }
    Ok(())
}

/// Greedy selection of up to `k` pairs under non-overlapping seeds: once a
/// node is chosen in any round it leaves the candidate set entirely. Each
/// covered sample is counted once. Returns `min(k, feasible)` pairs.
pub fn node_selection_oins(
    coll: &RRCollection,
    k: usize,
    weights: &RoundWeights,
) -> Result<GreedySelection> {
    node_selection_oins_with_caps(coll, k, weights, None)
}

/// [`node_selection_oins`] with an optional per-round capacity vector; a pick
/// into a full round is skipped in the argmax.
pub fn node_selection_oins_with_caps(
    coll: &RRCollection,
    k: usize,
    weights: &RoundWeights,
    caps: Option<&[usize]>,
) -> Result<GreedySelection> {
    if coll.kind() != CollectionKind::PairWise {
        return Err(Error::domain("OINS selection needs a pair-wise collection"));
    }
    let n = coll.node_count();
    let t_max = coll.horizon();
    if k > n {
        return Err(Error::domain(format!(
            "budget k={k} exceeds N={n}; non-overlapping seeds cap the budget at N"
        )));
    }
    if weights.rounds() != t_max {
        return Err(Error::domain("weights must cover the collection horizon"));
    }
    check_caps(caps, t_max)?;

    let mut counts: Vec<u32> = vec![0; n * t_max];
    for v in 0..n as u32 {
        for t in 1..=t_max {
            counts[v as usize * t_max + t - 1] = coll.covering(NodeId(v), t).len() as u32;
        }
    }
    let mut heap: BinaryHeap<HeapEntry> = (0..n as u32)
        .flat_map(|v| {
            (1..=t_max).map(move |t| (v, t as u16))
        })
        .map(|(v, t)| HeapEntry {
            gain: weights.at(t as usize) * counts[v as usize * t_max + t as usize - 1] as f64,
            node: v,
            round: t,
        })
        .collect();

    let mut covered = vec![false; coll.theta()];
    let mut node_used = vec![false; n];
    let mut round_load = vec![0usize; t_max];
    let mut pairs = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);

    while pairs.len() < k {
        let Some(entry) = heap.pop() else { break };
        if node_used[entry.node as usize] {
            continue;
        }
        let t = entry.round as usize;
        if let Some(c) = caps {
            if round_load[t - 1] >= c[t - 1] {
                continue;
            }
        }
        let pair = entry.node as usize * t_max + t - 1;
        let current = weights.at(t) * counts[pair] as f64;
        if entry.gain > current {
            heap.push(HeapEntry {
                gain: current,
                node: entry.node,
                round: entry.round,
            });
            continue;
        }
        // Fresh maximum: select it.
        let v = NodeId(entry.node);
        pairs.push((v, t));
        gains.push(current);
        node_used[entry.node as usize] = true;
        round_load[t - 1] += 1;
        for &i in coll.covering(v, t) {
            if covered[i as usize] {
                continue;
            }
            covered[i as usize] = true;
            let (round, members) = coll.pw_sample(i as usize);
            for &u in members {
                counts[u as usize * t_max + round - 1] -= 1;
            }
        }
    }

    Ok(GreedySelection { pairs, gains })
}

/// Greedy selection of up to `k` pairs under overlapping seeds and
/// non-overlapping influence. Every `(node, round)` pair not yet chosen stays
/// a candidate; marginal counters follow the earliest-covered-round rule: a
/// sample whose root is already reached in round `t_R` only grants a pair
/// `(u, t')` the weight difference `w_{t'} - w_{t_R}` (nothing for
/// `t' >= t_R`), with `w_{T+1} = 0`.
pub fn node_selection_nios(
    coll: &RRCollection,
    k: usize,
    weights: &RoundWeights,
) -> Result<GreedySelection> {
    node_selection_nios_with_caps(coll, k, weights, None)
}

/// [`node_selection_nios`] with an optional per-round capacity vector.
///
/// Marginal counters are kept lazily: the authoritative state is each
/// sample's earliest covered round, and a candidate's counter is recomputed
/// from it as an ordered sum over the inverted index. Every term of that sum
/// only shrinks as picks accumulate, and floating-point summation is monotone
/// under term-wise domination, so stale heap priorities are true upper bounds
/// and the pop-recompute-repush loop returns the exact argmax with
/// reproducible tie-breaking.
pub fn node_selection_nios_with_caps(
    coll: &RRCollection,
    k: usize,
    weights: &RoundWeights,
    caps: Option<&[usize]>,
) -> Result<GreedySelection> {
    if coll.kind() != CollectionKind::MultiRound {
        return Err(Error::domain("NIOS selection needs a multi-round collection"));
    }
    let n = coll.node_count();
    let t_max = coll.horizon();
    if k > n * t_max {
        return Err(Error::domain(format!(
            "budget k={k} exceeds the {} candidate pairs",
            n * t_max
        )));
    }
    if weights.rounds() != t_max {
        return Err(Error::domain("weights must cover the collection horizon"));
    }
    check_caps(caps, t_max)?;

    let sentinel = (t_max + 1) as u16;
    let mut earliest = vec![sentinel; coll.theta()];
    // Remaining marginal value of pair (v,t): for each sample containing it,
    // the weight improvement from covering the root at round t instead of its
    // current earliest round (w_{T+1} = 0 for uncovered roots).
    let counter = |v: u32, t: usize, earliest: &[u16]| -> f64 {
        coll.covering(NodeId(v), t)
            .iter()
            .map(|&i| {
                let cur = earliest[i as usize];
                if (t as u16) < cur {
                    weights.at(t) - weights.at(cur as usize)
                } else {
                    0.0
                }
            })
            .sum()
    };

    let mut heap: BinaryHeap<HeapEntry> = (0..n as u32)
        .flat_map(|v| (1..=t_max).map(move |t| (v, t as u16)))
        .map(|(v, t)| HeapEntry {
            gain: counter(v, t as usize, &earliest),
            node: v,
            round: t,
        })
        .collect();

    let mut picked = vec![false; n * t_max];
    let mut round_load = vec![0usize; t_max];
    let mut pairs = Vec::with_capacity(k);
    let mut gains = Vec::with_capacity(k);

    while pairs.len() < k {
        let Some(entry) = heap.pop() else { break };
        let t = entry.round as usize;
        let pair = entry.node as usize * t_max + t - 1;
        if picked[pair] {
            continue;
        }
        if let Some(c) = caps {
            if round_load[t - 1] >= c[t - 1] {
                continue;
            }
        }
        let current = counter(entry.node, t, &earliest);
        if entry.gain > current {
            heap.push(HeapEntry {
                gain: current,
                node: entry.node,
                round: entry.round,
            });
            continue;
        }
        let v = NodeId(entry.node);
        pairs.push((v, t));
        gains.push(current);
        picked[pair] = true;
        round_load[t - 1] += 1;
        for &i in coll.covering(v, t) {
            let cur = earliest[i as usize];
            earliest[i as usize] = cur.min(t as u16);
        }
    }

    Ok(GreedySelection { pairs, gains })
}

fn ln_choose(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Oins,
    Nios,
}

fn solution_space_beta(mode: Mode, n: usize, k: usize, t_max: usize, alpha: f64) -> f64 {
    match mode {
        // k nodes out of N, each placed in one of T rounds.
        Mode::Oins => (0.5 * (ln_choose(n, k) + alpha * alpha + k as f64 * (t_max as f64).ln())).sqrt(),
        // k pairs out of all N*T.
        Mode::Nios => (0.5 * (ln_choose(n * t_max, k) + alpha * alpha)).sqrt(),
    }
}

fn run_prm_imm(
    graph: &InfluenceGraph,
    weights: &RoundWeights,
    params: &ImmParams,
    mode: Mode,
    rng: RngStream,
) -> Result<(GreedySelection, SelectionTrace)> {
    params.validate()?;
    let n = graph.node_count();
    let t_max = weights.rounds();
    if n < 2 {
        return Err(Error::domain("need at least two nodes"));
    }
    match mode {
        Mode::Oins if params.k > n => {
            return Err(Error::domain(format!(
                "budget k={} exceeds N={n} under non-overlapping seeds",
                params.k
            )))
        }
        Mode::Nios if params.k > n * t_max => {
            return Err(Error::domain(format!(
                "budget k={} exceeds the {} candidate pairs",
                params.k,
                n * t_max
            )))
        }
        _ => {}
    }

    let k = params.k;
    let eps = params.epsilon;
    let eps_p = params.eps_prime();
    let nf = n as f64;
    let alpha = (params.ell * nf.ln() + 4f64.ln()).sqrt();
    let beta = solution_space_beta(mode, n, k, t_max, alpha);
    // Scale of one sample's contribution: the estimator multiplies coverage
    // by N*T/theta for round-tagged samples and N/theta for multi-round ones.
    let sample_scale = match mode {
        Mode::Oins => weights.first() * nf * t_max as f64,
        Mode::Nios => weights.first() * nf,
    };
    let kind = match mode {
        Mode::Oins => CollectionKind::PairWise,
        Mode::Nios => CollectionKind::MultiRound,
    };
    let select = |coll: &RRCollection| -> Result<GreedySelection> {
        match mode {
            Mode::Oins => node_selection_oins(coll, k, weights),
            Mode::Nios => node_selection_nios(coll, k, weights),
        }
    };
    let estimate = |coll: &RRCollection, sel: &GreedySelection| -> Result<f64> {
        let setting = match mode {
            Mode::Oins => Setting::Oins,
            Mode::Nios => Setting::Nios,
        };
        let alloc = SeedAllocation::new(setting, sel.pairs.clone())?;
        match mode {
            Mode::Oins => rho_hat(coll, &alloc, weights),
            Mode::Nios => rho_hat_ni(coll, &alloc, weights),
        }
    };

    let mut sampler = RRSampler::new(graph, t_max, rng.child("rr-sampling"));
    let mut coll = RRCollection::new(kind, graph, t_max);
    let mut lb = weights.first();
    let mut iterations = Vec::new();
    let max_i = n.ilog2() as usize - 1;
    let ln_log2_n = nf.log2().ln();
    for i in 1..=max_i {
        let x_i = weights.sum() * nf / 2f64.powi(i as i32);
        let theta_i = (sample_scale * (2.0 + 2.0 / 3.0 * eps_p) * (ln_log2_n + 2.0 * beta * beta)
            / (eps_p * eps_p * x_i))
            .ceil() as usize;
        let add = theta_i.saturating_sub(coll.theta());
        sampler.extend(&mut coll, add)?;
        let sel = select(&coll)?;
        let rho = estimate(&coll, &sel)?;
        iterations.push(HalvingIteration {
            iteration: i,
            x_i,
            theta_i,
            rho_hat: rho,
        });
        if rho >= (1.0 + eps_p) * x_i {
            lb = (rho / (1.0 + eps_p)).max(weights.first());
            break;
        }
    }

    let theta_final = (2.0 * sample_scale * (0.5 * alpha + beta) * (0.5 * alpha + beta)
        / (lb * eps * eps))
        .ceil() as usize;
    // Fresh samples keep the final collection independent of the halving phase.
    let mut final_coll = RRCollection::new(kind, graph, t_max);
    sampler.extend(&mut final_coll, theta_final)?;
    let sel = select(&final_coll)?;
    let picks = sel
        .pairs
        .iter()
        .zip(&sel.gains)
        .map(|(&(node, round), &gain)| PickRecord { node, round, gain })
        .collect();
    let trace = SelectionTrace {
        iterations,
        lower_bound: lb,
        theta_final,
        picks,
    };
    Ok((sel, trace))
}

/// PRM-IMM under non-overlapping seeds with explicit weights.
pub fn prm_imm_oins_with_weights(
    graph: &InfluenceGraph,
    weights: &RoundWeights,
    params: &ImmParams,
    rng: RngStream,
) -> Result<(SeedAllocation, SelectionTrace)> {
    let (sel, trace) = run_prm_imm(graph, weights, params, Mode::Oins, rng)?;
    Ok((SeedAllocation::new(Setting::Oins, sel.pairs)?, trace))
}

/// PRM-IMM under non-overlapping seeds, weights derived from the scenario.
pub fn prm_imm_oins(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    params: &ImmParams,
    rng: RngStream,
) -> Result<(SeedAllocation, SelectionTrace)> {
    let weights = round_weights(config, WeightMode::Base)?;
    prm_imm_oins_with_weights(graph, &weights, params, rng)
}

/// PRM-IMM under overlapping seeds / non-overlapping influence with explicit
/// weights.
pub fn prm_imm_nios_with_weights(
    graph: &InfluenceGraph,
    weights: &RoundWeights,
    params: &ImmParams,
    rng: RngStream,
) -> Result<(SeedAllocation, SelectionTrace)> {
    let (sel, trace) = run_prm_imm(graph, weights, params, Mode::Nios, rng)?;
    Ok((SeedAllocation::new(Setting::Nios, sel.pairs)?, trace))
}

/// PRM-IMM under overlapping seeds, weights derived from the scenario.
pub fn prm_imm_nios(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    params: &ImmParams,
    rng: RngStream,
) -> Result<(SeedAllocation, SelectionTrace)> {
    let weights = round_weights(config, WeightMode::Base)?;
    prm_imm_nios_with_weights(graph, &weights, params, rng)
}

/// Classic single-round influence maximization: the `T = 1`, unit-weight
/// specialization. Returns the seeds in greedy pick order.
pub fn imm_single_round(
    graph: &InfluenceGraph,
    k: usize,
    params: &ImmParams,
    rng: RngStream,
) -> Result<Vec<NodeId>> {
    let weights = RoundWeights::new(vec![1.0])?;
    let (sel, _) = run_prm_imm(graph, &weights, &params.with_k(k), Mode::Oins, rng)?;
    Ok(sel.pairs.into_iter().map(|(v, _)| v).collect())
}
