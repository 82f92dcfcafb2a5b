//! PA-IC popularity dynamics and the round-weighted surrogate objective.
//!
//! Two items split a natural customer inflow proportionally to their current
//! popularity (preferential attachment), while the novice item adds the
//! expected reach of its per-round seed sets. The end-of-horizon popularity
//! ratio has a closed product form when the popular item is passive; its
//! first-order simplification is a weighted sum of per-round spreads, the
//! objective everything in [`crate::selection`] maximizes.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::diffusion::simulate_ic;
use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeId};
use crate::rng::RngStream;

/// Natural growth: one customer count for all rounds, or one per round.
#[derive(Debug, Clone, PartialEq)]
pub enum Growth {
    Constant(f64),
    PerRound(Vec<f64>),
}

/// Scenario parameters: initial popularities, natural growth, horizon, and an
/// optional known promotion schedule for the popular item.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub d0n: f64,
    pub d0p: f64,
    pub growth: Growth,
    pub horizon: usize,
    pub competitor_promo: Option<Vec<f64>>,
}

impl ScenarioConfig {
    pub fn new(d0n: f64, d0p: f64, z: f64, horizon: usize) -> Result<Self> {
        let cfg = ScenarioConfig {
            d0n,
            d0p,
            growth: Growth::Constant(z),
            horizon,
            competitor_promo: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_growth_vector(d0n: f64, d0p: f64, z: Vec<f64>, horizon: usize) -> Result<Self> {
        let cfg = ScenarioConfig {
            d0n,
            d0p,
            growth: Growth::PerRound(z),
            horizon,
            competitor_promo: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_promo(mut self, promo: Vec<f64>) -> Result<Self> {
        self.competitor_promo = Some(promo);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d0n >= 0.0) {
            return Err(Error::domain("d0n must be non-negative"));
        }
        if !(self.d0p > 0.0) {
            return Err(Error::domain("d0p must be positive"));
        }
        if self.d0n + self.d0p <= 0.0 {
            return Err(Error::domain("initial total popularity must be positive"));
        }
        if self.horizon < 1 {
            return Err(Error::domain("horizon T must be at least 1"));
        }
        match &self.growth {
            Growth::Constant(z) => {
                if !(*z >= 0.0) {
                    return Err(Error::domain("growth z must be non-negative"));
                }
            }
            Growth::PerRound(zs) => {
                if zs.len() != self.horizon {
                    return Err(Error::domain(format!(
                        "growth vector length {} must equal T={}",
                        zs.len(),
                        self.horizon
                    )));
                }
                if zs.iter().any(|z| !(*z >= 0.0)) {
                    return Err(Error::domain("growth entries must be non-negative"));
                }
            }
        }
        if let Some(promo) = &self.competitor_promo {
            if promo.len() != self.horizon {
                return Err(Error::domain(format!(
                    "promotion vector length {} must equal T={}",
                    promo.len(),
                    self.horizon
                )));
            }
            if promo.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::domain("promotion entries must be non-negative"));
            }
        }
        Ok(())
    }

    /// Natural growth count of round `t` (1-based).
    pub fn z_at(&self, t: usize) -> f64 {
        debug_assert!(t >= 1 && t <= self.horizon);
        match &self.growth {
            Growth::Constant(z) => *z,
            Growth::PerRound(zs) => zs[t - 1],
        }
    }

    /// Total natural growth through round `t`.
    pub fn cumulative_growth(&self, t: usize) -> f64 {
        match &self.growth {
            Growth::Constant(z) => z * t as f64,
            Growth::PerRound(zs) => zs[..t].iter().sum(),
        }
    }

    /// Promotion of the popular item in round `t` (1-based), zero if passive.
    pub fn promo_at(&self, t: usize) -> f64 {
        self.competitor_promo
            .as_ref()
            .map_or(0.0, |p| p[t - 1])
    }

    pub fn cumulative_promo(&self, t: usize) -> f64 {
        self.competitor_promo
            .as_ref()
            .map_or(0.0, |p| p[..t].iter().sum())
    }

    pub fn has_active_promo(&self) -> bool {
        self.competitor_promo
            .as_ref()
            .is_some_and(|p| p.iter().any(|&x| x > 0.0))
    }

    pub fn initial_total(&self) -> f64 {
        self.d0n + self.d0p
    }

    pub fn initial_ratio(&self) -> f64 {
        self.d0n / self.d0p
    }

    pub fn initial_state(&self) -> PopularityState {
        PopularityState {
            round: 0,
            novice: self.d0n,
            popular: self.d0p,
        }
    }
}

impl ScenarioConfig {
    /// Build from flat `key = value` pairs: `d0n`, `d0p`, `z` or `z_vec`
    /// (comma-separated), `T`, optional `promo_vec`. Unrelated keys are left
    /// to the caller; missing or conflicting scenario keys are errors.
    pub fn from_kv(map: &std::collections::HashMap<String, String>) -> Result<Self> {
        fn num(map: &std::collections::HashMap<String, String>, key: &str) -> Result<f64> {
            let raw = map
                .get(key)
                .ok_or_else(|| Error::domain(format!("missing scenario key '{key}'")))?;
            raw.parse()
                .map_err(|_| Error::domain(format!("invalid number for '{key}': '{raw}'")))
        }
        fn vec_of(raw: &str, key: &str) -> Result<Vec<f64>> {
            raw.split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::domain(format!("invalid entry in '{key}': '{s}'")))
                })
                .collect()
        }
        let horizon: usize = map
            .get("T")
            .ok_or_else(|| Error::domain("missing scenario key 'T'"))?
            .parse()
            .map_err(|_| Error::domain("invalid 'T'"))?;
        let growth = match (map.get("z"), map.get("z_vec")) {
            (Some(_), Some(_)) => {
                return Err(Error::domain("give either 'z' or 'z_vec', not both"))
            }
            (Some(_), None) => Growth::Constant(num(map, "z")?),
            (None, Some(raw)) => Growth::PerRound(vec_of(raw, "z_vec")?),
            (None, None) => return Err(Error::domain("missing scenario key 'z' (or 'z_vec')")),
        };
        let cfg = ScenarioConfig {
            d0n: num(map, "d0n")?,
            d0p: num(map, "d0p")?,
            growth,
            horizon,
            competitor_promo: match map.get("promo_vec") {
                Some(raw) => Some(vec_of(raw, "promo_vec")?),
                None => None,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Scenario keys this type consumes in [`ScenarioConfig::from_kv`].
    pub fn kv_keys() -> &'static [&'static str] {
        &["d0n", "d0p", "z", "z_vec", "T", "promo_vec"]
    }

    /// Flat `key = value` rendering, the inverse of [`ScenarioConfig::from_kv`].
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("d0n = {}\n", self.d0n));
        out.push_str(&format!("d0p = {}\n", self.d0p));
        match &self.growth {
            Growth::Constant(z) => out.push_str(&format!("z = {z}\n")),
            Growth::PerRound(zs) => {
                let parts: Vec<String> = zs.iter().map(f64::to_string).collect();
                out.push_str(&format!("z_vec = {}\n", parts.join(",")));
            }
        }
        out.push_str(&format!("T = {}\n", self.horizon));
        if let Some(promo) = &self.competitor_promo {
            let parts: Vec<String> = promo.iter().map(f64::to_string).collect();
            out.push_str(&format!("promo_vec = {}\n", parts.join(",")));
        }
        out
    }
}

/// Popularity of both items at the end of a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopularityState {
    pub round: usize,
    pub novice: f64,
    pub popular: f64,
}

impl PopularityState {
    pub fn ratio(&self) -> f64 {
        self.novice / self.popular
    }
}

/// One round of the expectation-form growth recursion: proportional natural
/// growth plus the novice's promotion increment and the popular item's
/// (optional) promotion result.
pub fn pa_step(
    state: PopularityState,
    sigma_increment: f64,
    z_t: f64,
    p_t: f64,
) -> Result<PopularityState> {
    let total = state.novice + state.popular;
    if total <= 0.0 {
        return Err(Error::domain("total popularity must be positive"));
    }
    Ok(PopularityState {
        round: state.round + 1,
        novice: state.novice + sigma_increment + z_t * state.novice / total,
        popular: state.popular + z_t * state.popular / total + p_t,
    })
}

fn check_sigmas(config: &ScenarioConfig, sigmas: &[f64]) -> Result<()> {
    if sigmas.len() != config.horizon {
        return Err(Error::domain(format!(
            "expected {} per-round spreads, got {}",
            config.horizon,
            sigmas.len()
        )));
    }
    Ok(())
}

/// Closed-form final ratio for a passive popular item:
/// `(r0+1) * prod_t (1 + sigma_t / (d0n + d0p + Z_t + sum_{i<t} sigma_i)) - 1`
/// with `Z_t` the total natural growth through round `t`.
pub fn ratio_oi_closed_form(config: &ScenarioConfig, sigmas: &[f64]) -> Result<f64> {
    check_sigmas(config, sigmas)?;
    if config.has_active_promo() {
        return Err(Error::domain(
            "closed-form ratio requires a passive popular item; use the bound forms for promotion schedules",
        ));
    }
    let mut product = config.initial_ratio() + 1.0;
    let mut promoted_so_far = 0.0;
    for (i, &sigma) in sigmas.iter().enumerate() {
        let t = i + 1;
        let denom = config.initial_total() + config.cumulative_growth(t) + promoted_so_far;
        product *= 1.0 + sigma / denom;
        promoted_so_far += sigma;
    }
    Ok(product - 1.0)
}

/// Final ratio by folding [`pa_step`] round by round. Honors a promotion
/// schedule when one is present; without one it agrees with
/// [`ratio_oi_closed_form`] to floating-point accuracy.
pub fn ratio_via_iteration(config: &ScenarioConfig, sigmas: &[f64]) -> Result<f64> {
    Ok(iterate_states(config, sigmas)?.last().unwrap().ratio())
}

/// Full trajectory of the expectation-form recursion (round 0 through T).
pub fn iterate_states(config: &ScenarioConfig, sigmas: &[f64]) -> Result<Vec<PopularityState>> {
    check_sigmas(config, sigmas)?;
    let mut states = Vec::with_capacity(config.horizon + 1);
    let mut state = config.initial_state();
    states.push(state);
    for (i, &sigma) in sigmas.iter().enumerate() {
        let t = i + 1;
        state = pa_step(state, sigma, config.z_at(t), config.promo_at(t))?;
        states.push(state);
    }
    Ok(states)
}

/// Which denominator the per-round weights use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// `w_t = 1 / (d0n + d0p + Z_t)`; assumes a passive popular item.
    Base,
    /// Optimistic weights under a known promotion schedule:
    /// `1 / (d0n + d0p + Z_t + P_t)` with `P_t` the promotion through round t.
    SandwichUpper,
    /// Pessimistic counterpart: `1 / (d0n + d0p + Z_t + P_t + p_t)`.
    SandwichLower,
}

/// Non-negative, non-increasing per-round weights `w_1 >= ... >= w_T >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundWeights(Vec<f64>);

impl RoundWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::domain("weights must cover at least one round"));
        }
        if w.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::domain("weights must be finite and non-negative"));
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::domain("weights must be non-increasing over rounds"));
        }
        Ok(RoundWeights(w))
    }

    pub fn rounds(&self) -> usize {
        self.0.len()
    }

    /// Weight of round `t` (1-based); `t = T+1` is the zero sentinel.
    pub fn at(&self, t: usize) -> f64 {
        debug_assert!(t >= 1 && t <= self.0.len() + 1);
        if t > self.0.len() {
            0.0
        } else {
            self.0[t - 1]
        }
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-round weights for the surrogate objective under the requested mode.
pub fn round_weights(config: &ScenarioConfig, mode: WeightMode) -> Result<RoundWeights> {
    if mode != WeightMode::Base && config.competitor_promo.is_none() {
        return Err(Error::domain(
            "sandwich weights require a promotion schedule in the scenario",
        ));
    }
    let w = (1..=config.horizon)
        .map(|t| {
            let mut denom = config.initial_total() + config.cumulative_growth(t);
            match mode {
                WeightMode::Base => {}
                WeightMode::SandwichUpper => denom += config.cumulative_promo(t),
                WeightMode::SandwichLower => {
                    denom += config.cumulative_promo(t) + config.promo_at(t)
                }
            }
            1.0 / denom
        })
        .collect();
    RoundWeights::new(w)
}

/// Round-weighted influence: `sum_t w_t * sigma_t`.
pub fn surrogate_rho_oi(weights: &RoundWeights, sigmas: &[f64]) -> Result<f64> {
    if weights.rounds() != sigmas.len() {
        return Err(Error::domain(format!(
            "weights cover {} rounds but {} spreads were given",
            weights.rounds(),
            sigmas.len()
        )));
    }
    Ok(weights
        .as_slice()
        .iter()
        .zip(sigmas)
        .map(|(w, s)| w * s)
        .sum())
}

/// Predicted final ratio from a surrogate value: `(1 + rho) * (r0 + 1) - 1`.
pub fn ratio_from_surrogate(config: &ScenarioConfig, rho: f64) -> f64 {
    (1.0 + rho) * (config.initial_ratio() + 1.0) - 1.0
}

/// The four seed/influence overlap regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// Overlapping influence, non-overlapping seeds.
    Oins,
    /// Non-overlapping influence, overlapping seeds.
    Nios,
    /// Overlapping influence, overlapping seeds.
    Oios,
    /// Non-overlapping influence, non-overlapping seeds.
    Nins,
}

impl Setting {
    /// Non-overlapping seeds: a node may be seeded in at most one round.
    pub fn distinct_nodes(self) -> bool {
        matches!(self, Setting::Oins | Setting::Nins)
    }

    /// Non-overlapping influence: per-round spreads are marginal over the
    /// union of previous rounds' activations.
    pub fn marginal_influence(self) -> bool {
        matches!(self, Setting::Nios | Setting::Nins)
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::Oins => "OINS",
            Setting::Nios => "NIOS",
            Setting::Oios => "OIOS",
            Setting::Nins => "NINS",
        }
    }
}

impl std::str::FromStr for Setting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "OINS" => Ok(Setting::Oins),
            "NIOS" => Ok(Setting::Nios),
            "OIOS" => Ok(Setting::Oios),
            "NINS" => Ok(Setting::Nins),
            other => Err(Error::domain(format!(
                "unknown setting '{other}' (expected OINS, NIOS, OIOS or NINS)"
            ))),
        }
    }
}

/// A set of `(node, round)` promotion assignments under a setting's
/// disjointness rules.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedAllocation {
    setting: Setting,
    pairs: Vec<(NodeId, usize)>,
}

impl SeedAllocation {
    /// Validate and wrap a pair list. Rounds are 1-based. Under
    /// non-overlapping seeds all node values must be distinct; otherwise the
    /// `(node, round)` pairs must be distinct.
    pub fn new(setting: Setting, pairs: Vec<(NodeId, usize)>) -> Result<Self> {
        if pairs.iter().any(|&(_, t)| t < 1) {
            return Err(Error::domain("allocation rounds are 1-based"));
        }
        if setting.distinct_nodes() {
            let mut nodes: Vec<NodeId> = pairs.iter().map(|&(v, _)| v).collect();
            nodes.sort_unstable();
            if nodes.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::domain(format!(
                    "{} forbids seeding the same node in multiple rounds",
                    setting.name()
                )));
            }
        } else {
            let mut ps = pairs.clone();
            ps.sort_unstable_by_key(|&(v, t)| (v, t));
            if ps.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::domain("duplicate (node, round) pair in allocation"));
            }
        }
        Ok(SeedAllocation { setting, pairs })
    }

    pub fn empty(setting: Setting) -> Self {
        SeedAllocation {
            setting,
            pairs: Vec::new(),
        }
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    /// Pairs in selection order.
    pub fn pairs(&self) -> &[(NodeId, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn max_round(&self) -> usize {
        self.pairs.iter().map(|&(_, t)| t).max().unwrap_or(0)
    }

    /// Seed sets split by round, `per_round[t-1]` for round `t`.
    pub fn per_round(&self, horizon: usize) -> Result<Vec<Vec<NodeId>>> {
        if self.max_round() > horizon {
            return Err(Error::domain(format!(
                "allocation uses round {} beyond horizon {}",
                self.max_round(),
                horizon
            )));
        }
        let mut rounds = vec![Vec::new(); horizon];
        for &(v, t) in &self.pairs {
            rounds[t - 1].push(v);
        }
        Ok(rounds)
    }

    pub fn seed_count_by_round(&self, horizon: usize) -> Result<Vec<usize>> {
        Ok(self.per_round(horizon)?.iter().map(Vec::len).collect())
    }
}

/// Monte Carlo evaluation of an allocation under the expectation-form
/// recursion.
#[derive(Debug, Clone)]
pub struct AllocationEvaluation {
    pub final_ratio: f64,
    /// Batch-based standard error of the final ratio.
    pub ratio_std_err: f64,
    /// Per-round spread estimates (mean, standard error).
    pub per_round_sigma: Vec<(f64, f64)>,
    pub states: Vec<PopularityState>,
    pub num_sims: usize,
}

/// Estimate the final popularity ratio of an allocation. Overlapping-influence
/// settings use each round's plain spread; non-overlapping settings use the
/// marginal spread over the union of previous rounds' activations, realized
/// with fresh live-edge draws per round within each simulation.
pub fn evaluate_allocation(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    allocation: &SeedAllocation,
    num_sims: usize,
    rng: RngStream,
) -> Result<AllocationEvaluation> {
    if num_sims == 0 {
        return Err(Error::domain("num_sims must be at least 1"));
    }
    let horizon = config.horizon;
    let rounds = allocation.per_round(horizon)?;
    for seeds in &rounds {
        for &s in seeds {
            if !graph.contains(s) {
                return Err(Error::domain(format!("seed {s} outside the graph")));
            }
        }
    }
    let marginal = allocation.setting().marginal_influence();

    // One row of per-round increments per simulation.
    let per_sim: Vec<Vec<f64>> = (0..num_sims)
        .into_par_iter()
        .map(|i| {
            let sim = rng.stream(i as u64);
            let mut covered = vec![false; graph.node_count()];
            let mut row = Vec::with_capacity(horizon);
            for (ti, seeds) in rounds.iter().enumerate() {
                if seeds.is_empty() {
                    row.push(0.0);
                    continue;
                }
                let out = simulate_ic(graph, seeds, sim.child(&format!("round{ti}")))
                    .expect("seeds validated");
                if marginal {
                    let mut fresh = 0usize;
                    for v in &out.activated {
                        if !covered[v.index()] {
                            covered[v.index()] = true;
                            fresh += 1;
                        }
                    }
                    row.push(fresh as f64);
                } else {
                    row.push(out.spread() as f64);
                }
            }
            row
        })
        .collect();

    let mut per_round_sigma = Vec::with_capacity(horizon);
    let mut means = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let col: Vec<f64> = per_sim.iter().map(|row| row[t]).collect();
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let se = if col.len() < 2 {
            0.0
        } else {
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        per_round_sigma.push((mean, se));
        means.push(mean);
    }

    let states = iterate_states(config, &means)?;
    let final_ratio = states.last().unwrap().ratio();

    // Batch-mean standard error for the (nonlinear) ratio.
    let batches = num_sims.min(20);
    let mut batch_ratios = Vec::with_capacity(batches);
    for b in 0..batches {
        let lo = b * num_sims / batches;
        let hi = (b + 1) * num_sims / batches;
        if hi == lo {
            continue;
        }
        let batch_means: Vec<f64> = (0..horizon)
            .map(|t| per_sim[lo..hi].iter().map(|row| row[t]).sum::<f64>() / (hi - lo) as f64)
            .collect();
        batch_ratios.push(ratio_via_iteration(config, &batch_means)?);
    }
    let ratio_std_err = if batch_ratios.len() < 2 {
        0.0
    } else {
        let nb = batch_ratios.len() as f64;
        let m = batch_ratios.iter().sum::<f64>() / nb;
        let var = batch_ratios.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (nb - 1.0);
        (var / nb).sqrt()
    };

    Ok(AllocationEvaluation {
        final_ratio,
        ratio_std_err,
        per_round_sigma,
        states,
        num_sims,
    })
}

/// One stochastic trajectory of the growth process: per round, each of the
/// `z_t` customers independently picks the novice item with probability
/// `d^n/(d^n+d^p)`, and one cascade is realized for the round's seed set
/// (marginal against previous rounds' activations under non-overlapping
/// influence). Requires integer customer counts.
pub fn simulate_random_growth(
    graph: &InfluenceGraph,
    config: &ScenarioConfig,
    allocation: &SeedAllocation,
    rng: RngStream,
) -> Result<Vec<PopularityState>> {
    let horizon = config.horizon;
    let rounds = allocation.per_round(horizon)?;
    for t in 1..=horizon {
        let z = config.z_at(t);
        if z.fract() != 0.0 || z < 0.0 {
            return Err(Error::domain(format!(
                "random growth needs integer customer counts; z_{t} = {z}"
            )));
        }
    }
    let marginal = allocation.setting().marginal_influence();
    let mut rng_growth = rng.child("growth").rng();
    let mut covered = vec![false; graph.node_count()];
    let mut states = Vec::with_capacity(horizon + 1);
    let mut state = config.initial_state();
    states.push(state);
    for t in 1..=horizon {
        let z = config.z_at(t) as u64;
        let total = state.novice + state.popular;
        if total <= 0.0 {
            return Err(Error::domain("total popularity must stay positive"));
        }
        let novice_share = if z == 0 {
            0.0
        } else {
            Binomial::new(z, state.novice / total)
                .map_err(|e| Error::domain(format!("binomial draw failed: {e}")))?
                .sample(&mut rng_growth) as f64
        };
        let seeds = &rounds[t - 1];
        let promoted = if seeds.is_empty() {
            0.0
        } else {
            let out = simulate_ic(graph, seeds, rng.child(&format!("cascade{t}")))?;
            if marginal {
                let mut fresh = 0usize;
                for v in &out.activated {
                    if !covered[v.index()] {
                        covered[v.index()] = true;
                        fresh += 1;
                    }
                }
                fresh as f64
            } else {
                out.spread() as f64
            }
        };
        state = PopularityState {
            round: t,
            novice: state.novice + novice_share + promoted,
            popular: state.popular + (z as f64 - novice_share) + config.promo_at(t),
        };
        states.push(state);
    }
    Ok(states)
}
