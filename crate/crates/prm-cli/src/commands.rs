//! Subcommand implementations. Each returns the CSV text to emit or an
//! `(exit_code, message)` pair: 2 for configuration problems, 3 when a
//! minimization target is infeasible, 4 for unexpected runtime failures.

use std::fmt::Write as _;
use std::time::Instant;

use prm::baselines::run_baseline;
use prm::error::Error;
use prm::graph::{InfluenceGraph, NodeId};
use prm::popularity::{
    evaluate_allocation, ratio_from_surrogate, round_weights, surrogate_rho_oi, SeedAllocation,
    Setting, WeightMode,
};
use prm::rng::RngStream;
use prm::selection::{prm_imm_nios, prm_imm_oins, SelectionTrace};
use prm::variants::{minimize_rounds, minimize_seed_budget, MinimizationResult};

use crate::config::ExperimentConfig;

pub type CmdResult = std::result::Result<String, (i32, String)>;

fn config_err(e: Error) -> (i32, String) {
    (2, e.to_string())
}

fn run_err(e: Error) -> (i32, String) {
    match e {
        Error::Infeasible { .. } => (3, e.to_string()),
        other => (4, other.to_string()),
    }
}

fn allocation_string(graph: &InfluenceGraph, alloc: &SeedAllocation) -> String {
    alloc
        .pairs()
        .iter()
        .map(|&(v, t)| format!("{}:{}", graph.label(v), t))
        .collect::<Vec<_>>()
        .join(";")
}

fn seeds_per_round_string(alloc: &SeedAllocation, horizon: usize) -> String {
    let counts = alloc.seed_count_by_round(horizon).unwrap_or_default();
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| format!("{}:{}", t + 1, c))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_fixed_allocation(
    graph: &InfluenceGraph,
    setting: Setting,
    raw: &str,
) -> Result<SeedAllocation, Error> {
    let mut pairs = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (label, round) = part
            .rsplit_once(':')
            .ok_or_else(|| Error::domain(format!("allocation entry '{part}' is not label:round")))?;
        let node = graph
            .node_by_label(label.trim())
            .ok_or_else(|| Error::domain(format!("unknown node label '{label}'")))?;
        let round: usize = round
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("invalid round in '{part}'")))?;
        pairs.push((node, round));
    }
    SeedAllocation::new(setting, pairs)
}

/// Produce the allocation of one registered algorithm at budget `k`.
fn allocate(
    cfg: &ExperimentConfig,
    graph: &InfluenceGraph,
    algo: &str,
    k: usize,
    rng: RngStream,
) -> Result<(SeedAllocation, Option<SelectionTrace>), Error> {
    if algo == "fixed" {
        let raw = cfg.allocation.as_deref().ok_or_else(|| {
            Error::domain("algorithm 'fixed' needs an 'allocation' entry in the config")
        })?;
        return Ok((parse_fixed_allocation(graph, cfg.setting, raw)?, None));
    }
    if algo == "prm-imm" {
        let params = cfg.imm_params(k)?;
        let (alloc, trace) = match cfg.setting {
            Setting::Oins => prm_imm_oins(graph, &cfg.scenario, &params, rng)?,
            Setting::Nios => prm_imm_nios(graph, &cfg.scenario, &params, rng)?,
            other => {
                return Err(Error::domain(format!(
                    "{} has no dedicated selection algorithm; use OINS or NIOS",
                    other.name()
                )))
            }
        };
        return Ok((alloc, Some(trace)));
    }
    let spec = cfg
        .baseline_spec(algo)
        .ok_or_else(|| Error::domain(format!("unknown algorithm '{algo}'")))?;
    let params = cfg.imm_params(k)?;
    let alloc = run_baseline(graph, &cfg.scenario, k, &spec, &params, cfg.setting, rng)?;
    Ok((alloc, None))
}

/// Surrogate value of an evaluated allocation: round weights dotted with the
/// per-round spread estimates (plain or marginal per the setting).
fn surrogate_of(cfg: &ExperimentConfig, sigma_means: &[f64]) -> Result<f64, Error> {
    let weights = round_weights(&cfg.scenario, WeightMode::Base)?;
    surrogate_rho_oi(&weights, sigma_means)
}

pub fn cmd_run(cfg: &ExperimentConfig, timing: bool) -> CmdResult {
    let graph = cfg.load_graph().map_err(config_err)?;
    let master = RngStream::new(cfg.seed);
    let mut out = String::new();
    out.push_str("# schema = prm-run-v1\n");
    out.push_str(&cfg.echo_header(&[("n", graph.node_count().to_string()), ("m", graph.edge_count().to_string())]));
    out.push_str(
        "algo,k,setting,final_ratio,ratio_se,surrogate_rho,predicted_ratio,theta_final,seeds_per_round,allocation,wall_ms\n",
    );
    let mut traces: Vec<(String, usize, SelectionTrace)> = Vec::new();
    for algo in &cfg.algos {
        for &k in &cfg.budgets {
            let started = Instant::now();
            let rng = master.child(&format!("run/{algo}/k{k}"));
            let (alloc, trace) =
                allocate(cfg, &graph, algo, k, rng.child("select")).map_err(run_err)?;
            let eval = evaluate_allocation(&graph, &cfg.scenario, &alloc, cfg.sims, rng.child("eval"))
                .map_err(run_err)?;
            let sigma_means: Vec<f64> = eval.per_round_sigma.iter().map(|&(m, _)| m).collect();
            let rho = surrogate_of(cfg, &sigma_means).map_err(run_err)?;
            let wall_ms = if timing {
                started.elapsed().as_millis()
            } else {
                0
            };
            writeln!(
                out,
                "{algo},{k},{},{},{},{},{},{},{},{},{wall_ms}",
                cfg.setting.name(),
                eval.final_ratio,
                eval.ratio_std_err,
                rho,
                ratio_from_surrogate(&cfg.scenario, rho),
                trace.as_ref().map(|t| t.theta_final).unwrap_or(0),
                seeds_per_round_string(&alloc, cfg.scenario.horizon),
                allocation_string(&graph, &alloc),
            )
            .unwrap();
            if let Some(t) = trace {
                traces.push((algo.clone(), k, t));
            }
        }
    }
    for (algo, k, trace) in traces {
        for line in trace.log_lines() {
            writeln!(out, "# trace {algo} k={k}: {line}").unwrap();
        }
    }
    Ok(out)
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> CmdResult {
    let graph = cfg.load_graph().map_err(config_err)?;
    let master = RngStream::new(cfg.seed);
    let mut out = String::new();
    out.push_str("# schema = prm-compare-v1\n");
    out.push_str(&cfg.echo_header(&[("reps", cfg.reps.to_string())]));
    out.push_str("algo,k,setting,reps,mean_final_ratio,se_final_ratio,mean_surrogate,se_surrogate\n");
    for algo in &cfg.algos {
        for &k in &cfg.budgets {
            let mut ratios = Vec::with_capacity(cfg.reps);
            let mut rhos = Vec::with_capacity(cfg.reps);
            for rep in 0..cfg.reps {
                let rng = master.child(&format!("compare/{algo}/k{k}/rep{rep}"));
                let (alloc, _) =
                    allocate(cfg, &graph, algo, k, rng.child("select")).map_err(run_err)?;
                let eval =
                    evaluate_allocation(&graph, &cfg.scenario, &alloc, cfg.sims, rng.child("eval"))
                        .map_err(run_err)?;
                let sigma_means: Vec<f64> = eval.per_round_sigma.iter().map(|&(m, _)| m).collect();
                ratios.push(eval.final_ratio);
                rhos.push(surrogate_of(cfg, &sigma_means).map_err(run_err)?);
            }
            let (mr, sr) = mean_se(&ratios);
            let (mh, sh) = mean_se(&rhos);
            writeln!(
                out,
                "{algo},{k},{},{},{mr},{sr},{mh},{sh}",
                cfg.setting.name(),
                cfg.reps
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn minimize_rows(
    graph: &InfluenceGraph,
    res: &MinimizationResult,
    mode: &str,
    out: &mut String,
) {
    out.push_str("record,mode,candidate,ratio,std_err,feasible,sims_used,allocation\n");
    for p in &res.search_log {
        writeln!(
            out,
            "probe,{mode},{},{},{},{},{},",
            p.candidate, p.ratio, p.std_err, p.feasible, p.sims_used
        )
        .unwrap();
    }
    writeln!(
        out,
        "result,{mode},{},{},,,,{}",
        res.value,
        res.achieved_ratio,
        allocation_string(graph, &res.allocation)
    )
    .unwrap();
    for w in &res.warnings {
        writeln!(out, "# warning: {w}").unwrap();
    }
}

pub fn cmd_minimize(cfg: &ExperimentConfig, mode: &str) -> CmdResult {
    let graph = cfg.load_graph().map_err(config_err)?;
    let master = RngStream::new(cfg.seed);
    let params = cfg.imm_params(cfg.budgets[0]).map_err(config_err)?;
    let mut out = String::new();
    out.push_str("# schema = prm-minimize-v1\n");
    out.push_str(&cfg.echo_header(&[("mode", mode.to_string())]));
    let res = match mode {
        "seeds" => minimize_seed_budget(
            &graph,
            &cfg.scenario,
            cfg.setting,
            &params,
            cfg.sims,
            master.child("minimize-seeds"),
        ),
        "rounds" => minimize_rounds(
            &graph,
            &cfg.scenario,
            cfg.budgets[0],
            cfg.setting,
            &params,
            cfg.sims,
            master.child("minimize-rounds"),
        ),
        other => {
            return Err((2, format!("unknown minimize mode '{other}' (seeds|rounds)")));
        }
    }
    .map_err(run_err)?;
    minimize_rows(&graph, &res, mode, &mut out);
    Ok(out)
}

pub fn cmd_justify(cfg: &ExperimentConfig) -> CmdResult {
    let graph = cfg.load_graph().map_err(config_err)?;
    let master = RngStream::new(cfg.seed);
    let mut out = String::new();
    out.push_str("# schema = prm-justify-v1\n");
    out.push_str(&cfg.echo_header(&[("trajectories", cfg.trajectories.to_string())]));
    out.push_str(
        "k,expected_ratio,random_mean_ratio,random_se,growth_rel_dev,surrogate_rho,surrogate_pred,surrogate_rel_dev,within_5pct\n",
    );
    for &k in &cfg.budgets {
        let rng = master.child(&format!("justify/k{k}"));
        let (alloc, _) =
            allocate(cfg, &graph, "prm-imm", k, rng.child("select")).map_err(run_err)?;
        let eval = evaluate_allocation(&graph, &cfg.scenario, &alloc, cfg.sims, rng.child("eval"))
            .map_err(run_err)?;
        let expected = eval.final_ratio;

        let traj_rng = rng.child("trajectories");
        let finals: Vec<f64> = (0..cfg.trajectories)
            .map(|i| {
                prm::popularity::simulate_random_growth(
                    &graph,
                    &cfg.scenario,
                    &alloc,
                    traj_rng.stream(i as u64),
                )
                .map(|states| states.last().unwrap().ratio())
            })
            .collect::<Result<_, Error>>()
            .map_err(run_err)?;
        let (rand_mean, rand_se) = mean_se(&finals);
        let growth_dev = (rand_mean - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);

        let sigma_means: Vec<f64> = eval.per_round_sigma.iter().map(|&(m, _)| m).collect();
        let rho = surrogate_of(cfg, &sigma_means).map_err(run_err)?;
        let pred = ratio_from_surrogate(&cfg.scenario, rho);
        let sur_dev = (pred - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        writeln!(
            out,
            "{k},{expected},{rand_mean},{rand_se},{growth_dev},{rho},{pred},{sur_dev},{}",
            u8::from(sur_dev <= 0.05)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn cmd_spread(
    graph_text: &str,
    weighted_cascade: bool,
    seeds_raw: &str,
    sims: usize,
    seed: u64,
) -> CmdResult {
    use prm::graph::{load_edge_list, ProbColumn};
    let graph = if weighted_cascade {
        load_edge_list(graph_text, ProbColumn::Absent)
            .and_then(|el| el.apply_weighted_cascade())
    } else {
        load_edge_list(graph_text, ProbColumn::Present).and_then(|el| el.into_graph())
    }
    .map_err(config_err)?;
    let seeds: Vec<NodeId> = seeds_raw
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            graph
                .node_by_label(s.trim())
                .ok_or_else(|| Error::domain(format!("unknown node label '{s}'")))
        })
        .collect::<Result<_, Error>>()
        .map_err(config_err)?;
    let est = prm::diffusion::estimate_spread(&graph, &seeds, sims, RngStream::new(seed))
        .map_err(run_err)?;
    let mut out = String::new();
    out.push_str("# schema = prm-spread-v1\n");
    out.push_str("seeds,num_sims,mean,std_err\n");
    writeln!(out, "{},{},{},{}", seeds_raw, est.num_sims, est.mean, est.std_err).unwrap();
    Ok(out)
}
