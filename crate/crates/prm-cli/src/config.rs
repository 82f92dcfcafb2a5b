//! Flat `key = value` experiment configs plus command-line overrides.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use prm::baselines::BaselineSpec;
use prm::error::{Error, Result};
use prm::graph::{load_edge_list, InfluenceGraph, ProbColumn};
use prm::popularity::{ScenarioConfig, Setting};
use prm::selection::ImmParams;

pub const ALGORITHMS: &[&str] = &[
    "prm-imm",
    "oneshot",
    "uni-ns",
    "uni-os",
    "rand-round",
    "rand-seed-round",
    "dec-ns",
    "dec-os",
    "greedy",
    "fixed",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbMode {
    Explicit,
    WeightedCascade,
}

/// Everything one experiment needs, resolved from the config file and flags.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph_path: PathBuf,
    pub prob_mode: ProbMode,
    pub scenario: ScenarioConfig,
    pub setting: Setting,
    pub algos: Vec<String>,
    pub budgets: Vec<usize>,
    pub epsilon: f64,
    pub ell: f64,
    pub sims: usize,
    pub sims_per_estimate: usize,
    pub reps: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Fixed allocation for the `fixed` pseudo-algorithm, `label:round` pairs.
    pub allocation: Option<String>,
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse_kv_file(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected 'key = value', found '{line}'"),
            });
        };
        if map
            .insert(key.trim().to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("duplicate key '{}'", key.trim()),
            });
        }
    }
    Ok(map)
}

const EXPERIMENT_KEYS: &[&str] = &[
    "graph",
    "prob_mode",
    "setting",
    "algo",
    "k",
    "epsilon",
    "ell",
    "sims",
    "sims_per_estimate",
    "reps",
    "trajectories",
    "seed",
    "out",
    "allocation",
];

pub struct Overrides {
    pub graph: Option<PathBuf>,
    pub algo: Option<String>,
    pub k: Option<String>,
    pub setting: Option<String>,
    pub sims: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(config_path: &Path, ov: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(config_path).map_err(|e| {
            Error::domain(format!("cannot read config {}: {e}", config_path.display()))
        })?;
        let map = parse_kv_file(&text)?;
        for key in map.keys() {
            if !EXPERIMENT_KEYS.contains(&key.as_str())
                && !ScenarioConfig::kv_keys().contains(&key.as_str())
            {
                return Err(Error::domain(format!(
                    "unknown config key '{key}' (known: {}, {})",
                    EXPERIMENT_KEYS.join(", "),
                    ScenarioConfig::kv_keys().join(", ")
                )));
            }
        }
        let scenario = ScenarioConfig::from_kv(&map)?;

        let graph_raw = ov
            .graph
            .clone()
            .or_else(|| map.get("graph").map(PathBuf::from))
            .ok_or_else(|| Error::domain("no graph given (config key 'graph' or --graph)"))?;
        // Relative graph paths resolve against the config file's directory.
        let graph_path = if graph_raw.is_relative() {
            config_path
                .parent()
                .map(|d| d.join(&graph_raw))
                .unwrap_or(graph_raw)
        } else {
            graph_raw
        };
        if !graph_path.exists() {
            return Err(Error::domain(format!(
                "graph file {} does not exist",
                graph_path.display()
            )));
        }

        let prob_mode = match map.get("prob_mode").map(String::as_str) {
            None | Some("explicit") => ProbMode::Explicit,
            Some("wc") | Some("weighted-cascade") => ProbMode::WeightedCascade,
            Some(other) => {
                return Err(Error::domain(format!(
                    "unknown prob_mode '{other}' (expected 'explicit' or 'wc')"
                )))
            }
        };

        let setting: Setting = ov
            .setting
            .clone()
            .or_else(|| map.get("setting").cloned())
            .unwrap_or_else(|| "oins".to_string())
            .parse()?;

        let algo_raw = ov
            .algo
            .clone()
            .or_else(|| map.get("algo").cloned())
            .unwrap_or_else(|| "prm-imm".to_string());
        let algos: Vec<String> = algo_raw
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        for a in &algos {
            if !ALGORITHMS.contains(&a.as_str()) {
                return Err(Error::domain(format!(
                    "unknown algorithm '{a}'; registered: {}",
                    ALGORITHMS.join(", ")
                )));
            }
        }

        let k_raw = ov
            .k
            .clone()
            .or_else(|| map.get("k").cloned())
            .ok_or_else(|| Error::domain("no budget given (config key 'k' or --k)"))?;
        let budgets: Vec<usize> = k_raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::domain(format!("invalid budget '{s}'")))
            })
            .collect::<Result<_>>()?;
        if budgets.is_empty() {
            return Err(Error::domain("empty budget list"));
        }

        fn parse_or<T: std::str::FromStr>(
            map: &HashMap<String, String>,
            key: &str,
            default: T,
        ) -> Result<T> {
            match map.get(key) {
                None => Ok(default),
                Some(raw) => raw
                    .parse()
                    .map_err(|_| Error::domain(format!("invalid value for '{key}': '{raw}'"))),
            }
        }

        Ok(ExperimentConfig {
            graph_path,
            prob_mode,
            scenario,
            setting,
            algos,
            budgets,
            epsilon: parse_or(&map, "epsilon", 0.1)?,
            ell: parse_or(&map, "ell", 1.0)?,
            sims: ov.sims.map(Ok).unwrap_or_else(|| parse_or(&map, "sims", 1000))?,
            sims_per_estimate: parse_or(&map, "sims_per_estimate", 100)?,
            reps: parse_or(&map, "reps", 10)?,
            trajectories: parse_or(&map, "trajectories", 10_000)?,
            seed: ov.seed.map(Ok).unwrap_or_else(|| parse_or(&map, "seed", 1))?,
            out: ov.out.clone().or_else(|| map.get("out").map(PathBuf::from)),
            allocation: map.get("allocation").cloned(),
        })
    }

    pub fn load_graph(&self) -> Result<InfluenceGraph> {
        let text = std::fs::read_to_string(&self.graph_path).map_err(|e| {
            Error::domain(format!(
                "cannot read graph {}: {e}",
                self.graph_path.display()
            ))
        })?;
        match self.prob_mode {
            ProbMode::Explicit => load_edge_list(&text, ProbColumn::Present)?.into_graph(),
            ProbMode::WeightedCascade => {
                load_edge_list(&text, ProbColumn::Absent)?.apply_weighted_cascade()
            }
        }
    }

    pub fn imm_params(&self, k: usize) -> Result<ImmParams> {
        ImmParams::new(k, self.epsilon, self.ell)
    }

    pub fn baseline_spec(&self, algo: &str) -> Option<BaselineSpec> {
        match algo {
            "oneshot" => Some(BaselineSpec::OneShot),
            "uni-ns" => Some(BaselineSpec::UniNs),
            "uni-os" => Some(BaselineSpec::UniOs),
            "rand-round" => Some(BaselineSpec::RandRound),
            "rand-seed-round" => Some(BaselineSpec::RandSeedRound),
            "dec-ns" => Some(BaselineSpec::DecNs),
            "dec-os" => Some(BaselineSpec::DecOs),
            "greedy" => Some(BaselineSpec::Greedy {
                sims_per_estimate: self.sims_per_estimate,
            }),
            _ => None,
        }
    }

    /// Comment lines echoing the resolved configuration.
    pub fn echo_header(&self, extra: &[(&str, String)]) -> String {
        let mut s = String::new();
        s.push_str(&format!("# graph = {}\n", self.graph_path.display()));
        s.push_str(&format!(
            "# prob_mode = {}\n",
            match self.prob_mode {
                ProbMode::Explicit => "explicit",
                ProbMode::WeightedCascade => "wc",
            }
        ));
        for line in self.scenario.to_kv_string().lines() {
            s.push_str(&format!("# {line}\n"));
        }
        s.push_str(&format!("# setting = {}\n", self.setting.name()));
        s.push_str(&format!("# algo = {}\n", self.algos.join(",")));
        let ks: Vec<String> = self.budgets.iter().map(usize::to_string).collect();
        s.push_str(&format!("# k = {}\n", ks.join(",")));
        s.push_str(&format!("# epsilon = {}\n", self.epsilon));
        s.push_str(&format!("# ell = {}\n", self.ell));
        s.push_str(&format!("# sims = {}\n", self.sims));
        s.push_str(&format!("# seed = {}\n", self.seed));
        for (key, value) in extra {
            s.push_str(&format!("# {key} = {value}\n"));
        }
        s
    }
}
