//! Acceptance suite: one test per release criterion, each printing a
//! `criterion NN (<name>): PASS` line with the measured quantities (visible
//! with `-- --nocapture`). Criterion 12 is the long mid-size-graph trend
//! check and is `#[ignore]`d by default; run it with `-- --ignored`.

mod common;

use std::time::Instant;

use common::*;
use prm::baselines::{run_baseline, BaselineSpec};
use prm::diffusion::{exact, exact_spread_small};
use prm::graph::{InfluenceGraph, NodeId};
use prm::popularity::{
    evaluate_allocation, pa_step, ratio_from_surrogate, ratio_oi_closed_form, ratio_via_iteration,
    round_weights, simulate_random_growth, ScenarioConfig, SeedAllocation, Setting, WeightMode,
};
use prm::rng::RngStream;
use prm::sampling::{
    rho_hat_ni_with_se, rho_hat_with_se, CollectionKind, RRCollection, RRSampler,
};
use prm::selection::{
    imm_single_round, node_selection_nios, node_selection_oins, prm_imm_nios, prm_imm_oins,
    ImmParams,
};
use prm::synth;
use prm::variants::{iterate_multi_item, minimize_rounds, minimize_seed_budget, MultiItemConfig};
use rand::Rng;

fn budget(name: &str, started: Instant, limit_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_s,
        "{name} exceeded its runtime budget: {elapsed:.1}s >= {limit_s}s"
    );
}

#[test]
fn criterion_01_two_round_worked_example() {
    let started = Instant::now();
    // d0 = (2, 8), growth 5, spreads 5 and 5: (8, 12) then (15, 15), exactly.
    let cfg = ScenarioConfig::new(2.0, 8.0, 5.0, 2).unwrap();
    let s1 = pa_step(cfg.initial_state(), 5.0, 5.0, 0.0).unwrap();
    assert_eq!((s1.novice, s1.popular), (8.0, 12.0));
    let s2 = pa_step(s1, 5.0, 5.0, 0.0).unwrap();
    assert_eq!((s2.novice, s2.popular), (15.0, 15.0));

    // The same numbers driven by actual cascades on the demo graph (all
    // edges certain): seeds {1,5} in round 1 and {9} in round 2.
    let graph = synth::demo_two_wave_graph();
    let alloc = SeedAllocation::new(
        Setting::Oins,
        vec![(NodeId(1), 1), (NodeId(5), 1), (NodeId(9), 2)],
    )
    .unwrap();
    let eval = evaluate_allocation(&graph, &cfg, &alloc, 64, RngStream::new(1)).unwrap();
    assert_eq!(eval.per_round_sigma[0].0, 5.0);
    assert_eq!(eval.per_round_sigma[1].0, 5.0);
    assert_eq!(eval.final_ratio, 1.0);
    assert_eq!(eval.ratio_std_err, 0.0);
    budget("criterion 1", started, 1.0);
    println!("criterion 01 (worked example): PASS — states (8,12) and (15,15), ratio 1 exact");
}

#[test]
fn criterion_02_three_node_counterexample() {
    let started = Instant::now();
    let cfg = ScenarioConfig::new(1.0, 2.0, 1.0, 3).unwrap();
    let r = |sigmas: &[f64]| ratio_oi_closed_form(&cfg, sigmas).unwrap();
    let small = r(&[1.0, 0.0, 0.0]);
    let small_b = r(&[1.0, 1.0, 0.0]);
    let large = r(&[2.0, 0.0, 0.0]);
    let large_b = r(&[2.0, 1.0, 0.0]);
    assert!((small - 0.875).abs() < 1e-4);
    assert!((small_b - 1.1875).abs() < 1e-4);
    assert!((large - 1.25).abs() < 1e-4);
    assert!((large_b - 1.5714).abs() < 1e-4);
    let gain_large = large_b - large;
    let gain_small = small_b - small;
    assert!((gain_large - 0.3214).abs() < 1e-4);
    assert!((gain_small - 0.3125).abs() < 1e-4);
    assert!(gain_large > gain_small, "marginal gain must grow with the base set");
    budget("criterion 2", started, 1.0);
    println!(
        "criterion 02 (non-submodularity witness): PASS — {gain_large:.4} > {gain_small:.4}"
    );
}

#[test]
fn criterion_03_round_tagged_estimator_unbiased() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for entry in small_corpus() {
        let graph = &entry.graph;
        assert!(graph.edge_count() <= 12);
        let t_max = entry.config.horizon;
        let weights = round_weights(&entry.config, WeightMode::Base).unwrap();
        let mut coll = RRCollection::new(CollectionKind::PairWise, graph, t_max);
        let mut sampler = RRSampler::new(graph, t_max, RngStream::new(0xC3).child(entry.name));
        sampler.extend(&mut coll, 50_000).unwrap();
        let mut rng = RngStream::new(0xA11C).child(entry.name).rng();
        for case in 0..20 {
            let k = 1 + case % 3;
            let pairs = random_ns_pairs(graph, t_max, k, &mut rng);
            let alloc = SeedAllocation::new(Setting::Oins, pairs).unwrap();
            let exact_value = exact_rho_oi(graph, &alloc.per_round(t_max).unwrap(), &weights);
            let (est, se) = rho_hat_with_se(&coll, &alloc, &weights).unwrap();
            let dev = (est - exact_value).abs();
            assert!(
                dev <= 3.0 * se,
                "{}: case {case}: estimate {est} vs exact {exact_value} (3se = {})",
                entry.name,
                3.0 * se
            );
            if se > 0.0 {
                worst = worst.max(dev / se);
            }
        }
    }
    budget("criterion 3", started, 120.0);
    println!("criterion 03 (round-tagged estimator unbiased): PASS — worst deviation {worst:.2} se");
}

#[test]
fn criterion_04_multi_round_estimator_matches_enumeration() {
    let started = Instant::now();
    // Graphs sized so the full live-edge tuple space is enumerable.
    let cases = [
        (synth::random_graph(4, 4, 301, (0.2, 0.9)), 3usize),
        (synth::random_graph(5, 6, 302, (0.2, 0.9)), 2),
        (synth::random_graph(3, 3, 303, (0.3, 0.9)), 4),
        (synth::random_graph(6, 5, 304, (0.2, 0.8)), 2),
    ];
    let mut worst: f64 = 0.0;
    for (idx, (graph, t_max)) in cases.iter().enumerate() {
        assert!(graph.edge_count() * t_max <= 12);
        let cfg = ScenarioConfig::new(4.0, 16.0, 3.0, *t_max).unwrap();
        let weights = round_weights(&cfg, WeightMode::Base).unwrap();
        let mut coll = RRCollection::new(CollectionKind::MultiRound, graph, *t_max);
        let mut sampler =
            RRSampler::new(graph, *t_max, RngStream::new(0xC4).stream(idx as u64));
        sampler.extend(&mut coll, 50_000).unwrap();
        let mut rng = RngStream::new(0xB44).stream(idx as u64).rng();
        for case in 0..10 {
            let k = 1 + case % 3;
            let pairs = random_os_pairs(graph, *t_max, k, &mut rng);
            let alloc = SeedAllocation::new(Setting::Nios, pairs).unwrap();
            let rounds = alloc.per_round(*t_max).unwrap();
            let exact_value =
                exact::rho_ni_by_tuple_enumeration(graph, &rounds, weights.as_slice()).unwrap();
            let (est, se) = rho_hat_ni_with_se(&coll, &alloc, &weights).unwrap();
            let dev = (est - exact_value).abs();
            assert!(
                dev <= 3.0 * se,
                "case {idx}/{case}: estimate {est} vs exact {exact_value} (3se = {})",
                3.0 * se
            );
            if se > 0.0 {
                worst = worst.max(dev / se);
            }
        }
    }
    budget("criterion 4", started, 120.0);
    println!("criterion 04 (multi-round estimator vs enumeration): PASS — worst deviation {worst:.2} se");
}

fn oracle_greedy_oins(
    coll: &RRCollection,
    k: usize,
    w: &prm::popularity::RoundWeights,
) -> Vec<(NodeId, usize)> {
    let n = coll.node_count();
    let t_max = coll.horizon();
    let mut covered = vec![false; coll.theta()];
    let mut used = vec![false; n];
    let mut picks = Vec::new();
    for _ in 0..k.min(n) {
        let mut best: Option<(f64, u32, usize)> = None;
        for v in 0..n as u32 {
            if used[v as usize] {
                continue;
            }
            for t in 1..=t_max {
                let cnt = coll
                    .covering(NodeId(v), t)
                    .iter()
                    .filter(|&&i| !covered[i as usize])
                    .count();
                let gain = w.at(t) * cnt as f64;
                let better = match best {
                    None => true,
                    Some(b) => gain > b.0 || (gain == b.0 && (v, t) < (b.1, b.2)),
                };
                if better {
                    best = Some((gain, v, t));
                }
            }
        }
        let (_, v, t) = best.unwrap();
        used[v as usize] = true;
        for &i in coll.covering(NodeId(v), t) {
            covered[i as usize] = true;
        }
        picks.push((NodeId(v), t));
    }
    picks
}

fn oracle_greedy_nios(
    coll: &RRCollection,
    k: usize,
    w: &prm::popularity::RoundWeights,
) -> Vec<(NodeId, usize)> {
    let n = coll.node_count();
    let t_max = coll.horizon();
    let mut earliest = vec![t_max + 1; coll.theta()];
    let mut picked = std::collections::HashSet::new();
    let mut picks = Vec::new();
    for _ in 0..k {
        let mut best: Option<(f64, u32, usize)> = None;
        for v in 0..n as u32 {
            for t in 1..=t_max {
                if picked.contains(&(v, t)) {
                    continue;
                }
                let gain: f64 = coll
                    .covering(NodeId(v), t)
                    .iter()
                    .map(|&i| {
                        let cur = earliest[i as usize];
                        if t < cur {
                            w.at(t) - w.at(cur)
                        } else {
                            0.0
                        }
                    })
                    .sum();
                let better = match best {
                    None => true,
                    Some(b) => gain > b.0 || (gain == b.0 && (v, t) < (b.1, b.2)),
                };
                if better {
                    best = Some((gain, v, t));
                }
            }
        }
        let (_, v, t) = best.unwrap();
        picked.insert((v, t));
        for &i in coll.covering(NodeId(v), t) {
            earliest[i as usize] = earliest[i as usize].min(t);
        }
        picks.push((NodeId(v), t));
    }
    picks
}

#[test]
fn criterion_05_greedy_matches_recompute_oracle() {
    let started = Instant::now();
    for seed in 0..200u64 {
        let (_, coll, w) = random_collection(CollectionKind::PairWise, 10_000 + seed);
        let k = 1 + (seed % 4) as usize;
        let sel = node_selection_oins(&coll, k, &w).unwrap();
        assert_eq!(
            sel.pairs,
            oracle_greedy_oins(&coll, k, &w),
            "pair-wise greedy diverged at seed {seed}"
        );
    }
    for seed in 0..200u64 {
        let (_, coll, w) = random_collection(CollectionKind::MultiRound, 20_000 + seed);
        let k = 1 + (seed % 4) as usize;
        let sel = node_selection_nios(&coll, k, &w).unwrap();
        assert_eq!(
            sel.pairs,
            oracle_greedy_nios(&coll, k, &w),
            "multi-round greedy diverged at seed {seed}"
        );
    }
    budget("criterion 5", started, 60.0);
    println!("criterion 05 (greedy equals recompute oracle): PASS — 200 + 200 collections");
}

#[test]
fn criterion_06_approximation_quality_at_desk_scale() {
    let started = Instant::now();
    let runs = 500;
    let eps = 0.1;
    let ell = 1.0;

    // Non-overlapping seeds: greedy on a partition matroid, 1/2 - eps bar.
    let oins_instances = [
        (synth::random_graph(8, 12, 201, (0.2, 0.9)), 3usize, 3usize, ScenarioConfig::new(4.0, 16.0, 2.0, 3).unwrap()),
        (synth::random_graph(7, 10, 202, (0.2, 0.9)), 2, 2, ScenarioConfig::new(3.0, 12.0, 3.0, 2).unwrap()),
    ];
    for (idx, (graph, _t, k, cfg)) in oins_instances.iter().enumerate() {
        let weights = round_weights(cfg, WeightMode::Base).unwrap();
        let opt = exhaustive_opt_oins(graph, &weights, *k);
        assert!(opt > 0.0);
        let bar = (0.5 - eps) * opt;
        let params = ImmParams::new(*k, eps, ell).unwrap();
        let mut hits = 0;
        for run in 0..runs {
            let (alloc, _) =
                prm_imm_oins(graph, cfg, &params, RngStream::new(0x61).stream((idx * runs + run) as u64))
                    .unwrap();
            let value = exact_rho_oi(graph, &alloc.per_round(cfg.horizon).unwrap(), &weights);
            if value >= bar {
                hits += 1;
            }
        }
        assert!(
            hits * 100 >= runs * 95,
            "OINS instance {idx}: only {hits}/{runs} runs reached (1/2 - eps) * OPT"
        );
        println!("criterion 06 OINS instance {idx}: {hits}/{runs} runs above the bar");
    }

    // Overlapping seeds: plain cardinality constraint, (1 - 1/e - eps) bar.
    let nios_instances = [
        (synth::random_graph(6, 8, 203, (0.2, 0.9)), 2usize, ScenarioConfig::new(4.0, 14.0, 2.0, 2).unwrap()),
        (synth::random_graph(5, 6, 204, (0.2, 0.9)), 3, ScenarioConfig::new(3.0, 10.0, 2.0, 3).unwrap()),
    ];
    for (idx, (graph, k, cfg)) in nios_instances.iter().enumerate() {
        let weights = round_weights(cfg, WeightMode::Base).unwrap();
        let opt = exhaustive_opt_nios(graph, &weights, *k);
        assert!(opt > 0.0);
        let bar = (1.0 - 1.0 / std::f64::consts::E - eps) * opt;
        let params = ImmParams::new(*k, eps, ell).unwrap();
        let mut hits = 0;
        for run in 0..runs {
            let (alloc, _) =
                prm_imm_nios(graph, cfg, &params, RngStream::new(0x62).stream((idx * runs + run) as u64))
                    .unwrap();
            let rounds = alloc.per_round(cfg.horizon).unwrap();
            let value =
                exact::rho_ni_by_round_probs(graph, &rounds, weights.as_slice()).unwrap();
            if value >= bar {
                hits += 1;
            }
        }
        assert!(
            hits * 100 >= runs * 95,
            "NIOS instance {idx}: only {hits}/{runs} runs reached (1 - 1/e - eps) * OPT"
        );
        println!("criterion 06 NIOS instance {idx}: {hits}/{runs} runs above the bar");
    }
    budget("criterion 6", started, 600.0);
    println!("criterion 06 (approximation quality): PASS");
}

#[test]
fn criterion_07_surrogate_tracks_the_exact_ratio() {
    let started = Instant::now();
    let mut devs = Vec::new();
    for entry in small_corpus() {
        let graph = &entry.graph;
        let cfg = &entry.config;
        let weights = round_weights(cfg, WeightMode::Base).unwrap();
        for k in 1..=4usize {
            let k = k.min(graph.node_count());
            let params = ImmParams::new(k, 0.1, 1.0).unwrap();
            let (alloc, _) = prm_imm_oins(
                graph,
                cfg,
                &params,
                RngStream::new(0x77).child(entry.name).stream(k as u64),
            )
            .unwrap();
            let rounds = alloc.per_round(cfg.horizon).unwrap();
            let sigmas: Vec<f64> = rounds
                .iter()
                .map(|seeds| exact_spread_small(graph, seeds).unwrap())
                .collect();
            let rho = prm::popularity::surrogate_rho_oi(&weights, &sigmas).unwrap();
            let predicted = ratio_from_surrogate(cfg, rho);
            let exact_ratio = ratio_oi_closed_form(cfg, &sigmas).unwrap();
            let dev = (predicted - exact_ratio).abs() / exact_ratio;
            assert!(
                dev <= 0.15,
                "{} k={k}: surrogate prediction off by {:.1}%",
                entry.name,
                dev * 100.0
            );
            devs.push(dev);
        }
    }
    let avg = devs.iter().sum::<f64>() / devs.len() as f64;
    assert!(avg <= 0.05, "average surrogate deviation {:.2}% above 5%", avg * 100.0);
    budget("criterion 7", started, 300.0);
    println!(
        "criterion 07 (surrogate fidelity): PASS — average {:.2}%, worst {:.2}% over {} cases",
        avg * 100.0,
        devs.iter().cloned().fold(0.0, f64::max) * 100.0,
        devs.len()
    );
}

#[test]
fn criterion_08_random_growth_matches_expectation_form() {
    let started = Instant::now();
    // Scaled-up scenarios keep the nonlinear-ratio bias far below the
    // trajectory noise band; growth counts must be integers here.
    let cases: Vec<(InfluenceGraph, ScenarioConfig, Vec<(NodeId, usize)>)> = vec![
        (
            InfluenceGraph::from_edges(6, &[]),
            ScenarioConfig::new(30.0, 90.0, 20.0, 3).unwrap(),
            vec![(NodeId(0), 1), (NodeId(1), 2), (NodeId(2), 2)],
        ),
        (
            synth::demo_two_wave_graph(),
            ScenarioConfig::new(20.0, 80.0, 50.0, 2).unwrap(),
            vec![(NodeId(1), 1), (NodeId(5), 1), (NodeId(9), 2)],
        ),
        (
            synth::random_graph(6, 10, 401, (0.2, 0.9)),
            ScenarioConfig::new(25.0, 100.0, 30.0, 2).unwrap(),
            vec![(NodeId(0), 1), (NodeId(3), 2)],
        ),
        (
            synth::random_graph(7, 12, 402, (0.2, 0.8)),
            ScenarioConfig::new(40.0, 120.0, 15.0, 3).unwrap(),
            vec![(NodeId(2), 1), (NodeId(5), 1), (NodeId(6), 3)],
        ),
    ];
    let trajectories = 10_000u64;
    for (idx, (graph, cfg, pairs)) in cases.iter().enumerate() {
        let alloc = SeedAllocation::new(Setting::Oins, pairs.clone()).unwrap();
        let rounds = alloc.per_round(cfg.horizon).unwrap();
        let sigmas: Vec<f64> = rounds
            .iter()
            .map(|seeds| exact_spread_small(graph, seeds).unwrap())
            .collect();
        let expected = ratio_via_iteration(cfg, &sigmas).unwrap();
        let base = RngStream::new(0x88).stream(idx as u64);
        let finals: Vec<f64> = (0..trajectories)
            .map(|i| {
                simulate_random_growth(graph, cfg, &alloc, base.stream(i))
                    .unwrap()
                    .last()
                    .unwrap()
                    .ratio()
            })
            .collect();
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let var = finals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "case {idx}: trajectory mean {mean} vs expectation form {expected} (3se = {})",
            3.0 * se
        );
    }
    budget("criterion 8", started, 300.0);
    println!("criterion 08 (random vs expected growth): PASS — {trajectories} trajectories x {} scenarios", cases.len());
}

#[test]
fn criterion_09_minimization_matches_exhaustive_search() {
    let started = Instant::now();
    let params = ImmParams::new(1, 0.05, 1.0).unwrap();
    let mut rng = RngStream::new(0x99).rng();
    let mut budget_checked = 0;
    let mut round_checked = 0;
    for case in 0..50 {
        let n = rng.gen_range(6..=14);
        let t = rng.gen_range(2..=3);
        let d0p = rng.gen_range(4.0..12.0);
        let d0n = rng.gen_range(0.0..d0p * 0.9);
        let z = rng.gen_range(0.3..1.2) * (d0n + d0p);
        let cfg = ScenarioConfig::new(d0n, d0p, z, t).unwrap();
        let graph = InfluenceGraph::from_edges(n, &[]);

        // Exhaustive reference over every budget split.
        let oracle_k = (1..=n).find(|&k| edgeless_best_ratio(&cfg, k, n) >= 1.0);
        let got = minimize_seed_budget(
            &graph,
            &cfg,
            Setting::Oins,
            &params,
            200,
            RngStream::new(0x990).stream(case),
        );
        match (oracle_k, got) {
            (Some(k), Ok(res)) => {
                assert_eq!(res.value, k, "case {case}: budget mismatch");
                budget_checked += 1;
                // Round minimization at that budget: the exhaustive best over
                // splits is achieved by some horizon; scan small horizons.
                let oracle_t = if cfg.initial_ratio() >= 1.0 {
                    Some(0)
                } else {
                    (1..=4usize).find(|&tt| {
                        let cfg_t = ScenarioConfig::new(d0n, d0p, z, tt).unwrap();
                        edgeless_best_ratio(&cfg_t, k, n) >= 1.0
                    })
                };
                if let Some(ot) = oracle_t {
                    let res_t = minimize_rounds(
                        &graph,
                        &cfg,
                        k,
                        Setting::Oins,
                        &params,
                        200,
                        RngStream::new(0x991).stream(case),
                    )
                    .unwrap();
                    assert_eq!(res_t.value, ot, "case {case}: round mismatch");
                    round_checked += 1;
                }
            }
            (None, Err(prm::Error::Infeasible { .. })) => {
                budget_checked += 1;
            }
            (oracle, got) => panic!(
                "case {case}: oracle {oracle:?} but implementation returned {:?}",
                got.map(|r| r.value)
            ),
        }
    }
    assert_eq!(budget_checked, 50);
    budget("criterion 9", started, 120.0);
    println!(
        "criterion 09 (minimization vs exhaustion): PASS — {budget_checked} budget + {round_checked} round cases"
    );
}

#[test]
fn criterion_10_promotion_bounds_hold_to_1e9() {
    let started = Instant::now();
    let mut rng = RngStream::new(0xAA).rng();
    let mut checked = 0;
    while checked < 100 {
        let t = rng.gen_range(1..=6);
        let d0p = rng.gen_range(5.0..40.0);
        let d0n = rng.gen_range(0.0..d0p);
        let cfg = ScenarioConfig::new(d0n, d0p, rng.gen_range(0.0..8.0), t)
            .unwrap()
            .with_promo((0..t).map(|_| rng.gen_range(0.0..4.0)).collect())
            .unwrap();
        let sigmas: Vec<f64> = (0..t).map(|_| rng.gen_range(0.0..5.0)).collect();
        if !prm::variants::promo_validity_holds(&cfg, &sigmas).unwrap() {
            continue;
        }
        checked += 1;
        let exact_ratio = ratio_via_iteration(&cfg, &sigmas).unwrap();
        let upper = prm::variants::promo_ratio_upper_bound(&cfg, &sigmas).unwrap();
        let lower = prm::variants::promo_ratio_lower_bound(&cfg, &sigmas).unwrap();
        assert!(exact_ratio <= upper + 1e-9, "upper bound violated: {exact_ratio} > {upper}");
        assert!(exact_ratio >= lower - 1e-9, "lower bound violated: {exact_ratio} < {lower}");
    }
    budget("criterion 10", started, 60.0);
    println!("criterion 10 (promotion sandwich bounds): PASS — 100 scenarios within 1e-9");
}

#[test]
fn criterion_11_composite_item_identity() {
    let started = Instant::now();
    let mut rng = RngStream::new(0xBB).rng();
    for case in 0..100 {
        let s = rng.gen_range(1..=5);
        let t = rng.gen_range(1..=5);
        let multi = MultiItemConfig {
            d0n: rng.gen_range(0.0..15.0),
            item_d0: (0..s).map(|_| rng.gen_range(0.5..12.0)).collect(),
            item_promos: (0..s)
                .map(|_| (0..t).map(|_| rng.gen_range(0.0..3.0)).collect())
                .collect(),
            growth: prm::popularity::Growth::Constant(rng.gen_range(0.0..7.0)),
            horizon: t,
        };
        let sigmas: Vec<f64> = (0..t).map(|_| rng.gen_range(0.0..6.0)).collect();
        let multi_states = iterate_multi_item(&multi, &sigmas).unwrap();
        let (cfg, _) = prm::variants::compose_multi_item(&multi).unwrap();
        let two_states = prm::popularity::iterate_states(&cfg, &sigmas).unwrap();
        for (ms, ts) in multi_states.iter().zip(&two_states) {
            let items: f64 = ms.items.iter().sum();
            assert!(
                (ms.novice - ts.novice).abs() <= 1e-12 * ts.novice.max(1.0),
                "case {case}: novice diverged"
            );
            assert!(
                (items - ts.popular).abs() <= 1e-12 * ts.popular.max(1.0),
                "case {case}: aggregate diverged"
            );
        }
    }
    budget("criterion 11", started, 60.0);
    println!("criterion 11 (composite-item identity): PASS — 100 configs to 1e-12");
}

// The long trend check on a mid-size synthetic scale-free graph. Soft
// criterion: a failure warrants investigation rather than automatic
// rejection. Run with `cargo test -p prm --test acceptance -- --ignored`.
#[test]
#[ignore]
fn criterion_12_trend_on_midsize_graph() {
    let started = Instant::now();
    let graph = synth::scale_free_weighted_cascade(28_000, 6, 0xC12);
    println!(
        "criterion 12: graph n={} m={} built in {:.0?}",
        graph.node_count(),
        graph.edge_count(),
        started.elapsed()
    );
    let cfg = ScenarioConfig::new(1000.0, 4000.0, 150.0, 8).unwrap();
    let eval_sims = 200;
    let reps = 10u64;
    let baselines = [
        BaselineSpec::UniNs,
        BaselineSpec::RandRound,
        BaselineSpec::OneShot,
        BaselineSpec::RandSeedRound,
    ];
    for &k in &[20usize, 50, 100] {
        let params = ImmParams::new(k, 0.3, 1.0).unwrap();
        let mut beats = vec![0usize; baselines.len()];
        for rep in 0..reps {
            let master = RngStream::new(0xC12).stream(rep).child(&format!("k{k}"));
            let (alloc, _) = prm_imm_oins(&graph, &cfg, &params, master.child("prm-imm")).unwrap();
            let ours = evaluate_allocation(&graph, &cfg, &alloc, eval_sims, master.child("eval-ours"))
                .unwrap()
                .final_ratio;
            for (b, spec) in baselines.iter().enumerate() {
                let other = run_baseline(
                    &graph,
                    &cfg,
                    k,
                    spec,
                    &params,
                    Setting::Oins,
                    master.child(spec.name()),
                )
                .unwrap();
                let theirs = evaluate_allocation(
                    &graph,
                    &cfg,
                    &other,
                    eval_sims,
                    master.child(&format!("eval-{}", spec.name())),
                )
                .unwrap()
                .final_ratio;
                if ours >= theirs {
                    beats[b] += 1;
                }
            }
        }
        for (b, spec) in baselines.iter().enumerate() {
            println!(
                "criterion 12: k={k}: beat {} in {}/{} repetitions",
                spec.name(),
                beats[b],
                reps
            );
            assert!(
                beats[b] >= 8,
                "k={k}: outperformed {} in only {}/{} repetitions",
                spec.name(),
                beats[b],
                reps
            );
        }
    }

    // Faster natural growth should push the allocation earlier: the maximum
    // allocated round shrinks along the sweep.
    let k = 50;
    let params = ImmParams::new(k, 0.3, 1.0).unwrap();
    let mut max_rounds = Vec::new();
    for (i, &z) in [150.0f64, 1200.0, 4800.0].iter().enumerate() {
        let cfg_z = ScenarioConfig::new(1000.0, 4000.0, z, 8).unwrap();
        let (alloc, _) = prm_imm_oins(
            &graph,
            &cfg_z,
            &params,
            RngStream::new(0xC12).child("z-sweep").stream(i as u64),
        )
        .unwrap();
        max_rounds.push(alloc.max_round());
        println!("criterion 12: z={z}: max allocated round {}", alloc.max_round());
    }
    assert!(
        max_rounds.windows(2).all(|w| w[0] >= w[1]),
        "max allocated round should not grow with z: {max_rounds:?}"
    );
    assert!(
        max_rounds.first() > max_rounds.last(),
        "max allocated round should strictly decrease across the sweep: {max_rounds:?}"
    );
    println!(
        "criterion 12 (mid-size trend): PASS in {:.0?} — max rounds over z sweep: {max_rounds:?}",
        started.elapsed()
    );
}

// Interface-level checks that the secondary-consumer surfaces behave:
// collections dump/restore losslessly and the single-round specialization
// agrees across both selection paths.
#[test]
fn collection_dump_restore_is_lossless() {
    let graph = synth::random_graph(9, 16, 7, (0.2, 0.9));
    for kind in [CollectionKind::PairWise, CollectionKind::MultiRound] {
        let mut coll = RRCollection::new(kind, &graph, 3);
        let mut sampler = RRSampler::new(&graph, 3, RngStream::new(53));
        sampler.extend(&mut coll, 300).unwrap();
        let mut bytes = Vec::new();
        coll.write_binary(&mut bytes).unwrap();
        let back = RRCollection::read_binary(&mut bytes.as_slice()).unwrap();
        assert_eq!(coll, back);
    }
}

#[test]
fn single_round_specialization_is_consistent() {
    let graph = synth::random_graph(10, 20, 8, (0.2, 0.9));
    let params = ImmParams::new(3, 0.2, 1.0).unwrap();
    let seeds = imm_single_round(&graph, 3, &params, RngStream::new(99)).unwrap();
    let weights = prm::popularity::RoundWeights::new(vec![1.0]).unwrap();
    let (alloc, _) =
        prm::selection::prm_imm_nios_with_weights(&graph, &weights, &params, RngStream::new(99))
            .unwrap();
    let nios_nodes: Vec<NodeId> = alloc.pairs().iter().map(|&(v, _)| v).collect();
    assert_eq!(seeds, nios_nodes);
}
