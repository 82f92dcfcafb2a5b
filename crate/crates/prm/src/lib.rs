//! Popularity ratio maximization on social networks.
//!
//! A novice item competes with an established one for a naturally growing
//! customer base that splits proportionally to current popularity (the PA-IC
//! model). The novice buys influence by seeding cascades over a social graph
//! in each of `T` promotion rounds; the goal is to allocate a seed budget over
//! rounds so the final popularity ratio is as large as possible.
//!
//! The crate provides:
//! - [`graph`]: edge-list loading, weighted-cascade probabilities, forward and
//!   reverse adjacency;
//! - [`diffusion`]: independent-cascade simulation, Monte Carlo spread
//!   estimators, and exact live-edge enumeration oracles for small graphs;
//! - [`popularity`]: the growth recursion, exact and surrogate objectives,
//!   round weights, allocation evaluation;
//! - [`sampling`]: reverse-reachable set generation (round-tagged and
//!   multi-round variants) and the weighted-coverage estimators;
//! - [`selection`]: the PRM-IMM seed allocation algorithms for the OINS and
//!   NIOS settings, plus single-round IMM;
//! - [`baselines`]: the heuristic allocation strategies used for comparison;
//! - [`variants`]: seed/round minimization, the sandwich strategy under known
//!   competitor promotion, and multi-item composition.
//!
//! The OIOS and NINS settings are not first-class: OIOS evaluation works by
//! combining overlapping-influence evaluation with an overlapping-seed
//! allocation, and NINS conversely; only OINS and NIOS have dedicated
//! selection algorithms here.
//!
//! Everything stochastic takes an explicit [`rng::RngStream`], and parallel
//! code assigns one stream per simulation or sample, so results are
//! reproducible bit-for-bit regardless of thread count.

pub mod baselines;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod popularity;
pub mod rng;
pub mod sampling;
pub mod selection;
pub mod synth;
pub mod variants;

pub use error::{Error, Result};
