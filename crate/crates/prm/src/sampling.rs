//! Reverse-reachable sampling and weighted-coverage estimation.
//!
//! An RR set collects every node that reaches a uniformly random root in a
//! sampled live-edge graph. Two task-specific flavors extend it:
//!
//! - a *round-tagged* (pair-wise) RR set carries a round drawn uniformly from
//!   `[1,T]`; a collection of them turns round-weighted influence into a
//!   weighted coverage function over `(node, round)` pairs;
//! - a *multi-round* RR set draws `T` independent RR sets from one shared
//!   root; it estimates the non-overlapping-influence objective, where a node
//!   only counts for the earliest round that reaches it.
//!
//! Collections keep an inverted index from `(node, round)` to the samples
//! containing that pair; the greedy selection in [`crate::selection`] runs
//! entirely on that index. Generation is parallel with one RNG stream per
//! sample and the index is rebuilt by a deterministic merge, so collections
//! are identical regardless of thread count. Extending a collection never
//! reuses a stream id, which keeps all samples mutually independent across
//! the halving schedule's regeneration step.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeId};
use crate::popularity::{RoundWeights, SeedAllocation};
use crate::rng::RngStream;

/// Nodes that reach `root` in one sampled live-edge graph, in reverse-BFS
/// visit order (root first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSet {
    pub root: NodeId,
    pub members: Vec<NodeId>,
}

/// An RR set tagged with a uniformly random round; stands for the pair set
/// `R x {t}` without materializing the pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwRr {
    pub rr: RRSet,
    pub round: usize,
}

/// `T` independent RR sets sharing one root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrRr {
    pub root: NodeId,
    pub per_round: Vec<Vec<NodeId>>,
}

// One-shot variant; the batch sampler uses the stamped version to avoid
// clearing an N-sized buffer per sample. Both consume randomness identically.
fn reverse_bfs<R: Rng>(graph: &InfluenceGraph, root: u32, rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    out.push(root);
    let mut visited = vec![false; graph.node_count()];
    visited[root as usize] = true;
    let mut head = 0;
    while head < out.len() {
        let v = out[head];
        head += 1;
        for (u, p) in graph.in_edges(NodeId(v)) {
            if !visited[u.index()] && rng.gen::<f64>() < p {
                visited[u.index()] = true;
                out.push(u.0);
            }
        }
    }
}

/// Reusable visited-marking scratch so repeated BFS runs do not clear an
/// `N`-sized buffer each time.
struct Scratch {
    stamp: Vec<u32>,
    current: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            stamp: vec![0; n],
            current: 0,
        }
    }

    fn begin(&mut self) {
        if self.current == u32::MAX {
            self.stamp.fill(0);
            self.current = 0;
        }
        self.current += 1;
    }

    fn mark(&mut self, v: u32) -> bool {
        if self.stamp[v as usize] == self.current {
            false
        } else {
            self.stamp[v as usize] = self.current;
            true
        }
    }
}

fn reverse_bfs_stamped<R: Rng>(
    graph: &InfluenceGraph,
    root: u32,
    rng: &mut R,
    scratch: &mut Scratch,
    out: &mut Vec<u32>,
) {
    out.clear();
    scratch.begin();
    scratch.mark(root);
    out.push(root);
    let mut head = 0;
    while head < out.len() {
        let v = out[head];
        head += 1;
        for (u, p) in graph.in_edges(NodeId(v)) {
            if scratch.stamp[u.index()] != scratch.current && rng.gen::<f64>() < p {
                scratch.mark(u.0);
                out.push(u.0);
            }
        }
    }
}

/// One RR set from a uniformly random root.
pub fn gen_rr_set(graph: &InfluenceGraph, rng: RngStream) -> RRSet {
    let mut r = rng.rng();
    let root = r.gen_range(0..graph.node_count() as u32);
    let mut members = Vec::new();
    reverse_bfs(graph, root, &mut r, &mut members);
    RRSet {
        root: NodeId(root),
        members: members.into_iter().map(NodeId).collect(),
    }
}

/// One RR set from a fixed root (the conditioned version of [`gen_rr_set`]).
pub fn gen_rr_set_rooted(graph: &InfluenceGraph, root: NodeId, rng: RngStream) -> RRSet {
    let mut r = rng.rng();
    let mut members = Vec::new();
    reverse_bfs(graph, root.0, &mut r, &mut members);
    RRSet {
        root,
        members: members.into_iter().map(NodeId).collect(),
    }
}

/// One round-tagged RR set: RR sample first, then a round uniform in `[1,T]`.
pub fn gen_pw_rr(graph: &InfluenceGraph, t_max: usize, rng: RngStream) -> PwRr {
    assert!(t_max >= 1);
    let mut r = rng.rng();
    let root = r.gen_range(0..graph.node_count() as u32);
    let mut members = Vec::new();
    reverse_bfs(graph, root, &mut r, &mut members);
    let round = if t_max == 1 { 1 } else { r.gen_range(1..=t_max) };
    PwRr {
        rr: RRSet {
            root: NodeId(root),
            members: members.into_iter().map(NodeId).collect(),
        },
        round,
    }
}

/// One multi-round RR set: a shared uniform root, then `T` independent
/// reverse-BFS samples from it.
pub fn gen_mr_rr(graph: &InfluenceGraph, t_max: usize, rng: RngStream) -> MrRr {
    assert!(t_max >= 1);
    let mut r = rng.rng();
    let root = r.gen_range(0..graph.node_count() as u32);
    let mut per_round = Vec::with_capacity(t_max);
    let mut buf = Vec::new();
    for _ in 0..t_max {
        reverse_bfs(graph, root, &mut r, &mut buf);
        per_round.push(buf.iter().copied().map(NodeId).collect());
    }
    MrRr {
        root: NodeId(root),
        per_round,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectionKind {
    PairWise,
    MultiRound,
}

/// A bag of RR samples plus the inverted `(node, round) -> sample ids` index.
#[derive(Debug, Clone, PartialEq)]
pub struct RRCollection {
    kind: CollectionKind,
    n: usize,
    t_max: usize,
    theta: usize,
    /// Round tag per sample (pair-wise collections only).
    rounds: Vec<u16>,
    /// Flattened member lists. Pair-wise: one unit per sample. Multi-round:
    /// `t_max` units per sample, in round order. Each unit starts at its root.
    unit_offsets: Vec<u64>,
    members: Vec<u32>,
    /// `index[v * t_max + (t-1)]` lists the samples containing pair `(v, t)`,
    /// in ascending sample id order.
    index: Vec<Vec<u32>>,
}

impl RRCollection {
    pub fn new(kind: CollectionKind, graph: &InfluenceGraph, t_max: usize) -> Self {
        assert!(t_max >= 1);
        RRCollection {
            kind,
            n: graph.node_count(),
            t_max,
            theta: 0,
            rounds: Vec::new(),
            unit_offsets: vec![0],
            members: Vec::new(),
            index: vec![Vec::new(); graph.node_count() * t_max],
        }
    }

    pub fn kind(&self) -> CollectionKind {
        self.kind
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> usize {
        self.t_max
    }

    /// Total member entries across all samples; the memory-side driver of
    /// sampling cost.
    pub fn total_members(&self) -> u64 {
        self.members.len() as u64
    }

    /// Samples containing the pair `(v, t)` (`t` 1-based), ascending.
    pub fn covering(&self, v: NodeId, t: usize) -> &[u32] {
        &self.index[v.index() * self.t_max + (t - 1)]
    }

    /// Round tag and members of a pair-wise sample.
    pub fn pw_sample(&self, i: usize) -> (usize, &[u32]) {
        debug_assert_eq!(self.kind, CollectionKind::PairWise);
        let lo = self.unit_offsets[i] as usize;
        let hi = self.unit_offsets[i + 1] as usize;
        (self.rounds[i] as usize, &self.members[lo..hi])
    }

    /// Round-`t` member list of a multi-round sample (`t` 1-based).
    pub fn mr_sample_round(&self, i: usize, t: usize) -> &[u32] {
        debug_assert_eq!(self.kind, CollectionKind::MultiRound);
        let unit = i * self.t_max + (t - 1);
        let lo = self.unit_offsets[unit] as usize;
        let hi = self.unit_offsets[unit + 1] as usize;
        &self.members[lo..hi]
    }

    pub fn root(&self, i: usize) -> NodeId {
        let unit = match self.kind {
            CollectionKind::PairWise => i,
            CollectionKind::MultiRound => i * self.t_max,
        };
        NodeId(self.members[self.unit_offsets[unit] as usize])
    }

    pub(crate) fn push_pw(&mut self, round: u16, members: &[u32]) {
        let id = self.theta as u32;
        self.rounds.push(round);
        self.members.extend_from_slice(members);
        self.unit_offsets.push(self.members.len() as u64);
        for &v in members {
            self.index[v as usize * self.t_max + (round as usize - 1)].push(id);
        }
        self.theta += 1;
    }

    pub(crate) fn push_mr(&mut self, per_round: &[Vec<u32>]) {
        debug_assert_eq!(per_round.len(), self.t_max);
        let id = self.theta as u32;
        for (ti, ms) in per_round.iter().enumerate() {
            self.members.extend_from_slice(ms);
            self.unit_offsets.push(self.members.len() as u64);
            for &v in ms {
                self.index[v as usize * self.t_max + ti].push(id);
            }
        }
        self.theta += 1;
    }

    /// Serialize to the debug dump format: a fixed header followed by
    /// length-prefixed member lists (little-endian).
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"RRCOL1")?;
        w.write_all(&[match self.kind {
            CollectionKind::PairWise => 0u8,
            CollectionKind::MultiRound => 1u8,
        }])?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.t_max as u16).to_le_bytes())?;
        w.write_all(&(self.theta as u64).to_le_bytes())?;
        for i in 0..self.theta {
            match self.kind {
                CollectionKind::PairWise => {
                    let (round, ms) = self.pw_sample(i);
                    w.write_all(&(round as u16).to_le_bytes())?;
                    w.write_all(&(ms.len() as u32).to_le_bytes())?;
                    for &v in ms {
                        w.write_all(&v.to_le_bytes())?;
                    }
                }
                CollectionKind::MultiRound => {
                    for t in 1..=self.t_max {
                        let ms = self.mr_sample_round(i, t);
                        w.write_all(&(ms.len() as u32).to_le_bytes())?;
                        for &v in ms {
                            w.write_all(&v.to_le_bytes())?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        fn read_exact<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
            let mut buf = [0u8; K];
            r.read_exact(&mut buf)?;
            Ok(buf)
        }
        let magic = read_exact::<6>(r)?;
        if &magic != b"RRCOL1" {
            return Err(Error::domain("not an RR collection dump"));
        }
        let kind = match read_exact::<1>(r)?[0] {
            0 => CollectionKind::PairWise,
            1 => CollectionKind::MultiRound,
            k => return Err(Error::domain(format!("unknown collection kind {k}"))),
        };
        let n = u64::from_le_bytes(read_exact::<8>(r)?) as usize;
        let t_max = u16::from_le_bytes(read_exact::<2>(r)?) as usize;
        let theta = u64::from_le_bytes(read_exact::<8>(r)?) as usize;
        let mut coll = RRCollection {
            kind,
            n,
            t_max,
            theta: 0,
            rounds: Vec::new(),
            unit_offsets: vec![0],
            members: Vec::new(),
            index: vec![Vec::new(); n * t_max],
        };
        let mut buf = Vec::new();
        for _ in 0..theta {
            match kind {
                CollectionKind::PairWise => {
                    let round = u16::from_le_bytes(read_exact::<2>(r)?);
                    let len = u32::from_le_bytes(read_exact::<4>(r)?) as usize;
                    buf.clear();
                    for _ in 0..len {
                        buf.push(u32::from_le_bytes(read_exact::<4>(r)?));
                    }
                    coll.push_pw(round, &buf);
                }
                CollectionKind::MultiRound => {
                    let mut per_round = Vec::with_capacity(t_max);
                    for _ in 0..t_max {
                        let len = u32::from_le_bytes(read_exact::<4>(r)?) as usize;
                        let mut ms = Vec::with_capacity(len);
                        for _ in 0..len {
                            ms.push(u32::from_le_bytes(read_exact::<4>(r)?));
                        }
                        per_round.push(ms);
                    }
                    coll.push_mr(&per_round);
                }
            }
        }
        Ok(coll)
    }
}

/// Incremental, stream-disciplined sample generator. Every sample consumes a
/// fresh stream id, including across collection regenerations.
pub struct RRSampler<'g> {
    graph: &'g InfluenceGraph,
    t_max: usize,
    base: RngStream,
    next_stream: u64,
}

impl<'g> RRSampler<'g> {
    pub fn new(graph: &'g InfluenceGraph, t_max: usize, base: RngStream) -> Self {
        assert!(t_max >= 1);
        RRSampler {
            graph,
            t_max,
            base,
            next_stream: 0,
        }
    }

    pub fn samples_drawn(&self) -> u64 {
        self.next_stream
    }

    /// Append `count` fresh samples of the collection's kind.
    pub fn extend(&mut self, coll: &mut RRCollection, count: usize) -> Result<()> {
        if coll.node_count() != self.graph.node_count() || coll.horizon() != self.t_max {
            return Err(Error::domain("collection does not match this sampler"));
        }
        let start = self.next_stream;
        self.next_stream += count as u64;
        let graph = self.graph;
        let t_max = self.t_max;
        let base = self.base;
        match coll.kind() {
            CollectionKind::PairWise => {
                let samples: Vec<(u16, Vec<u32>)> = (0..count)
                    .into_par_iter()
                    .map_init(
                        || Scratch::new(graph.node_count()),
                        |scratch, i| {
                            let mut rng = base.stream(start + i as u64).rng();
                            let root = rng.gen_range(0..graph.node_count() as u32);
                            let mut members = Vec::new();
                            reverse_bfs_stamped(graph, root, &mut rng, scratch, &mut members);
                            let round =
                                if t_max == 1 { 1 } else { rng.gen_range(1..=t_max) } as u16;
                            (round, members)
                        },
                    )
                    .collect();
                for (round, members) in &samples {
                    coll.push_pw(*round, members);
                }
            }
            CollectionKind::MultiRound => {
                let samples: Vec<Vec<Vec<u32>>> = (0..count)
                    .into_par_iter()
                    .map_init(
                        || Scratch::new(graph.node_count()),
                        |scratch, i| {
                            let mut rng = base.stream(start + i as u64).rng();
                            let root = rng.gen_range(0..graph.node_count() as u32);
                            (0..t_max)
                                .map(|_| {
                                    let mut members = Vec::new();
                                    reverse_bfs_stamped(
                                        graph, root, &mut rng, scratch, &mut members,
                                    );
                                    members
                                })
                                .collect()
                        },
                    )
                    .collect();
                for per_round in &samples {
                    coll.push_mr(per_round);
                }
            }
        }
        Ok(())
    }
}

fn check_estimator_inputs(
    coll: &RRCollection,
    expect: CollectionKind,
    allocation: &SeedAllocation,
    weights: &RoundWeights,
) -> Result<()> {
    if coll.kind() != expect {
        return Err(Error::domain("estimator called on the wrong collection kind"));
    }
    if weights.rounds() != coll.horizon() {
        return Err(Error::domain(format!(
            "weights cover {} rounds but the collection spans {}",
            weights.rounds(),
            coll.horizon()
        )));
    }
    if allocation.max_round() > coll.horizon() {
        return Err(Error::domain(format!(
            "allocation uses round {} beyond the collection horizon {}",
            allocation.max_round(),
            coll.horizon()
        )));
    }
    if coll.theta() == 0 {
        return Err(Error::domain("cannot estimate from an empty collection"));
    }
    Ok(())
}

/// Weighted-coverage estimate of the round-weighted influence:
/// `(N*T/theta) * sum_i w_{t_i} * [allocation covers sample i]`.
pub fn rho_hat(
    coll: &RRCollection,
    allocation: &SeedAllocation,
    weights: &RoundWeights,
) -> Result<f64> {
    rho_hat_with_se(coll, allocation, weights).map(|(est, _)| est)
}

/// [`rho_hat`] plus the standard error of the estimate.
pub fn rho_hat_with_se(
    coll: &RRCollection,
    allocation: &SeedAllocation,
    weights: &RoundWeights,
) -> Result<(f64, f64)> {
    check_estimator_inputs(coll, CollectionKind::PairWise, allocation, weights)?;
    let theta = coll.theta();
    let mut covered = vec![false; theta];
    for &(v, t) in allocation.pairs() {
        for &i in coll.covering(v, t) {
            covered[i as usize] = true;
        }
    }
    let scale = (coll.node_count() * coll.horizon()) as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (i, &c) in covered.iter().enumerate() {
        if c {
            let w = weights.at(coll.rounds[i] as usize);
            sum += w;
            sumsq += w * w;
        }
    }
    let nt = theta as f64;
    let mean = sum / nt;
    let est = scale * mean;
    let se = if theta < 2 {
        0.0
    } else {
        let var = (sumsq - nt * mean * mean).max(0.0) / (nt - 1.0);
        scale * (var / nt).sqrt()
    };
    Ok((est, se))
}

/// Max-weight coverage estimate of the non-overlapping-influence objective:
/// each sample contributes the largest weight over rounds its root was
/// covered in, scaled by `N/theta`. With non-increasing weights that is the
/// weight of the lowest covered round.
pub fn rho_hat_ni(
    coll: &RRCollection,
    allocation: &SeedAllocation,
    weights: &RoundWeights,
) -> Result<f64> {
    rho_hat_ni_with_se(coll, allocation, weights).map(|(est, _)| est)
}

/// [`rho_hat_ni`] plus the standard error of the estimate.
pub fn rho_hat_ni_with_se(
    coll: &RRCollection,
    allocation: &SeedAllocation,
    weights: &RoundWeights,
) -> Result<(f64, f64)> {
    check_estimator_inputs(coll, CollectionKind::MultiRound, allocation, weights)?;
    let theta = coll.theta();
    let sentinel = (coll.horizon() + 1) as u16;
    let mut min_round = vec![sentinel; theta];
    for &(v, t) in allocation.pairs() {
        for &i in coll.covering(v, t) {
            min_round[i as usize] = min_round[i as usize].min(t as u16);
        }
    }
    let scale = coll.node_count() as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for &mr in &min_round {
        let w = weights.at(mr as usize);
        sum += w;
        sumsq += w * w;
    }
    let nt = theta as f64;
    let mean = sum / nt;
    let est = scale * mean;
    let se = if theta < 2 {
        0.0
    } else {
        let var = (sumsq - nt * mean * mean).max(0.0) / (nt - 1.0);
        scale * (var / nt).sqrt()
    };
    Ok((est, se))
}
