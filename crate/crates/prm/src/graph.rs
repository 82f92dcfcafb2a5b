//! Directed influence graphs with per-edge activation probabilities.
//!
//! Graphs are loaded from whitespace-separated edge-list text (`u v` or
//! `u v p`, `#` comments allowed), remapped to dense node ids, and exposed in
//! both forward and reverse orientation. A graph is immutable once built and
//! safe to share across any number of concurrent readers.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense node identifier in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether an edge-list file carries an explicit probability column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbColumn {
    Present,
    Absent,
}

/// Raw parsed edge list. Probabilities may still be unassigned; convert with
/// [`EdgeList::into_graph`] or [`EdgeList::apply_weighted_cascade`].
#[derive(Debug, Clone)]
pub struct EdgeList {
    labels: Vec<String>,
    edges: Vec<(u32, u32)>,
    probs: Option<Vec<f64>>,
}

/// Parse edge-list text. Node labels (arbitrary tokens) are remapped to dense
/// ids in order of first appearance; the label map is kept on the graph so
/// results can be reported in the original labels.
pub fn load_edge_list(text: &str, prob_column: ProbColumn) -> Result<EdgeList> {
    let mut label_ids: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    let mut seen: HashMap<(u32, u32), usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let expected = match prob_column {
            ProbColumn::Present => 3,
            ProbColumn::Absent => 2,
        };
        if fields.len() != expected {
            return Err(Error::Parse {
                line,
                msg: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let mut id_of = |tok: &str| -> u32 {
            if let Some(&id) = label_ids.get(tok) {
                return id;
            }
            let id = labels.len() as u32;
            labels.push(tok.to_string());
            label_ids.insert(tok.to_string(), id);
            id
        };
        let u = id_of(fields[0]);
        let v = id_of(fields[1]);
        if u == v {
            return Err(Error::domain(format!(
                "self-loop '{}' rejected at line {line}",
                fields[0]
            )));
        }
        if seen.insert((u, v), line).is_some() {
            return Err(Error::domain(format!(
                "duplicate edge {} -> {} at line {line}",
                fields[0], fields[1]
            )));
        }
        if prob_column == ProbColumn::Present {
            let p: f64 = fields[2].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid probability '{}'", fields[2]),
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::domain(format!(
                    "probability {p} out of range (0,1] at line {line}"
                )));
            }
            probs.push(p);
        }
        edges.push((u, v));
    }

    if edges.is_empty() {
        return Err(Error::domain("edge list contains no edges"));
    }

    Ok(EdgeList {
        labels,
        edges,
        probs: match prob_column {
            ProbColumn::Present => Some(probs),
            ProbColumn::Absent => None,
        },
    })
}

impl EdgeList {
    /// Assemble an edge list from dense-id pairs without probabilities
    /// (labels are the decimal ids). Panics on self-loops or duplicates.
    pub fn from_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in pairs {
            assert!((u as usize) < n && (v as usize) < n, "endpoint out of range");
            assert!(u != v, "self-loop");
            assert!(seen.insert((u, v)), "duplicate edge");
        }
        EdgeList {
            labels: (0..n).map(|i| i.to_string()).collect(),
            edges: pairs.to_vec(),
            probs: None,
        }
    }

    /// Finalize a list that already carries explicit probabilities.
    pub fn into_graph(self) -> Result<InfluenceGraph> {
        let probs = self
            .probs
            .ok_or_else(|| Error::domain("edge probabilities unassigned; load with a probability column or apply the weighted-cascade rule"))?;
        Ok(InfluenceGraph::build(self.labels, &self.edges, &probs))
    }

    /// Assign `p(u,v) = 1 / in-degree(v)` to every edge. Every edge target has
    /// in-degree at least one by construction, so this never fails.
    pub fn apply_weighted_cascade(self) -> Result<InfluenceGraph> {
        if self.probs.is_some() {
            return Err(Error::domain(
                "weighted-cascade requested but the edge list already carries probabilities",
            ));
        }
        let n = self.labels.len();
        let mut in_deg = vec![0u32; n];
        for &(_, v) in &self.edges {
            in_deg[v as usize] += 1;
        }
        let probs: Vec<f64> = self
            .edges
            .iter()
            .map(|&(_, v)| 1.0 / in_deg[v as usize] as f64)
            .collect();
        Ok(InfluenceGraph::build(self.labels, &self.edges, &probs))
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Immutable directed graph with activation probabilities, stored in CSR form
/// in both orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceGraph {
    labels: Vec<String>,
    out_offsets: Vec<u64>,
    out_targets: Vec<u32>,
    out_probs: Vec<f64>,
    in_offsets: Vec<u64>,
    in_sources: Vec<u32>,
    in_probs: Vec<f64>,
}

impl InfluenceGraph {
    /// Build directly from dense-id edges. Intended for synthetic graphs in
    /// tests and generators; the loader path goes through [`EdgeList`].
    /// Panics on self-loops, duplicates, out-of-range ids or probabilities.
    pub fn from_edges(n: usize, edges: &[(u32, u32, f64)]) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(u32, u32)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let probs: Vec<f64> = edges.iter().map(|&(_, _, p)| p).collect();
        let mut seen = std::collections::HashSet::new();
        for &(u, v, p) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            assert!(u != v, "self-loop");
            assert!(seen.insert((u, v)), "duplicate edge");
            assert!(p > 0.0 && p <= 1.0, "probability out of range");
        }
        Self::build(labels, &pairs, &probs)
    }

    fn build(labels: Vec<String>, edges: &[(u32, u32)], probs: &[f64]) -> Self {
        let n = labels.len();
        // Canonical order inside each CSR bucket: ascending opposite endpoint.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_unstable_by_key(|&e| (edges[e].0, edges[e].1));

        let mut out_offsets = vec![0u64; n + 1];
        for &(u, _) in edges {
            out_offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut out_targets = vec![0u32; edges.len()];
        let mut out_probs = vec![0f64; edges.len()];
        {
            let mut cursor = out_offsets.clone();
            for &e in &order {
                let (u, v) = edges[e];
                let slot = cursor[u as usize] as usize;
                out_targets[slot] = v;
                out_probs[slot] = probs[e];
                cursor[u as usize] += 1;
            }
        }

        order.sort_unstable_by_key(|&e| (edges[e].1, edges[e].0));
        let mut in_offsets = vec![0u64; n + 1];
        for &(_, v) in edges {
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut in_sources = vec![0u32; edges.len()];
        let mut in_probs = vec![0f64; edges.len()];
        {
            let mut cursor = in_offsets.clone();
            for &e in &order {
                let (u, v) = edges[e];
                let slot = cursor[v as usize] as usize;
                in_sources[slot] = u;
                in_probs[slot] = probs[e];
                cursor[v as usize] += 1;
            }
        }

        InfluenceGraph {
            labels,
            out_offsets,
            out_targets,
            out_probs,
            in_offsets,
            in_sources,
            in_probs,
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    /// Forward edges `(target, probability)` out of `v`, in ascending target order.
    pub fn out_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.out_offsets[v.index()] as usize;
        let hi = self.out_offsets[v.index() + 1] as usize;
        self.out_targets[lo..hi]
            .iter()
            .zip(&self.out_probs[lo..hi])
            .map(|(&t, &p)| (NodeId(t), p))
    }

    /// Reverse edges `(source, probability)` into `v`, in ascending source order.
    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let lo = self.in_offsets[v.index()] as usize;
        let hi = self.in_offsets[v.index() + 1] as usize;
        self.in_sources[lo..hi]
            .iter()
            .zip(&self.in_probs[lo..hi])
            .map(|(&s, &p)| (NodeId(s), p))
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        (self.out_offsets[v.index() + 1] - self.out_offsets[v.index()]) as usize
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        (self.in_offsets[v.index() + 1] - self.in_offsets[v.index()]) as usize
    }

    /// Accessor over the transposed orientation: for every edge `(u,v)` the
    /// reverse view lists `(v,u)` with the same probability.
    pub fn reverse_view(&self) -> ReverseView<'_> {
        ReverseView { graph: self }
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| NodeId(i as u32))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Serialize back to `u v p` edge-list text using the original labels.
    /// Isolated nodes are not representable in this format.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        for v in self.nodes() {
            for (t, p) in self.out_edges(v) {
                writeln!(out, "{} {} {}", self.label(v), self.label(t), p).unwrap();
            }
        }
        out
    }

    /// Edge set keyed by original labels, sorted; the canonical identity used
    /// by round-trip checks.
    pub fn canonical_edges(&self) -> Vec<(String, String, f64)> {
        let mut edges: Vec<(String, String, f64)> = self
            .nodes()
            .flat_map(|v| {
                self.out_edges(v)
                    .map(move |(t, p)| (self.label(v).to_string(), self.label(t).to_string(), p))
            })
            .collect();
        edges.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        edges
    }
}

/// Thin accessor for reverse propagation over an [`InfluenceGraph`].
#[derive(Clone, Copy)]
pub struct ReverseView<'g> {
    graph: &'g InfluenceGraph,
}

impl<'g> ReverseView<'g> {
    /// Edges of the reversed graph out of `v`: the in-edges of `v` in the original.
    pub fn edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + 'g {
        self.graph.in_edges(v)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}
