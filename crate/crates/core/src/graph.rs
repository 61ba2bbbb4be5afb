//! Semantic-similarity graph construction (PAV, SSV, MSV) and the coherence
//! score over the resulting directed weighted graph.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::preprocess::Document;
use crate::similarity::{sim_distance_weighted, sim_mixed, SimilarityParams};

/// Graph-construction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    /// Edge to the nearest preceding sentence with positive mixed similarity.
    Pav,
    /// Single edge to the most distance-weighted-similar sentence.
    Ssv,
    /// Edges to every sentence whose distance-weighted similarity exceeds theta.
    Msv,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Pav => write!(f, "PAV"),
            Approach::Ssv => write!(f, "SSV"),
            Approach::Msv => write!(f, "MSV"),
        }
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PAV" => Ok(Approach::Pav),
            "SSV" => Ok(Approach::Ssv),
            "MSV" => Ok(Approach::Msv),
            other => Err(format!("unknown approach '{other}' (expected PAV, SSV or MSV)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceGraph {
    pub n_vertices: usize,
    pub edges: Vec<Edge>,
    pub approach: Approach,
    pub params: SimilarityParams,
}

/// PAV: each vertex i >= 1 scans predecessors i-1, i-2, ..., 0 and connects
/// to the first one with mixed similarity > 0. Vertex 0 is always edge-free.
pub fn build_pav(doc: &Document, alpha: f64) -> CoherenceGraph {
    let n = doc.len();
    let mut edges = Vec::new();
    for i in 1..n {
        for j in (0..i).rev() {
            let w = sim_mixed(&doc.sentences[i], &doc.sentences[j], alpha);
            if w > 0.0 {
                edges.push(Edge { from: i, to: j, weight: w });
                break;
            }
        }
    }
    CoherenceGraph {
        n_vertices: n,
        edges,
        approach: Approach::Pav,
        params: SimilarityParams { alpha, theta: 0.0 },
    }
}

/// SSV: each vertex connects to the sentence maximizing the distance-weighted
/// cosine, when that maximum is positive. Ties break toward the closer
/// sentence, then the lower index.
pub fn build_ssv(doc: &Document) -> CoherenceGraph {
    let n = doc.len();
    let mut edges = Vec::new();
    for i in 0..n {
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if j == i {
                continue;
            }
            let w = sim_distance_weighted(&doc.sentences[i], &doc.sentences[j])
                .expect("distinct indices");
            let better = match best {
                None => w > 0.0,
                Some((bw, bj)) => {
                    w > bw
                        || (w == bw
                            && (i.abs_diff(j) < i.abs_diff(bj)
                                || (i.abs_diff(j) == i.abs_diff(bj) && j < bj)))
                }
            };
            if better && w > 0.0 {
                best = Some((w, j));
            }
        }
        if let Some((w, j)) = best {
            edges.push(Edge { from: i, to: j, weight: w });
        }
    }
    CoherenceGraph {
        n_vertices: n,
        edges,
        approach: Approach::Ssv,
        params: SimilarityParams { alpha: 0.0, theta: 0.0 },
    }
}

/// MSV: an edge for every ordered pair whose distance-weighted cosine is
/// strictly above theta. Weights are symmetric, so edges come in pairs.
pub fn build_msv(doc: &Document, theta: f64) -> CoherenceGraph {
    let n = doc.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = sim_distance_weighted(&doc.sentences[i], &doc.sentences[j])
                .expect("distinct indices");
            if w > theta {
                edges.push(Edge { from: i, to: j, weight: w });
                edges.push(Edge { from: j, to: i, weight: w });
            }
        }
    }
    CoherenceGraph {
        n_vertices: n,
        edges,
        approach: Approach::Msv,
        params: SimilarityParams { alpha: 0.0, theta },
    }
}

/// Dispatches on the approach. PAV uses `params.alpha`, MSV `params.theta`.
pub fn build_graph(doc: &Document, approach: Approach, params: &SimilarityParams) -> CoherenceGraph {
    match approach {
        Approach::Pav => build_pav(doc, params.alpha),
        Approach::Ssv => build_ssv(doc),
        Approach::Msv => build_msv(doc, params.theta),
    }
}

/// Mean over vertices of the mean outgoing edge weight. A vertex without
/// outgoing edges contributes 0 but stays in the denominator.
pub fn coherence_score(graph: &CoherenceGraph) -> f64 {
    let n = graph.n_vertices;
    if n == 0 {
        return 0.0;
    }
    let mut sums = vec![0.0f64; n];
    let mut degrees = vec![0usize; n];
    for e in &graph.edges {
        sums[e.from] += e.weight;
        degrees[e.from] += 1;
    }
    let total: f64 = sums
        .iter()
        .zip(&degrees)
        .map(|(s, &d)| if d == 0 { 0.0 } else { s / d as f64 })
        .sum();
    total / n as f64
}

/// Writes the debug dump: a header line with N, approach and params, then
/// one `from to weight` line per edge.
pub fn dump_graph<W: Write>(graph: &CoherenceGraph, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "# n_vertices={} approach={} alpha={} theta={}",
        graph.n_vertices, graph.approach, graph.params.alpha, graph.params.theta
    )?;
    for e in &graph.edges {
        writeln!(out, "{} {} {}", e.from, e.to, e.weight)?;
    }
    Ok(())
}
