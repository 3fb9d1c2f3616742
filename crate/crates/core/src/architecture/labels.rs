//! Concept-word labels and centroids.

use serde::{Deserialize, Serialize};

use crate::clustering::Graph;
use crate::similarity::{FeatureMatrix, SparseVec};

pub const DEFAULT_LABEL_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptScore {
    pub concept: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterLabel {
    pub cluster_id: usize,
    pub top_concepts: Vec<ConceptScore>,
    pub centroid: usize,
    /// Scores are raw concept counts because every weighted score was zero.
    pub raw_frequency: bool,
}

impl ClusterLabel {
    /// Concepts joined with spaces, e.g. `"Invoice Payment"`.
    pub fn text(&self) -> String {
        self.top_concepts
            .iter()
            .map(|c| c.concept.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn summed(m: &FeatureMatrix, members: &[usize]) -> SparseVec {
    let mut acc = SparseVec::new();
    for &v in members {
        acc.add_assign(&m.rows[v]);
    }
    acc
}

fn top_k(m: &FeatureMatrix, sums: &SparseVec, k: usize) -> Vec<ConceptScore> {
    let mut scored: Vec<(usize, f64)> = sums.iter().filter(|&(_, w)| w > 0.0).collect();
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| m.vocabulary[a.0].cmp(&m.vocabulary[b.0]))
    });
    scored
        .into_iter()
        .take(k)
        .map(|(c, score)| ConceptScore {
            concept: m.labels[c].clone(),
            score,
        })
        .collect()
}

/// Member with the largest summed weight to its co-members, lowest id on
/// ties.
pub fn centroid(members: &[usize], g: &Graph) -> usize {
    let mut best = (members[0], f64::NEG_INFINITY);
    for &v in members {
        let s: f64 = members.iter().filter(|&&u| u != v).map(|&u| g.weight(v, u)).sum();
        if s > best.1 || (s == best.1 && v < best.0) {
            best = (v, s);
        }
    }
    best.0
}

/// Top-`k` class-name concepts of each cluster by summed tf-idf weight.
/// `raw` must share the vocabulary of `weighted`; it supplies the scores
/// when every weighted score of a cluster is zero.
pub fn auto_label(
    clusters: &[Vec<usize>],
    weighted: &FeatureMatrix,
    raw: &FeatureMatrix,
    g: &Graph,
    k: usize,
) -> Vec<ClusterLabel> {
    debug_assert_eq!(weighted.vocabulary, raw.vocabulary);
    clusters
        .iter()
        .enumerate()
        .map(|(cluster_id, ms)| {
            let mut top = top_k(weighted, &summed(weighted, ms), k);
            let raw_frequency = top.is_empty();
            if raw_frequency {
                top = top_k(raw, &summed(raw, ms), k);
            }
            ClusterLabel {
                cluster_id,
                top_concepts: top,
                centroid: centroid(ms, g),
                raw_frequency,
            }
        })
        .collect()
}
