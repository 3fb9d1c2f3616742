//! Borderline classes and the per-cluster edge data used for drawing.

use serde::{Deserialize, Serialize};

use super::interfaces::assignment_of;
use crate::clustering::Graph;

pub const DEFAULT_BORDERLINE_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BorderlineEntry {
    pub entity: usize,
    pub home_cluster: usize,
    pub foreign_cluster: usize,
    /// Foreign class carrying the strongest tie.
    pub foreign_entity: usize,
    pub foreign_similarity: f64,
    pub home_similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BorderlineReport {
    pub ratio: f64,
    pub entries: Vec<BorderlineEntry>,
}

/// Flags entities whose strongest foreign edge is at least `ratio` times
/// their strongest home edge. Entities with no foreign weight are never
/// flagged.
pub fn borderline_classes(clusters: &[Vec<usize>], g: &Graph, ratio: f64) -> BorderlineReport {
    let of = assignment_of(clusters, g.len());
    let mut entries = Vec::new();
    for v in 0..g.len() {
        let mut home = 0.0f64;
        let mut foreign: Option<(usize, f64)> = None;
        for (u, &w) in g.row(v).iter().enumerate() {
            if u == v {
                continue;
            }
            if of[u] == of[v] {
                home = home.max(w);
            } else if w > 0.0 && foreign.is_none_or(|(_, f)| w > f) {
                foreign = Some((u, w));
            }
        }
        if let Some((u, f)) = foreign {
            if f >= ratio * home {
                entries.push(BorderlineEntry {
                    entity: v,
                    home_cluster: of[v],
                    foreign_cluster: of[u],
                    foreign_entity: u,
                    foreign_similarity: f,
                    home_similarity: home,
                });
            }
        }
    }
    BorderlineReport { ratio, entries }
}

/// Thickness class of a combined-similarity edge: `(0, .2]` → 1 up to
/// `(.8, 1]` → 5. Zero weight draws no edge.
pub fn bucket_edge(w: f64) -> Option<u8> {
    if w <= 0.0 {
        None
    } else if w <= 0.2 {
        Some(1)
    } else if w <= 0.4 {
        Some(2)
    } else if w <= 0.6 {
        Some(3)
    } else if w <= 0.8 {
        Some(4)
    } else {
        Some(5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VisualEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub bucket: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterView {
    pub cluster_id: usize,
    pub members: Vec<usize>,
    /// Intra-cluster pairs with positive weight, `source < target`.
    pub edges: Vec<VisualEdge>,
}

pub fn cluster_views(clusters: &[Vec<usize>], g: &Graph) -> Vec<ClusterView> {
    clusters
        .iter()
        .enumerate()
        .map(|(cluster_id, ms)| {
            let mut edges = Vec::new();
            for (i, &a) in ms.iter().enumerate() {
                for &b in &ms[i + 1..] {
                    let (s, t) = (a.min(b), a.max(b));
                    let w = g.weight(s, t);
                    if let Some(bucket) = bucket_edge(w) {
                        edges.push(VisualEdge {
                            source: s,
                            target: t,
                            weight: w,
                            bucket,
                        });
                    }
                }
            }
            edges.sort_by_key(|e| (e.source, e.target));
            ClusterView {
                cluster_id,
                members: ms.clone(),
                edges,
            }
        })
        .collect()
}
