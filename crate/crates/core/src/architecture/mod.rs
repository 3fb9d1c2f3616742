//! Views derived from a partition: interfaces, interactions, labels,
//! borderline classes, drawing data, hierarchy and reassignment.

pub mod borderline;
pub mod hierarchy;
pub mod interfaces;
pub mod labels;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use borderline::{
    borderline_classes, bucket_edge, cluster_views, BorderlineEntry, BorderlineReport, ClusterView, VisualEdge,
    DEFAULT_BORDERLINE_RATIO,
};
pub use hierarchy::{build_hierarchy, cluster_graph, cluster_pair_similarity, Hierarchy, HierarchyLevel};
pub use interfaces::{
    assignment_of, compute_interactions, compute_interfaces, cross_layer_usage, ClusterInterface, CrossLayerUsage,
    Interaction, InteractionGraph, InterfaceMethod,
};
pub use labels::{auto_label, centroid, ClusterLabel, ConceptScore, DEFAULT_LABEL_COUNT};

use crate::clustering::{Graph, Partition, QualityReport, SearchConfig};
use crate::error::{Error, Result};
use crate::ingest::{CodeEntity, CrossLayerEdge, DependencyGraph};
use crate::similarity::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ArchitectureOptions {
    pub borderline_ratio: f64,
    pub label_count: usize,
    /// Search settings reused for every hierarchy level.
    pub hierarchy: SearchConfig,
}

impl Default for ArchitectureOptions {
    fn default() -> Self {
        ArchitectureOptions {
            borderline_ratio: DEFAULT_BORDERLINE_RATIO,
            label_count: DEFAULT_LABEL_COUNT,
            hierarchy: SearchConfig::default(),
        }
    }
}

impl ArchitectureOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.borderline_ratio.is_finite() && self.borderline_ratio > 0.0) {
            return Err(Error::Config(format!(
                "borderline ratio must be positive, got {}",
                self.borderline_ratio
            )));
        }
        if self.label_count == 0 {
            return Err(Error::Config("label count must be at least 1".into()));
        }
        self.hierarchy.validate()
    }
}

/// Everything the derivations read.
#[derive(Debug, Clone, Copy)]
pub struct ArchitectureInputs<'a> {
    pub entities: &'a [CodeEntity],
    pub dependencies: &'a DependencyGraph,
    pub cross_layer: &'a [CrossLayerEdge],
    /// Class-name concepts, tf-idf weighted.
    pub class_names: &'a FeatureMatrix,
    /// Same vocabulary, raw counts.
    pub raw_class_names: &'a FeatureMatrix,
    pub graph: &'a Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterSummary {
    pub id: usize,
    pub members: Vec<usize>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Architecture {
    pub clusters: Vec<ClusterSummary>,
    pub quality: QualityReport,
    pub interfaces: Vec<ClusterInterface>,
    pub interactions: InteractionGraph,
    pub labels: Vec<ClusterLabel>,
    pub borderline: BorderlineReport,
    pub views: Vec<ClusterView>,
    pub hierarchy: Hierarchy,
    pub cross_layer: Vec<CrossLayerUsage>,
}

impl Architecture {
    /// Derives every view of `p`. Cluster ids follow the canonical order
    /// (clusters sorted by smallest member).
    pub fn derive(inputs: &ArchitectureInputs<'_>, p: &Partition, opts: &ArchitectureOptions) -> Result<Self> {
        let g = inputs.graph;
        let cs = p.clusters();
        let clusters = cs
            .iter()
            .enumerate()
            .map(|(id, ms)| ClusterSummary {
                id,
                members: ms.clone(),
                names: ms.iter().map(|&v| inputs.entities[v].name.clone()).collect(),
            })
            .collect();
        Ok(Architecture {
            clusters,
            quality: p.quality(),
            interfaces: compute_interfaces(&cs, inputs.dependencies, inputs.entities),
            interactions: compute_interactions(&cs, inputs.dependencies, inputs.entities),
            labels: auto_label(&cs, inputs.class_names, inputs.raw_class_names, g, opts.label_count),
            borderline: borderline_classes(&cs, g, opts.borderline_ratio),
            views: cluster_views(&cs, g),
            hierarchy: build_hierarchy(&cs, g, &opts.hierarchy)?,
            cross_layer: cross_layer_usage(&cs, g.len(), inputs.cross_layer),
        })
    }

    pub fn partition_clusters(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }
}

/// Destination of a manual move: an existing cluster id or `"new"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawClusterRef", into = "RawClusterRef")]
pub enum ClusterRef {
    Existing(usize),
    New,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawClusterRef {
    Id(usize),
    Word(String),
}

impl TryFrom<RawClusterRef> for ClusterRef {
    type Error = String;

    fn try_from(r: RawClusterRef) -> std::result::Result<Self, String> {
        match r {
            RawClusterRef::Id(i) => Ok(ClusterRef::Existing(i)),
            RawClusterRef::Word(w) if w == "new" => Ok(ClusterRef::New),
            RawClusterRef::Word(w) => Err(format!("expected a cluster id or \"new\", got {w:?}")),
        }
    }
}

impl From<ClusterRef> for RawClusterRef {
    fn from(c: ClusterRef) -> Self {
        match c {
            ClusterRef::Existing(i) => RawClusterRef::Id(i),
            ClusterRef::New => RawClusterRef::Word("new".into()),
        }
    }
}

impl fmt::Display for ClusterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClusterRef::Existing(i) => write!(f, "{i}"),
            ClusterRef::New => f.write_str("new"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClassMove {
    pub entity: usize,
    pub target: ClusterRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RejectedMove {
    #[serde(rename = "move")]
    pub class_move: ClassMove,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reassignment {
    pub architecture: Architecture,
    pub applied: usize,
    pub rejected: Vec<RejectedMove>,
}

/// Applies manual moves in order and re-derives every view. Cluster ids in
/// moves refer to `current`; invalid moves are skipped and reported.
pub fn reassign_and_refresh(
    inputs: &ArchitectureInputs<'_>,
    current: &Architecture,
    moves: &[ClassMove],
    opts: &ArchitectureOptions,
) -> Result<Reassignment> {
    let n = inputs.graph.len();
    let k = current.clusters.len();
    let mut labels = assignment_of(&current.partition_clusters(), n);
    let mut next_label = k;
    let mut applied = 0;
    let mut rejected = Vec::new();
    for &m in moves {
        let reason = if m.entity >= n {
            Some(format!("unknown entity {}", m.entity))
        } else {
            match m.target {
                ClusterRef::Existing(c) if c >= k => Some(format!("unknown cluster {c}")),
                _ => None,
            }
        };
        if let Some(reason) = reason {
            rejected.push(RejectedMove { class_move: m, reason });
            continue;
        }
        labels[m.entity] = match m.target {
            ClusterRef::Existing(c) => c,
            ClusterRef::New => {
                next_label += 1;
                next_label - 1
            }
        };
        applied += 1;
    }
    let p = Partition::from_assignment(inputs.graph, &labels);
    Ok(Reassignment {
        architecture: Architecture::derive(inputs, &p, opts)?,
        applied,
        rejected,
    })
}
