//! Cluster interfaces, the provider-to-consumer interaction graph and usage
//! of scoped-out layers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ingest::{CodeEntity, CrossLayerEdge, DependencyGraph, Layer};

/// A public method of a business class, identified by owner and signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterfaceMethod {
    pub owner: usize,
    pub owner_name: String,
    pub method: String,
    pub param_types: Vec<String>,
    pub return_type: String,
}

impl InterfaceMethod {
    /// `Owner.method`, the form used in exports.
    pub fn qualified(&self) -> String {
        format!("{}.{}", self.owner_name, self.method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterInterface {
    pub cluster_id: usize,
    pub methods: Vec<InterfaceMethod>,
}

/// Directed edge from the cluster that owns `methods` to the cluster that
/// calls them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Interaction {
    pub provider: usize,
    pub consumer: usize,
    pub methods: Vec<InterfaceMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InteractionGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<Interaction>,
}

/// Cluster index of every node. Panics if the clusters do not cover
/// `0..node_count`.
pub fn assignment_of(clusters: &[Vec<usize>], node_count: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; node_count];
    for (c, ms) in clusters.iter().enumerate() {
        for &v in ms {
            out[v] = c;
        }
    }
    assert!(out.iter().all(|&c| c != usize::MAX), "clusters must cover every node");
    out
}

fn method_of(entities: &[CodeEntity], e: &crate::ingest::CallEdge) -> InterfaceMethod {
    InterfaceMethod {
        owner: e.callee,
        owner_name: entities[e.callee].name.clone(),
        method: e.method.clone(),
        param_types: e.param_types.clone(),
        return_type: e.return_type.clone(),
    }
}

/// Methods of each cluster that are called from some other cluster.
pub fn compute_interfaces(
    clusters: &[Vec<usize>],
    deps: &DependencyGraph,
    entities: &[CodeEntity],
) -> Vec<ClusterInterface> {
    let of = assignment_of(clusters, deps.node_count);
    let mut sets: Vec<BTreeSet<InterfaceMethod>> = vec![BTreeSet::new(); clusters.len()];
    for e in &deps.edges {
        if of[e.caller] != of[e.callee] {
            sets[of[e.callee]].insert(method_of(entities, e));
        }
    }
    sets.into_iter()
        .enumerate()
        .map(|(cluster_id, s)| ClusterInterface {
            cluster_id,
            methods: s.into_iter().collect(),
        })
        .collect()
}

/// One edge N→M per ordered cluster pair where members of M call methods of
/// members of N.
pub fn compute_interactions(
    clusters: &[Vec<usize>],
    deps: &DependencyGraph,
    entities: &[CodeEntity],
) -> InteractionGraph {
    let of = assignment_of(clusters, deps.node_count);
    let mut lists: BTreeMap<(usize, usize), BTreeSet<InterfaceMethod>> = BTreeMap::new();
    for e in &deps.edges {
        let (provider, consumer) = (of[e.callee], of[e.caller]);
        if provider != consumer {
            lists
                .entry((provider, consumer))
                .or_default()
                .insert(method_of(entities, e));
        }
    }
    InteractionGraph {
        nodes: (0..clusters.len()).collect(),
        edges: lists
            .into_iter()
            .map(|((provider, consumer), ms)| Interaction {
                provider,
                consumer,
                methods: ms.into_iter().collect(),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossLayerUsage {
    pub cluster_id: usize,
    pub layers: BTreeMap<Layer, Vec<String>>,
}

/// Scoped-out classes called by each cluster's members, grouped by layer.
pub fn cross_layer_usage(clusters: &[Vec<usize>], node_count: usize, side: &[CrossLayerEdge]) -> Vec<CrossLayerUsage> {
    let of = assignment_of(clusters, node_count);
    let mut sets: Vec<BTreeMap<Layer, BTreeSet<String>>> = vec![BTreeMap::new(); clusters.len()];
    for e in side {
        sets[of[e.caller]].entry(e.layer).or_default().insert(e.callee.clone());
    }
    sets.into_iter()
        .enumerate()
        .map(|(cluster_id, m)| CrossLayerUsage {
            cluster_id,
            layers: m.into_iter().map(|(l, s)| (l, s.into_iter().collect())).collect(),
        })
        .collect()
}
