//! Repeated clustering of clusters.

use serde::{Deserialize, Serialize};

use crate::clustering::{search, Graph, Partition, QualityReport, SearchConfig, SeedContext, SeedStrategy};
use crate::error::Result;

/// Mean entity-level weight over all cross pairs of two disjoint groups.
pub fn cluster_pair_similarity(a: &[usize], b: &[usize], g: &Graph) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let total: f64 = a.iter().flat_map(|&x| b.iter().map(move |&y| g.weight(x, y))).sum();
    total / (a.len() * b.len()) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HierarchyLevel {
    /// Indices into the previous level's clusters; level 0 lists entity ids.
    pub groups: Vec<Vec<usize>>,
    /// Entity ids covered by each cluster of this level.
    pub members: Vec<Vec<usize>>,
    /// Quality of this level's partition over its own node graph.
    pub quality: QualityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Hierarchy {
    pub levels: Vec<HierarchyLevel>,
}

impl Hierarchy {
    pub fn top(&self) -> &HierarchyLevel {
        self.levels.last().expect("a hierarchy has at least one level")
    }
}

/// Graph whose nodes are the given entity groups.
pub fn cluster_graph(members: &[Vec<usize>], g: &Graph) -> Graph {
    Graph::from_fn(members.len(), |a, b| {
        cluster_pair_similarity(&members[a], &members[b], g)
    })
}

/// Level-search settings: only graph-based seeds apply above level 0, and
/// each level draws from its own stream.
fn level_config(cfg: &SearchConfig, level: usize) -> SearchConfig {
    let mut strategies: Vec<SeedStrategy> = cfg
        .strategies
        .iter()
        .copied()
        .filter(|s| SeedStrategy::GRAPH_ONLY.contains(s))
        .collect();
    if strategies.is_empty() {
        strategies = SeedStrategy::GRAPH_ONLY.to_vec();
    }
    SearchConfig {
        strategies,
        rng_seed: cfg.rng_seed.wrapping_add(level as u64),
        trace: false,
        ..cfg.clone()
    }
}

/// Clusters the clusters of `level0` level after level until a single
/// cluster remains, the search stops coarsening, or its best MQ is below
/// `cfg.epsilon_stop` (the all-singletons level scores 0).
pub fn build_hierarchy(level0: &[Vec<usize>], g: &Graph, cfg: &SearchConfig) -> Result<Hierarchy> {
    let p0 = Partition::from_clusters(g, level0)?;
    let mut levels = vec![HierarchyLevel {
        groups: level0.to_vec(),
        members: level0.to_vec(),
        quality: p0.quality(),
    }];
    loop {
        let prev = &levels.last().unwrap().members;
        if prev.len() <= 1 {
            break;
        }
        let cg = cluster_graph(prev, g);
        let result = search(&SeedContext::graph_only(&cg), &level_config(cfg, levels.len()))?;
        let groups = result.best.clusters();
        if result.report.mq < cfg.epsilon_stop || groups.len() >= prev.len() {
            break;
        }
        let members: Vec<Vec<usize>> = groups
            .iter()
            .map(|grp| {
                let mut m: Vec<usize> = grp.iter().flat_map(|&c| prev[c].iter().copied()).collect();
                m.sort_unstable();
                m
            })
            .collect();
        levels.push(HierarchyLevel {
            groups,
            members,
            quality: result.report,
        });
    }
    Ok(Hierarchy { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pair_similarity_is_a_mean() {
        let g = Graph::from_fn(3, |i, j| match (i, j) {
            (0, 2) => 0.4,
            (1, 2) => 0.8,
            _ => 0.3,
        });
        assert_relative_eq!(cluster_pair_similarity(&[0, 1], &[2], &g), 0.6);
        assert_relative_eq!(cluster_pair_similarity(&[0], &[2], &g), 0.4);
    }

    #[test]
    fn one_cluster_is_the_whole_hierarchy() {
        let g = Graph::from_fn(3, |_, _| 0.5);
        let h = build_hierarchy(&[vec![0, 1, 2]], &g, &SearchConfig::default()).unwrap();
        assert_eq!(h.levels.len(), 1);
    }

    #[test]
    fn two_super_groups_at_level_one() {
        // eight singleton clusters; {0..4} and {4..8} are strongly related
        let g = Graph::from_fn(8, |i, j| if (i < 4) == (j < 4) { 0.8 } else { 0.01 });
        let level0: Vec<Vec<usize>> = (0..8).map(|v| vec![v]).collect();
        let h = build_hierarchy(&level0, &g, &SearchConfig::default()).unwrap();
        assert!(h.levels.len() >= 2);
        assert_eq!(h.levels[1].members, [vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        for w in h.levels.windows(2) {
            assert!(w[1].members.len() < w[0].members.len());
            // coarsening: each upper cluster is a union of lower clusters
            for (grp, m) in w[1].groups.iter().zip(&w[1].members) {
                let mut u: Vec<usize> = grp.iter().flat_map(|&c| w[0].members[c].clone()).collect();
                u.sort_unstable();
                assert_eq!(&u, m);
            }
        }
    }

    #[test]
    fn unrelated_clusters_stop_immediately() {
        let g = Graph::from_fn(4, |_, _| 0.0);
        let h = build_hierarchy(&[vec![0, 1], vec![2, 3]], &g, &SearchConfig::default()).unwrap();
        assert_eq!(h.levels.len(), 1);
    }
}
