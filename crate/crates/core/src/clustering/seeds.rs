//! Initial partitions for the search.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::partition::Partition;
use crate::error::Error;
use crate::similarity::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedStrategy {
    /// Connected components over the strongest edges.
    Cc,
    /// Components over pairs with nonzero inheritance similarity.
    Inherit,
    /// One cluster per package.
    Package,
    Random,
    Kmeans,
    /// Clique-strength centres with attached neighbours.
    Clique,
}

impl SeedStrategy {
    pub const ALL: [SeedStrategy; 6] = [
        SeedStrategy::Cc,
        SeedStrategy::Inherit,
        SeedStrategy::Package,
        SeedStrategy::Random,
        SeedStrategy::Kmeans,
        SeedStrategy::Clique,
    ];

    /// Strategies that need no class-level metadata.
    pub const GRAPH_ONLY: [SeedStrategy; 4] = [
        SeedStrategy::Cc,
        SeedStrategy::Random,
        SeedStrategy::Kmeans,
        SeedStrategy::Clique,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeedStrategy::Cc => "cc",
            SeedStrategy::Inherit => "inherit",
            SeedStrategy::Package => "package",
            SeedStrategy::Random => "random",
            SeedStrategy::Kmeans => "kmeans",
            SeedStrategy::Clique => "clique",
        }
    }
}

impl fmt::Display for SeedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        SeedStrategy::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown seed strategy `{s}`")))
    }
}

/// What seeding may look at besides the combined graph.
#[derive(Debug, Clone, Copy)]
pub struct SeedContext<'a> {
    pub graph: &'a Graph,
    /// Package of each node; `None` when nodes have no packages.
    pub packages: Option<&'a [String]>,
    pub inheritance: Option<&'a SymMatrix>,
    /// Build the CC seed with the outlier-elimination loop instead of a
    /// single components pass.
    pub outlier_elimination: bool,
}

impl<'a> SeedContext<'a> {
    pub fn graph_only(graph: &'a Graph) -> Self {
        SeedContext {
            graph,
            packages: None,
            inheritance: None,
            outlier_elimination: false,
        }
    }

    pub fn package_count(&self) -> Option<usize> {
        self.packages
            .map(|ps| ps.iter().collect::<std::collections::BTreeSet<_>>().len())
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the sizes of the two components before merging, or `None`
    /// when already joined.
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let sizes = (self.size[ra], self.size[rb]);
        let (big, small) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        Some(sizes)
    }
}

/// Attaches each leftover node, in order, to the cluster with the largest
/// summed weight to it (lowest index on ties). A node with no weight to any
/// cluster opens its own cluster.
fn attach_leftovers(g: &Graph, clusters: &mut Vec<Vec<usize>>, leftovers: &[usize]) {
    let mut label = vec![usize::MAX; g.len()];
    for (c, ms) in clusters.iter().enumerate() {
        for &v in ms {
            label[v] = c;
        }
    }
    for &v in leftovers {
        let mut sums = vec![0.0; clusters.len()];
        for (u, &w) in g.row(v).iter().enumerate() {
            if label[u] != usize::MAX {
                sums[label[u]] += w;
            }
        }
        let best = sums
            .iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, f64)>, (c, &s)| match acc {
                Some((_, bs)) if bs >= s => acc,
                _ if s > 0.0 => Some((c, s)),
                _ => acc,
            });
        match best {
            Some((c, _)) => {
                clusters[c].push(v);
                label[v] = c;
            }
            None => {
                label[v] = clusters.len();
                clusters.push(vec![v]);
            }
        }
    }
}

fn components_then_attach(g: &Graph, edges: &[(usize, usize, f64)], limit: Option<usize>) -> Partition {
    let n = g.len();
    let mut uf = UnionFind::new(n);
    let mut nontrivial = 0usize;
    for &(u, v, _) in edges {
        if limit.is_some_and(|l| nontrivial >= l) {
            break;
        }
        match uf.union(u, v) {
            Some((1, 1)) => nontrivial += 1,
            Some((a, b)) if a > 1 && b > 1 => nontrivial -= 1,
            _ => {}
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut leftovers = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        if uf.size[r] > 1 {
            by_root.entry(r).or_default().push(v);
        } else {
            leftovers.push(v);
        }
    }
    let mut clusters: Vec<Vec<usize>> = by_root.into_values().collect();
    clusters.sort_by_key(|c| c[0]);
    attach_leftovers(g, &mut clusters, &leftovers);
    Partition::from_clusters(g, &clusters).expect("components cover all nodes")
}

/// Connected components grown over the top `(100 - percentile)`% edges in
/// weight order while fewer than `2 × packages` nontrivial components exist.
pub fn cc_seed(g: &Graph, percentile: u32, packages: Option<usize>) -> Partition {
    let edges = g.top_edges(percentile);
    components_then_attach(g, &edges, packages.map(|p| 2 * p))
}

fn inherit_seed(g: &Graph, inheritance: Option<&SymMatrix>) -> Partition {
    let Some(m) = inheritance else {
        return Partition::single_cluster(g);
    };
    let edges: Vec<_> = m.upper_triangle().filter(|e| e.2 > 0.0).collect();
    if edges.is_empty() {
        return Partition::single_cluster(g);
    }
    components_then_attach(g, &edges, None)
}

fn package_seed(g: &Graph, packages: Option<&[String]>) -> Partition {
    let Some(ps) = packages else {
        return Partition::single_cluster(g);
    };
    let mut ids: std::collections::BTreeMap<&str, usize> = Default::default();
    let labels: Vec<usize> = ps
        .iter()
        .map(|p| {
            let next = ids.len();
            *ids.entry(p.as_str()).or_insert(next)
        })
        .collect();
    Partition::from_assignment(g, &labels)
}

fn random_seed(g: &Graph, rng: &mut impl Rng) -> Partition {
    let d = g.len();
    let k = rng.random_range(1..=d);
    let labels: Vec<usize> = (0..d).map(|_| rng.random_range(1..=k)).collect();
    Partition::from_assignment(g, &labels)
}

fn kmeans_seed(g: &Graph, rng: &mut impl Rng) -> Partition {
    const MAX_ITERATIONS: usize = 100;
    let d = g.len();
    let k = rng.random_range(1..=d);
    let mut centers: Vec<Vec<f64>> = sample(rng, d, k).iter().map(|i| g.row(i).to_vec()).collect();
    let mut labels = vec![usize::MAX; d];
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<usize> = (0..d)
            .into_par_iter()
            .map(|i| {
                let x = g.row(i);
                let mut best = (0, f64::INFINITY);
                for (c, center) in centers.iter().enumerate() {
                    let dist: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                    if dist < best.1 {
                        best = (c, dist);
                    }
                }
                best.0
            })
            .collect();
        if next == labels {
            break;
        }
        labels = next;
        let mut sums = vec![vec![0.0; d]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(g.row(i)) {
                *s += x;
            }
        }
        for c in 0..centers.len() {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    Partition::from_assignment(g, &labels)
}

/// Σ w(u, w) over strong edges `(u, w)` not touching `v` where `v` has a
/// strong edge to `u` or to `w`.
pub fn clique_strength(v: usize, top: &[(usize, usize, f64)], n: usize) -> f64 {
    let mut adjacent = vec![false; n];
    for &(a, b, _) in top {
        if a == v {
            adjacent[b] = true;
        } else if b == v {
            adjacent[a] = true;
        }
    }
    top.iter()
        .filter(|&&(a, b, _)| a != v && b != v && (adjacent[a] || adjacent[b]))
        .map(|e| e.2)
        .sum()
}

fn clique_seed(g: &Graph) -> Partition {
    let d = g.len();
    let top = g.top_edges(75);
    let strength: Vec<f64> = (0..d).into_par_iter().map(|v| clique_strength(v, &top, d)).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| strength[b].total_cmp(&strength[a]).then(a.cmp(&b)));
    let centers = d.div_ceil(4);
    let mut clusters: Vec<Vec<usize>> = order[..centers].iter().map(|&c| vec![c]).collect();
    let mut rest: Vec<usize> = order[centers..].to_vec();
    rest.sort_unstable();
    attach_leftovers(g, &mut clusters, &rest);
    Partition::from_clusters(g, &clusters).expect("centres and attachments cover all nodes")
}

pub fn generate_seed(strategy: SeedStrategy, ctx: &SeedContext<'_>, rng: &mut impl Rng) -> Partition {
    let g = ctx.graph;
    if g.len() <= 1 {
        return Partition::singletons(g);
    }
    match strategy {
        SeedStrategy::Cc if ctx.outlier_elimination => {
            super::outliers::eliminate_outliers(g, ctx.package_count(), super::outliers::DEFAULT_START_PERCENTILE)
                .partition
        }
        SeedStrategy::Cc => cc_seed(g, super::outliers::DEFAULT_START_PERCENTILE, ctx.package_count()),
        SeedStrategy::Inherit => inherit_seed(g, ctx.inheritance),
        SeedStrategy::Package => package_seed(g, ctx.packages),
        SeedStrategy::Random => random_seed(g, rng),
        SeedStrategy::Kmeans => kmeans_seed(g, rng),
        SeedStrategy::Clique => clique_seed(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_blocks() -> Graph {
        Graph::from_fn(8, |i, j| {
            if i / 4 == j / 4 {
                1.0
            } else if (i, j) == (3, 4) {
                0.01
            } else {
                0.0
            }
        })
    }

    #[test]
    fn cc_recovers_blocks_joined_by_weak_edge() {
        let g = two_blocks();
        let expected = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]];
        assert_eq!(cc_seed(&g, 75, None).clusters(), expected);
        assert_eq!(cc_seed(&g, 75, Some(1)).clusters(), expected);
    }

    #[test]
    fn random_seed_covers_all_nodes() {
        let g = two_blocks();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_seed(&g, &mut rng);
            let mut all: Vec<usize> = p.clusters().concat();
            all.sort_unstable();
            assert_eq!(all, (0..8).collect::<Vec<_>>());
            assert!(p.len() <= 8);
        }
    }

    #[test]
    fn package_seed_follows_packages() {
        let g = Graph::from_fn(5, |_, _| 0.5);
        let ps: Vec<String> = ["a", "b", "a", "c", "b"].iter().map(|s| s.to_string()).collect();
        let ctx = SeedContext {
            graph: &g,
            packages: Some(&ps),
            inheritance: None,
            outlier_elimination: false,
        };
        let p = generate_seed(SeedStrategy::Package, &ctx, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(p.len(), 3);
        assert_eq!(p.clusters(), [vec![0, 2], vec![1, 4], vec![3]]);
    }

    #[test]
    fn clique_strength_cases() {
        let tri = [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)];
        assert_eq!(clique_strength(1, &tri, 4), 1.0);
        assert_eq!(clique_strength(3, &tri, 4), 0.0);
        let star = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)];
        assert_eq!(clique_strength(0, &star, 4), 0.0);
    }

    #[test]
    fn inherit_components_with_attachment() {
        let g = two_blocks();
        let inh = SymMatrix::from_fn(8, |i, j| if (i, j) == (0, 1) || (i, j) == (5, 6) { 0.5 } else { 0.0 });
        let p = inherit_seed(&g, Some(&inh));
        assert_eq!(p.clusters(), [vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert_eq!(inherit_seed(&g, None).len(), 1);
    }

    #[test]
    fn kmeans_and_clique_give_valid_partitions() {
        let g = two_blocks();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = kmeans_seed(&g, &mut rng);
            assert_eq!(p.clusters().concat().len(), 8);
        }
        // the two strongest vertices (0 and 1, tied) become separate centres
        let p = clique_seed(&g);
        assert_eq!(p.len(), 2);
        assert_ne!(p.cluster_of(0), p.cluster_of(1));
    }

    #[test]
    fn single_node_is_one_singleton_everywhere() {
        let g = Graph::from_fn(1, |_, _| 0.0);
        let ctx = SeedContext::graph_only(&g);
        for s in SeedStrategy::ALL {
            let p = generate_seed(s, &ctx, &mut ChaCha8Rng::seed_from_u64(0));
            assert_eq!(p.clusters(), [vec![0]]);
        }
    }

    #[test]
    fn strategy_names_parse() {
        for s in SeedStrategy::ALL {
            assert_eq!(s.name().parse::<SeedStrategy>().unwrap(), s);
        }
        assert!("louvain".parse::<SeedStrategy>().is_err());
    }
}
