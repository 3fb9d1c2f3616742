//! Detection and splitting of oversized clusters.

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::partition::Partition;
use super::seeds::cc_seed;

pub const DEFAULT_START_PERCENTILE: u32 = 75;
pub const SKEWNESS_THRESHOLD: f64 = 2.0;
pub const MAX_OUTLIER_ITERATIONS: usize = 20;

/// Fisher's bias-corrected sample skewness with the (n − 1) standard
/// deviation. 0 for fewer than three sizes or zero variance.
pub fn skewness_g1(sizes: &[usize]) -> f64 {
    let n = sizes.len();
    if n < 3 {
        return 0.0;
    }
    let xs: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var <= 0.0 {
        return 0.0;
    }
    let s = var.sqrt();
    let m3: f64 = xs.iter().map(|x| (x - mean).powi(3)).sum();
    nf / ((nf - 1.0) * (nf - 2.0)) * m3 / s.powi(3)
}

/// Next percentile: halfway to 99 below 95, then one step at a time.
pub fn next_percentile(alpha: u32) -> u32 {
    if alpha < 95 {
        alpha + (99 - alpha) / 2
    } else {
        (alpha + 1).min(99)
    }
}

fn median(sizes: &[usize]) -> f64 {
    let mut s = sizes.to_vec();
    s.sort_unstable();
    let n = s.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        s[n / 2] as f64
    } else {
        (s[n / 2 - 1] + s[n / 2]) as f64 / 2.0
    }
}

/// Global minimum cut of the subgraph induced by `nodes`
/// (Stoer–Wagner). Returns the cut weight and one side of the cut.
pub fn stoer_wagner(g: &Graph, nodes: &[usize]) -> (f64, Vec<usize>) {
    let m = nodes.len();
    assert!(m >= 2, "a cut needs at least two nodes");
    let mut w: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&a| nodes.iter().map(|&b| g.weight(a, b)).collect())
        .collect();
    let mut groups: Vec<Vec<usize>> = nodes.iter().map(|&v| vec![v]).collect();
    let mut active: Vec<usize> = (0..m).collect();
    let mut best = (f64::INFINITY, Vec::new());
    while active.len() > 1 {
        let mut added = vec![false; m];
        let mut key = vec![0.0f64; m];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let next = if step == 0 {
                active[0]
            } else {
                *active
                    .iter()
                    .filter(|&&v| !added[v])
                    .max_by(|&&a, &&b| key[a].total_cmp(&key[b]).then(b.cmp(&a)))
                    .unwrap()
            };
            added[next] = true;
            prev = last;
            last = next;
            for &v in &active {
                if !added[v] {
                    key[v] += w[next][v];
                }
            }
        }
        let cut = key[last];
        if cut < best.0 {
            let mut side = groups[last].clone();
            side.sort_unstable();
            best = (cut, side);
        }
        // merge `last` into `prev`
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0.0;
        active.retain(|&v| v != last);
    }
    best
}

fn split_until(g: &Graph, nodes: Vec<usize>, limit: f64, out: &mut Vec<Vec<usize>>) {
    if nodes.len() as f64 <= limit || nodes.len() < 2 {
        out.push(nodes);
        return;
    }
    let (_, side) = stoer_wagner(g, &nodes);
    let rest: Vec<usize> = nodes
        .iter()
        .copied()
        .filter(|v| side.binary_search(v).is_err())
        .collect();
    split_until(g, side, limit, out);
    split_until(g, rest, limit, out);
}

#[derive(Debug, Clone)]
pub struct OutlierResult {
    pub partition: Partition,
    /// Percentile used by the last connected-components pass.
    pub percentile: u32,
    pub iterations: usize,
    /// Clusters split by minimum cuts.
    pub splits: usize,
    /// Iteration cap reached before the sizes became acceptable.
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OutlierSummary {
    pub percentile: u32,
    pub iterations: usize,
    pub splits: usize,
    pub capped: bool,
}

impl OutlierResult {
    pub fn summary(&self) -> OutlierSummary {
        OutlierSummary {
            percentile: self.percentile,
            iterations: self.iterations,
            splits: self.splits,
            capped: self.capped,
        }
    }
}

/// Clusters by connected components at an increasing edge percentile while
/// the size distribution is strongly right-skewed; once the percentile
/// reaches 99, clusters above the median size are split by repeated
/// minimum cuts.
pub fn eliminate_outliers(g: &Graph, packages: Option<usize>, start_percentile: u32) -> OutlierResult {
    let mut alpha = start_percentile.min(99);
    let mut p = cc_seed(g, alpha, packages);
    let mut splits = 0;
    for iteration in 1..=MAX_OUTLIER_ITERATIONS {
        let sizes = p.sizes();
        let med = median(&sizes);
        let outliers: Vec<Vec<usize>> = p.clusters().into_iter().filter(|c| c.len() as f64 > med).collect();
        if skewness_g1(&sizes) <= SKEWNESS_THRESHOLD || outliers.is_empty() {
            return OutlierResult {
                partition: p,
                percentile: alpha,
                iterations: iteration,
                splits,
                capped: false,
            };
        }
        if alpha < 99 {
            alpha = next_percentile(alpha);
            p = cc_seed(g, alpha, packages);
            continue;
        }
        let mut clusters: Vec<Vec<usize>> = p.clusters().into_iter().filter(|c| c.len() as f64 <= med).collect();
        for c in outliers {
            let before = clusters.len();
            split_until(g, c, med, &mut clusters);
            splits += clusters.len() - before - 1;
        }
        p = Partition::from_clusters(g, &clusters).expect("splitting preserves the cover");
    }
    OutlierResult {
        partition: p,
        percentile: alpha,
        iterations: MAX_OUTLIER_ITERATIONS,
        splits,
        capped: true,
    }
}
