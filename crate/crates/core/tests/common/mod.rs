#![allow(dead_code)]

use std::path::{Path, PathBuf};

use archrecover::clustering::Graph;
use archrecover::{run_pipeline, PipelineOutput, RunConfig};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn config(name: &str, out: &Path) -> RunConfig {
    RunConfig {
        corpus: Some(fixture(name)),
        output: out.to_path_buf(),
        ..RunConfig::default()
    }
}

pub fn analyze(name: &str, out: &Path) -> PipelineOutput {
    run_pipeline(&config(name, out)).expect("fixture analysis")
}

/// MQC straight from the definition, over a label vector.
pub fn scratch_mqc(g: &Graph, labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut eps = vec![0.0; k];
    let mut mu = vec![0.0; k];
    let mut size = vec![0usize; k];
    for v in 0..g.len() {
        size[labels[v]] += 1;
        for u in 0..g.len() {
            if u == v {
                continue;
            }
            if labels[u] == labels[v] {
                eps[labels[v]] += g.weight(v, u);
            } else {
                mu[labels[v]] += g.weight(v, u);
            }
        }
    }
    let live: Vec<usize> = (0..k).filter(|&c| size[c] > 0).collect();
    let mq: f64 = live
        .iter()
        .map(|&c| {
            let d = eps[c] + mu[c];
            if d == 0.0 {
                0.0
            } else {
                eps[c] / d
            }
        })
        .sum();
    let sizes: Vec<usize> = live.iter().map(|&c| size[c]).collect();
    let diff = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
    let iso = sizes.iter().filter(|&&s| s <= 2).count();
    2.0 * mq + sizes.len() as f64 - diff as f64 - iso as f64
}

pub fn scratch_mq(g: &Graph, labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    (0..k)
        .map(|c| {
            let (mut e, mut m) = (0.0, 0.0);
            for v in (0..g.len()).filter(|&v| labels[v] == c) {
                for u in (0..g.len()).filter(|&u| u != v) {
                    if labels[u] == c {
                        e += g.weight(v, u);
                    } else {
                        m += g.weight(v, u);
                    }
                }
            }
            if e + m == 0.0 {
                0.0
            } else {
                e / (e + m)
            }
        })
        .sum()
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for l in 0..=limit {
            prefix.push(l);
            go(prefix, max.max(l), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

/// Each pair is an edge with probability `density`, weighted U[0, 1].
pub fn random_graph(n: usize, density: f64, rng: &mut impl Rng) -> Graph {
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                let x: f64 = rng.random();
                w[i][j] = x;
                w[j][i] = x;
            }
        }
    }
    Graph::from_fn(n, move |i, j| w[i][j])
}

/// Canonical cluster list of a label vector.
pub fn clusters_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut by: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (v, &l) in labels.iter().enumerate() {
        by.entry(l).or_default().push(v);
    }
    let mut cs: Vec<Vec<usize>> = by.into_values().collect();
    cs.sort();
    cs
}
