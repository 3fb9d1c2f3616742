//! Partitions with cached per-cluster weight sums and incremental quality.
//!
//! Clusters live in slots. A slot may be empty while a search is running;
//! [`Partition::canonical`] compacts slots and orders clusters by their
//! smallest member, which is the form exposed everywhere else.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};

/// Denominators at or below this count as zero in clustering factors.
pub const CF_EPSILON: f64 = 1e-12;

/// Clustering factor ε/(ε+μ), 0 for a weightless cluster.
#[inline]
pub fn clustering_factor(intra: f64, inter: f64) -> f64 {
    let den = intra + inter;
    if den <= CF_EPSILON {
        0.0
    } else {
        (intra / den).clamp(0.0, 1.0)
    }
}

#[inline]
fn is_iso(size: usize) -> bool {
    size == 1 || size == 2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QualityReport {
    pub mq: f64,
    pub mqc: f64,
    pub diff: usize,
    pub iso: usize,
    pub cluster_count: usize,
}

impl QualityReport {
    fn new(mq: f64, cluster_count: usize, diff: usize, iso: usize) -> Self {
        QualityReport {
            mq,
            mqc: 2.0 * mq + cluster_count as f64 - diff as f64 - iso as f64,
            diff,
            iso,
            cluster_count,
        }
    }

    /// The initiation-test variant without the `+|P|` term.
    pub fn mqc_without_count(&self) -> f64 {
        self.mqc - self.cluster_count as f64
    }
}

/// Destination of a move: an existing slot or a fresh cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Existing(usize),
    New,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub node: usize,
    pub from: usize,
    pub to: Target,
}

/// Quality of a hypothetical move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveEval {
    pub mq: f64,
    pub mqc: f64,
}

static EVALUATIONS: AtomicUsize = AtomicUsize::new(0);
static AUDITS: AtomicUsize = AtomicUsize::new(0);

/// `(move evaluations, audited evaluations)` since process start. Debug
/// builds re-derive every 100th evaluation from scratch and assert that the
/// incremental result and the MQC identity hold.
pub fn audit_counters() -> (usize, usize) {
    (EVALUATIONS.load(Ordering::Relaxed), AUDITS.load(Ordering::Relaxed))
}

#[derive(Debug, Clone)]
pub struct Partition {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
    pos: Vec<usize>,
    intra: Vec<f64>,
    inter: Vec<f64>,
    mq: f64,
    cluster_count: usize,
    size_hist: Vec<usize>,
    min_size: usize,
    max_size: usize,
    iso: usize,
    free: Vec<usize>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.clusters() == other.clusters()
    }
}

impl Partition {
    /// Builds from arbitrary cluster labels, one per node.
    pub fn from_assignment(g: &Graph, labels: &[usize]) -> Self {
        assert_eq!(labels.len(), g.len(), "one label per node");
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
        clusters.sort_by_key(|c| c[0]);
        Self::build(g, clusters)
    }

    /// Builds from explicit clusters, which must be nonempty, disjoint and
    /// cover every node.
    pub fn from_clusters(g: &Graph, clusters: &[Vec<usize>]) -> Result<Self> {
        let n = g.len();
        let mut seen = vec![false; n];
        for c in clusters {
            if c.is_empty() {
                return Err(Error::Internal("empty cluster in partition".into()));
            }
            for &v in c {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::Internal(format!("node {v} out of range or repeated")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Internal(format!("node {v} not covered by partition")));
        }
        let mut cs: Vec<Vec<usize>> = clusters
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        cs.sort_by_key(|c| c[0]);
        Ok(Self::build(g, cs))
    }

    pub fn singletons(g: &Graph) -> Self {
        Self::from_assignment(g, &(0..g.len()).collect::<Vec<_>>())
    }

    pub fn single_cluster(g: &Graph) -> Self {
        Self::from_assignment(g, &vec![0; g.len()])
    }

    fn build(g: &Graph, clusters: Vec<Vec<usize>>) -> Self {
        let n = g.len();
        let mut assignment = vec![0; n];
        let mut pos = vec![0; n];
        for (c, ms) in clusters.iter().enumerate() {
            for (p, &v) in ms.iter().enumerate() {
                assignment[v] = c;
                pos[v] = p;
            }
        }
        let slots = clusters.len();
        let mut p = Partition {
            assignment,
            members: clusters,
            pos,
            intra: vec![0.0; slots],
            inter: vec![0.0; slots],
            mq: 0.0,
            cluster_count: 0,
            size_hist: vec![0; n + 2],
            min_size: 0,
            max_size: 0,
            iso: 0,
            free: Vec::new(),
        };
        p.refresh(g);
        p
    }

    /// Recomputes every cache from the definitions.
    pub fn refresh(&mut self, g: &Graph) {
        let slots = self.members.len();
        self.intra = vec![0.0; slots];
        self.inter = vec![0.0; slots];
        for v in 0..self.assignment.len() {
            let c = self.assignment[v];
            let row = g.row(v);
            let own: f64 = self.members[c].iter().filter(|&&u| u != v).map(|&u| row[u]).sum();
            self.intra[c] += own;
            self.inter[c] += g.degree(v) - own;
        }
        for c in 0..slots {
            self.inter[c] = self.inter[c].max(0.0);
        }
        self.mq = (0..slots)
            .filter(|&c| !self.members[c].is_empty())
            .map(|c| clustering_factor(self.intra[c], self.inter[c]))
            .sum();
        self.size_hist.iter_mut().for_each(|h| *h = 0);
        self.free.clear();
        self.cluster_count = 0;
        self.iso = 0;
        for (c, ms) in self.members.iter().enumerate() {
            if ms.is_empty() {
                self.free.push(c);
            } else {
                self.size_hist[ms.len()] += 1;
                self.cluster_count += 1;
                if is_iso(ms.len()) {
                    self.iso += 1;
                }
            }
        }
        self.free.reverse();
        self.min_size = self.size_hist.iter().position(|&h| h > 0).unwrap_or(0);
        self.max_size = self.size_hist.iter().rposition(|&h| h > 0).unwrap_or(0);
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    /// Number of nonempty clusters.
    pub fn len(&self) -> usize {
        self.cluster_count
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_count == 0
    }

    pub fn slot_count(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn members(&self, slot: usize) -> &[usize] {
        &self.members[slot]
    }

    /// Nonempty slot indices in ascending order.
    pub fn live_slots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.members.len()).filter(|&c| !self.members[c].is_empty())
    }

    pub fn intra(&self, slot: usize) -> f64 {
        self.intra[slot]
    }

    pub fn inter(&self, slot: usize) -> f64 {
        self.inter[slot]
    }

    pub fn cf(&self, slot: usize) -> f64 {
        if self.members[slot].is_empty() {
            0.0
        } else {
            clustering_factor(self.intra[slot], self.inter[slot])
        }
    }

    /// Cached MQ.
    pub fn mq(&self) -> f64 {
        self.mq
    }

    pub fn diff(&self) -> usize {
        self.max_size - self.min_size
    }

    pub fn iso(&self) -> usize {
        self.iso
    }

    pub fn quality(&self) -> QualityReport {
        QualityReport::new(self.mq, self.cluster_count, self.diff(), self.iso)
    }

    pub fn mqc(&self) -> f64 {
        self.quality().mqc
    }

    /// Σ_{v ∈ slot, v ≠ k} w(k, v) for every slot.
    pub fn links(&self, g: &Graph, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.members.len()];
        for (v, &w) in g.row(k).iter().enumerate() {
            out[self.assignment[v]] += w;
        }
        // row(k)[k] is 0, so k's own slot needs no correction
        out
    }

    fn link_to(&self, g: &Graph, k: usize, slot: usize) -> f64 {
        let row = g.row(k);
        self.members[slot].iter().map(|&v| row[v]).sum()
    }

    fn check_move(&self, k: usize, to: Target) {
        if let Target::Existing(j) = to {
            assert!(j != self.assignment[k], "move must change cluster");
            assert!(!self.members[j].is_empty(), "move into empty slot {j}");
        }
    }

    /// Cluster count, min size, max size and iso count after moving a node
    /// out of a cluster of size `s_i` into a cluster of size `s_j`
    /// (`None` for a fresh cluster).
    fn sizes_after(&self, s_i: usize, s_j: Option<usize>) -> (usize, usize, usize, usize) {
        let mut deltas: [(usize, isize); 4] = [(0, 0); 4];
        deltas[0] = (s_i, -1);
        if s_i > 1 {
            deltas[1] = (s_i - 1, 1);
        }
        match s_j {
            Some(s) => {
                deltas[2] = (s, -1);
                deltas[3] = (s + 1, 1);
            }
            None => deltas[2] = (1, 1),
        }
        let count = |s: usize| -> isize {
            self.size_hist[s] as isize + deltas.iter().filter(|d| d.0 == s).map(|d| d.1).sum::<isize>()
        };
        let clusters = self.cluster_count - usize::from(s_i == 1) + usize::from(s_j.is_none());
        let mut max = self.max_size.max(s_j.map_or(1, |s| s + 1));
        while max > 1 && count(max) <= 0 {
            max -= 1;
        }
        let mut min = self.min_size;
        if s_i > 1 {
            min = min.min(s_i - 1);
        }
        if s_j.is_none() {
            min = 1;
        }
        while min < max && count(min) <= 0 {
            min += 1;
        }
        let mut iso = self.iso as isize;
        iso -= isize::from(is_iso(s_i));
        if s_i > 1 {
            iso += isize::from(is_iso(s_i - 1));
        }
        match s_j {
            Some(s) => iso += isize::from(is_iso(s + 1)) - isize::from(is_iso(s)),
            None => iso += 1,
        }
        (clusters, min, max, iso as usize)
    }

    /// New `(ε, μ)` of source and target after moving `k`, given its link
    /// `a` to the rest of its own cluster and `b` to the target.
    fn updated_sums(&self, g: &Graph, k: usize, to: Target, a: f64, b: f64) -> ((f64, f64), (f64, f64)) {
        let i = self.assignment[k];
        let total = g.degree(k);
        let s_i = self.members[i].len();
        let src = match s_i {
            1 => (0.0, 0.0),
            2 => (0.0, (self.inter[i] - (total - a) + a).max(0.0)),
            _ => (
                (self.intra[i] - 2.0 * a).max(0.0),
                (self.inter[i] - (total - a) + a).max(0.0),
            ),
        };
        let dst = match to {
            Target::Existing(j) => (self.intra[j] + 2.0 * b, (self.inter[j] - b + (total - b)).max(0.0)),
            Target::New => (0.0, total),
        };
        (src, dst)
    }

    fn eval_core(&self, g: &Graph, k: usize, to: Target, a: f64, b: f64, mq_old: f64) -> MoveEval {
        let i = self.assignment[k];
        let s_i = self.members[i].len();
        let ((ei, mi), (ej, mj)) = self.updated_sums(g, k, to, a, b);
        let (old_j, s_j) = match to {
            Target::Existing(j) => (self.cf(j), Some(self.members[j].len())),
            Target::New => (0.0, None),
        };
        let new_i = if s_i > 1 { clustering_factor(ei, mi) } else { 0.0 };
        let mq = mq_old - self.cf(i) - old_j + new_i + clustering_factor(ej, mj);
        let (count, min, max, iso) = self.sizes_after(s_i, s_j);
        let q = QualityReport::new(mq, count, max - min, iso);
        let eval = MoveEval { mq, mqc: q.mqc };
        self.audit(g, k, to, &eval);
        eval
    }

    #[cfg(debug_assertions)]
    fn audit(&self, g: &Graph, k: usize, to: Target, eval: &MoveEval) {
        let n = EVALUATIONS.fetch_add(1, Ordering::Relaxed);
        if !n.is_multiple_of(100) {
            return;
        }
        AUDITS.fetch_add(1, Ordering::Relaxed);
        let mut after = self.clone();
        after.apply(g, k, to);
        let scratch = quality(&after, g);
        assert!(
            (scratch.mq - eval.mq).abs() < 1e-9 && (scratch.mqc - eval.mqc).abs() < 1e-9,
            "incremental quality {eval:?} disagrees with recomputation {scratch:?}"
        );
        let identity = 2.0 * scratch.mq + scratch.cluster_count as f64 - scratch.diff as f64 - scratch.iso as f64;
        assert!((identity - scratch.mqc).abs() < 1e-9, "MQC identity violated");
        assert!(after.cache_error(g) < 1e-9, "cluster caches drifted");
    }

    #[cfg(not(debug_assertions))]
    fn audit(&self, _: &Graph, _: usize, _: Target, _: &MoveEval) {
        EVALUATIONS.fetch_add(1, Ordering::Relaxed);
    }

    /// Quality after moving `k` to `to`, without changing the partition.
    pub fn evaluate(&self, g: &Graph, k: usize, to: Target) -> MoveEval {
        self.check_move(k, to);
        let i = self.assignment[k];
        let a = self.link_to(g, k, i);
        let b = match to {
            Target::Existing(j) => self.link_to(g, k, j),
            Target::New => 0.0,
        };
        self.eval_core(g, k, to, a, b, self.mq)
    }

    /// Like [`Partition::evaluate`] with links precomputed by
    /// [`Partition::links`].
    pub fn evaluate_with_links(&self, g: &Graph, k: usize, to: Target, links: &[f64]) -> MoveEval {
        self.check_move(k, to);
        let a = links[self.assignment[k]];
        let b = match to {
            Target::Existing(j) => links[j],
            Target::New => 0.0,
        };
        self.eval_core(g, k, to, a, b, self.mq)
    }

    /// Moves `k` and updates every cache incrementally. Returns the slot `k`
    /// now lives in.
    pub fn apply(&mut self, g: &Graph, k: usize, to: Target) -> usize {
        self.check_move(k, to);
        let i = self.assignment[k];
        let a = self.link_to(g, k, i);
        let b = match to {
            Target::Existing(j) => self.link_to(g, k, j),
            Target::New => 0.0,
        };
        let mq_old = self.mq;
        self.apply_core(g, k, to, a, b, mq_old)
    }

    fn apply_core(&mut self, g: &Graph, k: usize, to: Target, a: f64, b: f64, mq_old: f64) -> usize {
        let i = self.assignment[k];
        let s_i = self.members[i].len();
        let s_j = match to {
            Target::Existing(j) => Some(self.members[j].len()),
            Target::New => None,
        };
        let ((ei, mi), (ej, mj)) = self.updated_sums(g, k, to, a, b);
        let old_j = match to {
            Target::Existing(j) => self.cf(j),
            Target::New => 0.0,
        };
        let new_i = if s_i > 1 { clustering_factor(ei, mi) } else { 0.0 };
        self.mq = mq_old - self.cf(i) - old_j + new_i + clustering_factor(ej, mj);
        let (count, min, max, iso) = self.sizes_after(s_i, s_j);

        let j = match to {
            Target::Existing(j) => j,
            Target::New => match self.free.pop() {
                Some(slot) => slot,
                None => self.push_slot(),
            },
        };
        // membership
        let p = self.pos[k];
        self.members[i].swap_remove(p);
        if let Some(&moved) = self.members[i].get(p) {
            self.pos[moved] = p;
        }
        self.pos[k] = self.members[j].len();
        self.members[j].push(k);
        self.assignment[k] = j;
        if self.members[i].is_empty() {
            self.free.push(i);
        }
        // caches
        self.intra[i] = ei;
        self.inter[i] = mi;
        self.intra[j] = ej;
        self.inter[j] = mj;
        self.size_hist[s_i] -= 1;
        if s_i > 1 {
            self.size_hist[s_i - 1] += 1;
        }
        match s_j {
            Some(s) => {
                self.size_hist[s] -= 1;
                self.size_hist[s + 1] += 1;
            }
            None => self.size_hist[1] += 1,
        }
        self.cluster_count = count;
        self.min_size = min;
        self.max_size = max;
        self.iso = iso;
        j
    }

    fn push_slot(&mut self) -> usize {
        self.members.push(Vec::new());
        self.intra.push(0.0);
        self.inter.push(0.0);
        self.members.len() - 1
    }

    /// Largest absolute difference between cached and recomputed sums.
    pub fn cache_error(&self, g: &Graph) -> f64 {
        let mut fresh = self.clone();
        fresh.refresh(g);
        let sums = (0..self.members.len())
            .map(|c| {
                (self.intra[c] - fresh.intra[c])
                    .abs()
                    .max((self.inter[c] - fresh.inter[c]).abs())
            })
            .fold(0.0, f64::max);
        sums.max((self.mq - fresh.mq).abs())
    }

    /// Clusters with sorted members, ordered by smallest member.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut cs: Vec<Vec<usize>> = self
            .members
            .iter()
            .filter(|m| !m.is_empty())
            .map(|m| {
                let mut m = m.clone();
                m.sort_unstable();
                m
            })
            .collect();
        cs.sort_by_key(|c| c[0]);
        cs
    }

    /// Canonical cluster index per node (index into [`Partition::clusters`]).
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.assignment.len()];
        for (c, ms) in self.clusters().iter().enumerate() {
            for &v in ms {
                out[v] = c;
            }
        }
        out
    }

    /// Compacted copy whose slots follow the canonical cluster order.
    pub fn canonical(&self, g: &Graph) -> Partition {
        Partition::build(g, self.clusters())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters().iter().map(Vec::len).collect()
    }
}

/// MQ from the definition, ignoring the caches.
pub fn mq(p: &Partition, g: &Graph) -> f64 {
    quality(p, g).mq
}

/// Full quality report from the definition, ignoring the caches.
pub fn quality(p: &Partition, g: &Graph) -> QualityReport {
    let clusters = p.clusters();
    let mut label = vec![0; g.len()];
    for (c, ms) in clusters.iter().enumerate() {
        for &v in ms {
            label[v] = c;
        }
    }
    let mut intra = vec![0.0; clusters.len()];
    let mut inter = vec![0.0; clusters.len()];
    for v in 0..g.len() {
        for u in 0..g.len() {
            if u == v {
                continue;
            }
            if label[u] == label[v] {
                intra[label[v]] += g.weight(v, u);
            } else {
                inter[label[v]] += g.weight(v, u);
            }
        }
    }
    let mq = (0..clusters.len()).map(|c| clustering_factor(intra[c], inter[c])).sum();
    let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
    let diff = sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0);
    let iso = sizes.iter().filter(|&&s| is_iso(s)).count();
    QualityReport::new(mq, clusters.len(), diff, iso)
}

/// Alias of [`quality`] under the objective's name.
pub fn mqc(p: &Partition, g: &Graph) -> QualityReport {
    quality(p, g)
}

/// Moves `m.node` with the incremental update, starting from `mq_old`, and
/// returns the new MQ. The partition's caches are updated in place.
pub fn mq_after_move(p: &mut Partition, g: &Graph, m: Move, mq_old: f64) -> f64 {
    assert_eq!(p.cluster_of(m.node), m.from, "move source does not hold the node");
    let a = p.link_to(g, m.node, m.from);
    let b = match m.to {
        Target::Existing(j) => p.link_to(g, m.node, j),
        Target::New => 0.0,
    };
    p.check_move(m.node, m.to);
    p.apply_core(g, m.node, m.to, a, b, mq_old);
    p.mq
}
