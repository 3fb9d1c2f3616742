use std::collections::BTreeMap;

use rand::Rng;

use super::anneal::{sn_accept, AnnealingState};
use super::graph::Graph;
use super::partition::{Partition, Target};

/// Moves must gain more than this to count as improvements.
pub const GAIN_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClimbOutcome {
    /// Bulk moves towards each node's strongest foreign cluster improved MQC.
    Bulk,
    /// The best single-node move improved MQC.
    Neighbour,
    /// A worsening neighbour was accepted by annealing.
    Annealed,
    Unchanged,
}

/// Strongest foreign cluster per node, tallied by `(from, to)` and ordered
/// by tally (descending), then `from`, then `to`.
fn bulk_candidates(p: &Partition, g: &Graph) -> Vec<((usize, usize), Vec<usize>)> {
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for k in 0..g.len() {
        let own = p.cluster_of(k);
        let links = p.links(g, k);
        let mut best: Option<(usize, f64)> = None;
        for c in p.live_slots() {
            if c != own && links[c] > 0.0 && best.is_none_or(|(_, w)| links[c] > w) {
                best = Some((c, links[c]));
            }
        }
        if let Some((to, _)) = best {
            groups.entry((own, to)).or_default().push(k);
        }
    }
    let mut ordered: Vec<_> = groups.into_iter().collect();
    ordered.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    ordered
}

/// Applies the tallied moves largest single-move gain first (tally order
/// on ties), each only if it still raises MQC.
fn bulk_phase(p: &mut Partition, g: &Graph) -> bool {
    let start = p.mqc();
    let mut current = start;
    let mut moves: Vec<(usize, usize, usize, f64)> = Vec::new();
    for ((from, to), nodes) in bulk_candidates(p, g) {
        for k in nodes {
            let gain = p.evaluate(g, k, Target::Existing(to)).mqc - start;
            moves.push((k, from, to, gain));
        }
    }
    moves.sort_by(|a, b| b.3.total_cmp(&a.3));
    for (k, from, to, _) in moves {
        if p.cluster_of(k) != from || p.members(to).is_empty() {
            continue;
        }
        let eval = p.evaluate(g, k, Target::Existing(to));
        if eval.mqc > current + GAIN_EPSILON {
            p.apply(g, k, Target::Existing(to));
            current = p.mqc();
        }
    }
    current > start + GAIN_EPSILON
}

/// One climbing step, mutating `p` in place.
///
/// The bulk phase moves nodes towards their strongest foreign cluster while
/// that raises MQC. If it cannot, up to |V|·|P| single-node neighbours are
/// scanned (node-major, then target cluster, then a fresh cluster). The best
/// improving neighbour wins; a non-improving neighbour may instead be
/// accepted by annealing, which cools the temperature, sets `snTag` and ends
/// the step at once.
pub fn climb_hill(p: &mut Partition, g: &Graph, s: &mut AnnealingState, rng: &mut impl Rng) -> ClimbOutcome {
    p.refresh(g);
    if bulk_phase(p, g) {
        return ClimbOutcome::Bulk;
    }
    let mq_old = p.mqc();
    let budget = g.len() * p.len();
    let mut seen = 0usize;
    let mut best: Option<(usize, Target, f64)> = None;
    let mut best_val = mq_old;
    let slots: Vec<usize> = p.live_slots().collect();
    'nodes: for k in 0..g.len() {
        let own = p.cluster_of(k);
        let links = p.links(g, k);
        let targets = slots
            .iter()
            .filter(|&&c| c != own)
            .map(|&c| Target::Existing(c))
            .chain((p.members(own).len() > 1).then_some(Target::New));
        for to in targets {
            if seen >= budget {
                break 'nodes;
            }
            seen += 1;
            let val = p.evaluate_with_links(g, k, to, &links).mqc;
            if val > best_val + GAIN_EPSILON {
                best = Some((k, to, val));
                best_val = val;
            } else if sn_accept(val, mq_old, s, rng) {
                p.apply(g, k, to);
                s.cool();
                s.sn_tag = true;
                return ClimbOutcome::Annealed;
            }
        }
    }
    match best {
        Some((k, to, _)) => {
            p.apply(g, k, to);
            ClimbOutcome::Neighbour
        }
        None => ClimbOutcome::Unchanged,
    }
}
