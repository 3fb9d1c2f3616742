//! Pairwise similarity measures. Dense slices form the reference API; the
//! [`SparseVec`] variants are what matrix construction uses.

use std::collections::BTreeSet;

use super::matrix::SparseVec;

/// Cosine of the angle between `u` and `v`; 0 when either is the zero vector.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "cosine over vectors of different length");
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    ratio_or_zero(dot, nu * nv)
}

/// Σmin/Σmax. Two all-zero vectors count as identical (1).
pub fn minmax_similarity(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "minmax over vectors of different length");
    let lo: f64 = u.iter().zip(v).map(|(a, b)| a.min(*b)).sum();
    let hi: f64 = u.iter().zip(v).map(|(a, b)| a.max(*b)).sum();
    if hi == 0.0 {
        1.0
    } else {
        (lo / hi).clamp(0.0, 1.0)
    }
}

/// |A∩B| / |A∪B|; 0 when both sets are empty.
pub fn jaccard_similarity<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn sparse_cosine(u: &SparseVec, v: &SparseVec) -> f64 {
    ratio_or_zero(u.dot(v), u.norm() * v.norm())
}

/// Sparse min/max for distinct entities: 0/0 gives 0 here, since two
/// featureless classes share no evidence.
pub fn sparse_minmax_offdiag(u: &SparseVec, v: &SparseVec) -> f64 {
    let (lo, hi) = u.min_max_sums(v);
    ratio_or_zero(lo, hi)
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}
