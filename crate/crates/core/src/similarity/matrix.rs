use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Sparse nonnegative vector, entries sorted by index with no stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SparseVec {
    entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from unsorted `(index, value)` pairs; duplicates are summed and
    /// zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, v) in pairs {
            *acc.entry(i as u32).or_insert(0.0) += v;
        }
        SparseVec {
            entries: acc.into_iter().filter(|&(_, v)| v != 0.0).collect(),
        }
    }

    pub fn from_dense(v: &[f64]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(i, &x)| (i as u32, x))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|&(i, v)| (i as usize, v))
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(i as u32), |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1 * e.1).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut s = 0.0;
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, va) = self.entries[a];
            let (ib, vb) = other.entries[b];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s += va * vb;
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }

    /// `(Σ min, Σ max)` over the union of supports.
    pub fn min_max_sums(&self, other: &SparseVec) -> (f64, f64) {
        let (mut a, mut b) = (0, 0);
        let (mut lo, mut hi) = (0.0, 0.0);
        loop {
            match (self.entries.get(a), other.entries.get(b)) {
                (Some(&(ia, va)), Some(&(ib, vb))) if ia == ib => {
                    lo += va.min(vb);
                    hi += va.max(vb);
                    a += 1;
                    b += 1;
                }
                (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                    hi += va;
                    a += 1;
                }
                (_, Some(&(_, vb))) => {
                    hi += vb;
                    b += 1;
                }
                (Some(&(_, va)), None) => {
                    hi += va;
                    a += 1;
                }
                (None, None) => break,
            }
        }
        (lo, hi)
    }

    pub fn add_assign(&mut self, other: &SparseVec) {
        let merged = self.iter().chain(other.iter());
        *self = SparseVec::from_pairs(merged);
    }

    pub fn map_values(&mut self, mut f: impl FnMut(usize, f64) -> f64) {
        for e in &mut self.entries {
            e.1 = f(e.0 as usize, e.1);
        }
        self.entries.retain(|e| e.1 != 0.0);
    }
}

/// Document-term matrix: one row per entity, columns over a sorted
/// vocabulary. `labels` holds the display form of each column.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureMatrix {
    pub vocabulary: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<SparseVec>,
    /// Per-column idf once weighting has been applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idf: Option<Vec<f64>>,
}

impl FeatureMatrix {
    /// Builds a raw-frequency matrix. Terms are keyed by `key(term)`; the
    /// first surface form seen (in row order) becomes the column label.
    pub fn from_counts<'a, R, K>(rows: R, key: K) -> Self
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = (&'a str, f64)>,
        K: Fn(&str) -> String,
    {
        let raw: Vec<Vec<(String, &'a str, f64)>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|(t, c)| (key(t), t, c)).collect())
            .collect();
        let mut labels_by_key: BTreeMap<String, &str> = BTreeMap::new();
        for row in &raw {
            for (k, surface, _) in row {
                labels_by_key.entry(k.clone()).or_insert(surface);
            }
        }
        let index: BTreeMap<&str, usize> = labels_by_key.keys().enumerate().map(|(i, k)| (k.as_str(), i)).collect();
        let rows = raw
            .iter()
            .map(|r| SparseVec::from_pairs(r.iter().map(|(k, _, c)| (index[k.as_str()], *c))))
            .collect();
        FeatureMatrix {
            vocabulary: labels_by_key.keys().cloned().collect(),
            labels: labels_by_key.values().map(|s| s.to_string()).collect(),
            rows,
            idf: None,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn column(&self, key: &str) -> Option<usize> {
        self.vocabulary.binary_search_by(|v| v.as_str().cmp(key)).ok()
    }

    /// Number of rows with a positive value in each column.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.col_count()];
        for r in &self.rows {
            for (j, v) in r.iter() {
                if v > 0.0 {
                    df[j] += 1;
                }
            }
        }
        df
    }

    /// Component-wise sum of the given rows.
    pub fn sum_rows(&self, ids: impl IntoIterator<Item = usize>) -> SparseVec {
        SparseVec::from_pairs(ids.into_iter().flat_map(|i| self.rows[i].iter()))
    }
}

/// Dense symmetric d×d matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Fills the upper triangle from `f(i, j)` for `i < j` and mirrors it.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i + 1..n).map(|j| f(i, j)).collect())
            .collect();
        let mut m = SymMatrix::zeros(n);
        for (i, row) in rows.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                m.set(i, i + 1 + k, v);
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i,j)` and `(j,i)`; writes to the diagonal are ignored.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i != j {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// Sum over unordered pairs.
    pub fn total(&self) -> f64 {
        self.upper_triangle().map(|(_, _, w)| w).sum()
    }

    /// `(i, j, w)` for `i < j`, row-major.
    pub fn upper_triangle(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// Nonzero upper-triangle entries, the serialized form.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.upper_triangle().filter(|t| t.2 != 0.0).collect()
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut m = SymMatrix::zeros(n);
        for &(i, j, w) in triplets {
            m.set(i, j, w);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_counts_sorts_and_folds_case() {
        let rows = vec![vec![("Order", 1.0), ("Manager", 1.0)], vec![("order", 2.0)]];
        let m = FeatureMatrix::from_counts(rows, |s: &str| s.to_lowercase());
        assert_eq!(m.vocabulary, ["manager", "order"]);
        assert_eq!(m.labels, ["Manager", "Order"]);
        assert_eq!(m.rows[1].get(1), 2.0);
        assert_eq!(m.document_frequencies(), [1, 2]);
    }

    #[test]
    fn sym_matrix_mirrors_and_keeps_zero_diagonal() {
        let mut m = SymMatrix::from_fn(3, |i, j| (i + j) as f64);
        m.set(1, 1, 9.0);
        assert_eq!(m.get(2, 1), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.triplets(), [(0, 1, 1.0), (0, 2, 2.0), (1, 2, 3.0)]);
        assert_eq!(SymMatrix::from_triplets(3, &m.triplets()), m);
    }

    fn dense() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..5.0], 6)
    }

    proptest! {
        #[test]
        fn sparse_ops_match_dense(a in dense(), b in dense()) {
            let (sa, sb) = (SparseVec::from_dense(&a), SparseVec::from_dense(&b));
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            prop_assert!((sa.dot(&sb) - dot).abs() < 1e-12);
            let lo: f64 = a.iter().zip(&b).map(|(x, y)| x.min(*y)).sum();
            let hi: f64 = a.iter().zip(&b).map(|(x, y)| x.max(*y)).sum();
            let (slo, shi) = sa.min_max_sums(&sb);
            prop_assert!((slo - lo).abs() < 1e-12 && (shi - hi).abs() < 1e-12);
            let mut sum = sa.clone();
            sum.add_assign(&sb);
            let dsum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(sum.to_dense(6), dsum);
        }
    }
}
