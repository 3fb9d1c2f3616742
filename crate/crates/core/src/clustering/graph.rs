use crate::similarity::SymMatrix;

/// Complete weighted undirected graph with cached weighted degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    w: SymMatrix,
    degree: Vec<f64>,
}

impl Graph {
    pub fn new(w: SymMatrix) -> Self {
        let degree = (0..w.len()).map(|i| w.row(i).iter().sum()).collect();
        Graph { w, degree }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        Graph::new(SymMatrix::from_fn(n, f))
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w.get(i, j)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.w.row(i)
    }

    /// Σ_v w(k, v).
    #[inline]
    pub fn degree(&self, k: usize) -> f64 {
        self.degree[k]
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.w
    }

    /// |E| of the complete graph.
    pub fn pair_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    /// Σ over unordered pairs.
    pub fn density(&self) -> f64 {
        self.degree.iter().sum::<f64>() / 2.0
    }

    /// All unordered pairs sorted by weight descending, then `(u, v)`
    /// ascending.
    pub fn sorted_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut e: Vec<_> = self.w.upper_triangle().collect();
        e.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
        e
    }

    /// The top `(100 - percentile)`% of all pairs, keeping only positive
    /// weights. Percentile 75 gives the top quartile.
    pub fn top_edges(&self, percentile: u32) -> Vec<(usize, usize, f64)> {
        let keep_pct = 100u32.saturating_sub(percentile.min(100)) as usize;
        let count = (self.pair_count() * keep_pct).div_ceil(100);
        self.sorted_edges()
            .into_iter()
            .take(count)
            .filter(|e| e.2 > 0.0)
            .collect()
    }
}
