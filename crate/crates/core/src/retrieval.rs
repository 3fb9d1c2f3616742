//! Free-text retrieval: functional-entity descriptions to clusters and
//! queries to classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::Graph;
use crate::error::{Error, Result};
use crate::ingest::{tokenize_identifier, Normalizer};
use crate::similarity::{lowercase_key, FeatureMatrix, SparseVec};

pub const DEFAULT_ALPHA: f64 = 0.6;
pub const DEFAULT_BETA: f64 = 0.4;
pub const DEFAULT_TOP: usize = 5;
pub const DEFAULT_MAPPING_THRESHOLD: f64 = 0.1;

/// A tf-idf weighted query over one matrix's vocabulary. Terms the matrix
/// does not know are kept apart: they only contribute to the norm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryVector {
    pub known: SparseVec,
    pub unknown: BTreeMap<String, f64>,
}

impl QueryVector {
    /// Weighs term frequencies with the matrix idf; terms outside the
    /// vocabulary get `ln(N)` with `N` the number of rows.
    pub fn weigh<'a>(terms: impl IntoIterator<Item = (&'a str, f64)>, m: &FeatureMatrix) -> Self {
        let n = m.row_count().max(1) as f64;
        let mut known: BTreeMap<usize, f64> = BTreeMap::new();
        let mut unknown: BTreeMap<String, f64> = BTreeMap::new();
        for (t, tf) in terms {
            match m.column(t) {
                Some(c) => *known.entry(c).or_default() += tf,
                None => *unknown.entry(t.to_string()).or_default() += tf,
            }
        }
        let idf = m.idf.as_deref();
        QueryVector {
            known: SparseVec::from_pairs(known.into_iter().map(|(c, tf)| (c, tf * idf.map_or(1.0, |v| v[c])))),
            unknown: unknown.into_iter().map(|(t, tf)| (t, tf * n.ln())).collect(),
        }
    }

    /// No terms at all, known or unknown.
    pub fn is_empty(&self) -> bool {
        self.known.nnz() == 0 && self.unknown.is_empty()
    }

    pub fn norm(&self) -> f64 {
        let k = self.known.norm();
        (k * k + self.unknown.values().map(|w| w * w).sum::<f64>()).sqrt()
    }

    /// Cosine against a matrix row, 0 when either side has zero norm.
    pub fn cosine(&self, row: &SparseVec) -> f64 {
        let den = self.norm() * row.norm();
        if den == 0.0 {
            0.0
        } else {
            (self.known.dot(row) / den).clamp(0.0, 1.0)
        }
    }
}

/// Matrices a query is scored against.
#[derive(Debug, Clone, Copy)]
pub struct RetrievalInputs<'a> {
    /// IR-token matrix, tf-idf weighted.
    pub text: &'a FeatureMatrix,
    /// Class-name concept matrix, tf-idf weighted.
    pub class_names: &'a FeatureMatrix,
    pub graph: &'a Graph,
    pub normalizer: &'a Normalizer,
}

/// Query vectors in both spaces: stemmed IR tokens and lowercase name
/// concepts.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub text: QueryVector,
    pub names: QueryVector,
}

impl Query {
    pub fn parse(text: &str, inputs: &RetrievalInputs<'_>) -> Self {
        let bag = inputs.normalizer.text_to_bag(text);
        let tokens = QueryVector::weigh(bag.iter().map(|(t, c)| (t, c as f64)), inputs.text);
        let concepts: Vec<String> = tokenize_identifier(text)
            .iter()
            .map(|w| lowercase_key(w))
            .filter(|w| {
                !w.chars().all(|c| c.is_numeric())
                    && !inputs.normalizer.stop.contains(w)
                    && !inputs.normalizer.reserved.contains(w)
            })
            .collect();
        let names = QueryVector::weigh(concepts.iter().map(|c| (c.as_str(), 1.0)), inputs.class_names);
        Query { text: tokens, names }
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty() && self.names.is_empty()
    }

    /// Mean of the text cosine and the name-concept cosine.
    pub fn score(&self, text_row: &SparseVec, name_row: &SparseVec) -> f64 {
        (self.text.cosine(text_row) + self.names.cosine(name_row)) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankedEntry {
    pub class_id: usize,
    pub score: f64,
    pub rank: usize,
}

/// Sorted by score descending, lower id first on ties; ranks `1..=len`.
fn rank(scores: impl IntoIterator<Item = (usize, f64)>) -> Vec<RankedEntry> {
    let mut v: Vec<(usize, f64)> = scores.into_iter().collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter()
        .enumerate()
        .map(|(i, (class_id, score))| RankedEntry {
            class_id,
            score,
            rank: i + 1,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct QueryParams {
    pub alpha: f64,
    pub beta: f64,
    /// Length of the VSM list; all classes when `None`.
    pub depth: Option<usize>,
    /// Entries in [`QueryResult::top`].
    pub top: usize,
}

impl Default for QueryParams {
    fn default() -> Self {
        QueryParams {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            depth: None,
            top: DEFAULT_TOP,
        }
    }
}

impl QueryParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if !ok(self.alpha) || !ok(self.beta) || (self.alpha + self.beta - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "rank weights must lie in [0, 1] and sum to 1, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        if self.depth == Some(0) {
            return Err(Error::Config("query depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FinalRank {
    pub class_id: usize,
    pub vsm_rank: usize,
    pub centroid_rank: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryResult {
    pub vsm: Vec<RankedEntry>,
    pub centroid: Vec<RankedEntry>,
    /// Every listed class, best (lowest score) first.
    pub ranking: Vec<FinalRank>,
    pub top: Vec<FinalRank>,
}

/// Ranks classes against a query by fusing the VSM rank with a rank that
/// propagates similarity from highly ranked neighbours.
pub fn query_classes(text: &str, inputs: &RetrievalInputs<'_>, params: &QueryParams) -> Result<QueryResult> {
    params.validate()?;
    let q = Query::parse(text, inputs);
    if q.is_empty() {
        return Err(Error::UnanswerableQuery);
    }
    let d = inputs.text.row_count();
    let mut vsm = rank((0..d).map(|i| (i, q.score(&inputs.text.rows[i], &inputs.class_names.rows[i]))));
    vsm.truncate(params.depth.unwrap_or(d).min(d));

    let centroid = rank(vsm.iter().map(|e| {
        let s: f64 = vsm
            .iter()
            .filter(|o| o.class_id != e.class_id)
            .map(|o| inputs.graph.weight(e.class_id, o.class_id) / o.rank as f64)
            .sum();
        (e.class_id, s)
    }));
    let centroid_rank: BTreeMap<usize, usize> = centroid.iter().map(|e| (e.class_id, e.rank)).collect();

    let mut ranking: Vec<FinalRank> = vsm
        .iter()
        .map(|e| {
            let c = centroid_rank[&e.class_id];
            FinalRank {
                class_id: e.class_id,
                vsm_rank: e.rank,
                centroid_rank: c,
                score: params.alpha * e.rank as f64 + params.beta * c as f64,
            }
        })
        .collect();
    ranking.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.class_id.cmp(&b.class_id)));
    let top = ranking.iter().take(params.top).cloned().collect();
    Ok(QueryResult {
        vsm,
        centroid,
        ranking,
        top,
    })
}

/// Per-cluster sums of member rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterVectors {
    pub text: Vec<SparseVec>,
    pub names: Vec<SparseVec>,
}

pub fn cluster_vectors(clusters: &[Vec<usize>], text: &FeatureMatrix, names: &FeatureMatrix) -> ClusterVectors {
    let sum = |m: &FeatureMatrix, ms: &[usize]| {
        let mut acc = SparseVec::new();
        for &v in ms {
            acc.add_assign(&m.rows[v]);
        }
        acc
    };
    ClusterVectors {
        text: clusters.iter().map(|ms| sum(text, ms)).collect(),
        names: clusters.iter().map(|ms| sum(names, ms)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterMatch {
    pub cluster_id: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityMatch {
    pub description: String,
    pub clusters: Vec<ClusterMatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityMapping {
    pub threshold: f64,
    pub entities: Vec<EntityMatch>,
}

/// Clusters whose similarity to each description reaches `threshold`,
/// most similar first (lower cluster id on ties).
pub fn map_entities(
    descriptions: &[String],
    vectors: &ClusterVectors,
    inputs: &RetrievalInputs<'_>,
    threshold: f64,
) -> EntityMapping {
    let entities = descriptions
        .iter()
        .map(|desc| {
            let q = Query::parse(desc, inputs);
            if q.is_empty() {
                return EntityMatch {
                    description: desc.clone(),
                    clusters: Vec::new(),
                    diagnostic: Some("description normalizes to no terms".into()),
                };
            }
            let mut clusters: Vec<ClusterMatch> = vectors
                .text
                .iter()
                .zip(&vectors.names)
                .enumerate()
                .map(|(cluster_id, (t, n))| ClusterMatch {
                    cluster_id,
                    similarity: q.score(t, n),
                })
                .filter(|m| m.similarity >= threshold)
                .collect();
            clusters.sort_by(|a, b| {
                b.similarity
                    .total_cmp(&a.similarity)
                    .then(a.cluster_id.cmp(&b.cluster_id))
            });
            EntityMatch {
                description: desc.clone(),
                clusters,
                diagnostic: None,
            }
        })
        .collect();
    EntityMapping { threshold, entities }
}

/// One description per nonblank line.
pub fn parse_descriptions(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
