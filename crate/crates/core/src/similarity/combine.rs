use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{build_feature_matrices, FeatureSet};
use super::matrix::SymMatrix;
use super::measures::{jaccard_similarity, sparse_cosine, sparse_minmax_offdiag};
use super::structural::structural_similarity;
use crate::error::{Error, Result};
use crate::ingest::CorpusBundle;

pub const FACTOR_SUM_TOLERANCE: f64 = 1e-9;

/// Relative weight of each of the six features in the combined similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SignificanceFactors {
    pub textual: f64,
    pub class_name: f64,
    pub method_name: f64,
    pub packaging: f64,
    pub inheritance: f64,
    pub structural: f64,
}

impl Default for SignificanceFactors {
    fn default() -> Self {
        SignificanceFactors {
            textual: 0.1,
            class_name: 0.2,
            method_name: 0.1,
            packaging: 0.2,
            inheritance: 0.2,
            structural: 0.2,
        }
    }
}

pub const FEATURE_NAMES: [&str; 6] = [
    "textual",
    "className",
    "methodName",
    "packaging",
    "inheritance",
    "structural",
];

impl SignificanceFactors {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.textual,
            self.class_name,
            self.method_name,
            self.packaging,
            self.inheritance,
            self.structural,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        SignificanceFactors {
            textual: a[0],
            class_name: a[1],
            method_name: a[2],
            packaging: a[3],
            inheritance: a[4],
            structural: a[5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.as_array();
        let echo = || {
            FEATURE_NAMES
                .iter()
                .zip(a)
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        if a.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::Config(format!(
                "significance factors must each lie in [0, 1]: {}",
                echo()
            )));
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > FACTOR_SUM_TOLERANCE {
            return Err(Error::Config(format!(
                "significance factors must sum to 1 (got {sum}): {}",
                echo()
            )));
        }
        Ok(())
    }
}

/// Per-entity richness of each feature, used to suggest factors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureRichness {
    pub per_feature: [Vec<f64>; 6],
}

impl FeatureRichness {
    /// Token counts, concept counts, package segments, parent counts and call
    /// degree per entity.
    pub fn of_corpus(corpus: &CorpusBundle) -> Self {
        let n = corpus.len();
        let mut degree = vec![0.0; n];
        for e in &corpus.dependencies.edges {
            degree[e.caller] += 1.0;
            degree[e.callee] += 1.0;
        }
        FeatureRichness {
            per_feature: [
                corpus.features.iter().map(|f| f.tokens.total() as f64).collect(),
                corpus.features.iter().map(|f| f.class_concepts.len() as f64).collect(),
                corpus.features.iter().map(|f| f.method_concepts.len() as f64).collect(),
                corpus.features.iter().map(|f| f.package_path.len() as f64).collect(),
                corpus.entities.iter().map(|e| e.inheritance_raw.len() as f64).collect(),
                degree,
            ],
        }
    }
}

fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Starts from the defaults, halves the factor of each semantic feature
/// (textual, class name, method name) whose richness varies with CV > 1,
/// zeroes features absent from every class, and renormalizes.
pub fn suggest_significance_factors(stats: &FeatureRichness) -> SignificanceFactors {
    let mut a = SignificanceFactors::default().as_array();
    for (k, xs) in stats.per_feature.iter().enumerate() {
        if xs.iter().all(|&x| x == 0.0) {
            a[k] = 0.0;
        } else if k < 3 && coefficient_of_variation(xs) > 1.0 {
            a[k] /= 2.0;
        }
    }
    let sum: f64 = a.iter().sum();
    if sum == 0.0 {
        return SignificanceFactors::default();
    }
    SignificanceFactors::from_array(a.map(|v| v / sum))
}

/// The six per-feature similarity matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSimilarities {
    pub matrices: [SymMatrix; 6],
}

impl FeatureSimilarities {
    pub fn compute(features: &FeatureSet, structural: SymMatrix) -> Self {
        let n = features.text.row_count();
        let text = &features.text.rows;
        let class = &features.class_names.rows;
        let method = &features.method_names.rows;
        FeatureSimilarities {
            matrices: [
                SymMatrix::from_fn(n, |i, j| sparse_cosine(&text[i], &text[j])),
                SymMatrix::from_fn(n, |i, j| sparse_minmax_offdiag(&class[i], &class[j])),
                SymMatrix::from_fn(n, |i, j| sparse_minmax_offdiag(&method[i], &method[j])),
                SymMatrix::from_fn(n, |i, j| {
                    jaccard_similarity(&features.packages[i], &features.packages[j])
                }),
                SymMatrix::from_fn(n, |i, j| {
                    jaccard_similarity(&features.inheritance[i], &features.inheritance[j])
                }),
                structural,
            ],
        }
    }

    pub fn inheritance(&self) -> &SymMatrix {
        &self.matrices[4]
    }
}

/// Weighted sum of the six matrices. Rejects factors that are out of range
/// or do not sum to 1.
pub fn combined_similarity(f: &SignificanceFactors, six: &[SymMatrix; 6]) -> Result<SymMatrix> {
    f.validate()?;
    let n = six[0].len();
    if six.iter().any(|m| m.len() != n) {
        return Err(Error::Internal("similarity matrices differ in dimension".into()));
    }
    let a = f.as_array();
    Ok(SymMatrix::from_fn(n, |i, j| {
        let w: f64 = (0..6).map(|k| a[k] * six[k].get(i, j)).sum();
        w.clamp(0.0, 1.0)
    }))
}

/// Features, per-feature similarities, factors and the combined graph of
/// one corpus.
#[derive(Debug, Clone)]
pub struct SimilarityModel {
    pub features: FeatureSet,
    pub deltas: FeatureSimilarities,
    pub factors: SignificanceFactors,
    pub combined: SymMatrix,
}

impl SimilarityModel {
    pub fn build(corpus: &CorpusBundle, factors: &SignificanceFactors) -> Result<Self> {
        factors.validate()?;
        let features = build_feature_matrices(&corpus.entities, &corpus.features);
        let structural = structural_similarity(
            corpus.len(),
            corpus
                .dependencies
                .edges
                .iter()
                .map(|e| (e.caller, e.callee, e.method.as_str())),
            &corpus.public_method_counts(),
        );
        let deltas = FeatureSimilarities::compute(&features, structural);
        let combined = combined_similarity(factors, &deltas.matrices)?;
        Ok(SimilarityModel {
            features,
            deltas,
            factors: *factors,
            combined,
        })
    }

    pub fn bundle(&self) -> SimilarityBundle {
        SimilarityBundle {
            schema_version: 1,
            entity_count: self.combined.len(),
            factors: self.factors,
            features: FEATURE_NAMES
                .iter()
                .zip(&self.deltas.matrices)
                .map(|(n, m)| (n.to_string(), m.triplets()))
                .collect(),
            combined: self.combined.triplets(),
        }
    }
}

pub type Triplets = Vec<(usize, usize, f64)>;

/// Audit form of a [`SimilarityModel`]: nonzero `(i, j, w)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimilarityBundle {
    pub schema_version: u32,
    pub entity_count: usize,
    pub factors: SignificanceFactors,
    pub features: std::collections::BTreeMap<String, Triplets>,
    pub combined: Triplets,
}

impl SimilarityBundle {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn combined_matrix(&self) -> SymMatrix {
        SymMatrix::from_triplets(self.entity_count, &self.combined)
    }
}
