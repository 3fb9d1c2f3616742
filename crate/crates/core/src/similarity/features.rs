use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::ingest::{CodeEntity, EntityFeatures};

/// Scales each cell by `ln(d / n_j)` and records the idf per column.
/// Columns that become all-zero keep their vocabulary slot.
pub fn apply_tf_idf(mut m: FeatureMatrix) -> FeatureMatrix {
    let d = m.row_count() as f64;
    let idf: Vec<f64> = m
        .document_frequencies()
        .into_iter()
        .map(|n| if n == 0 { 1.0 } else { (d / n as f64).ln() })
        .collect();
    for row in &mut m.rows {
        row.map_values(|j, v| v * idf[j]);
    }
    m.idf = Some(idf);
    m
}

fn simple_name(s: &str) -> &str {
    s.rsplit('.').next().unwrap_or(s)
}

/// Closed inheritance sets: own name, the raw parent list, and the names of
/// every class that lists this one as a parent. No transitive closure.
pub fn inheritance_closure(entities: &[CodeEntity]) -> Vec<BTreeSet<String>> {
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in entities {
        for p in &e.inheritance_raw {
            children.entry(simple_name(p)).or_default().push(&e.name);
        }
    }
    entities
        .iter()
        .map(|e| {
            let mut set: BTreeSet<String> = BTreeSet::new();
            set.insert(e.name.clone());
            set.extend(e.inheritance_raw.iter().map(|p| simple_name(p).to_string()));
            if let Some(cs) = children.get(e.name.as_str()) {
                set.extend(cs.iter().map(|c| c.to_string()));
            }
            set
        })
        .collect()
}

/// Inputs of the six measures, rows in corpus order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FeatureSet {
    /// IR-token co-occurrence matrix, tf-idf weighted.
    pub text: FeatureMatrix,
    /// Class-name concepts, tf-idf weighted, keyed case-insensitively.
    pub class_names: FeatureMatrix,
    /// Method-name concepts, tf-idf weighted, keyed case-insensitively.
    pub method_names: FeatureMatrix,
    pub packages: Vec<BTreeSet<String>>,
    pub inheritance: Vec<BTreeSet<String>>,
}

pub(crate) fn concept_counts(words: &[String]) -> Vec<(&str, f64)> {
    words.iter().map(|w| (w.as_str(), 1.0)).collect()
}

pub fn lowercase_key(s: &str) -> String {
    s.to_lowercase()
}

/// Raw IR-token counts, unweighted.
pub fn raw_text_matrix(features: &[EntityFeatures]) -> FeatureMatrix {
    FeatureMatrix::from_counts(
        features
            .iter()
            .map(|f| f.tokens.iter().map(|(t, c)| (t, c as f64)).collect::<Vec<_>>()),
        str::to_string,
    )
}

/// Raw class-name concept counts, unweighted.
pub fn raw_class_name_matrix(features: &[EntityFeatures]) -> FeatureMatrix {
    FeatureMatrix::from_counts(
        features.iter().map(|f| concept_counts(&f.class_concepts)),
        lowercase_key,
    )
}

pub fn build_feature_matrices(entities: &[CodeEntity], features: &[EntityFeatures]) -> FeatureSet {
    assert_eq!(entities.len(), features.len());
    FeatureSet {
        text: apply_tf_idf(raw_text_matrix(features)),
        class_names: apply_tf_idf(raw_class_name_matrix(features)),
        method_names: apply_tf_idf(FeatureMatrix::from_counts(
            features.iter().map(|f| concept_counts(&f.method_concepts)),
            lowercase_key,
        )),
        packages: features
            .iter()
            .map(|f| f.package_path.iter().cloned().collect())
            .collect(),
        inheritance: inheritance_closure(entities),
    }
}
