//! Feature matrices, the six pairwise measures and their weighted fusion
//! into the extended dependence graph.

pub mod combine;
pub mod features;
pub mod matrix;
pub mod measures;
pub mod structural;

pub use combine::{
    combined_similarity, suggest_significance_factors, FeatureRichness, FeatureSimilarities, SignificanceFactors,
    SimilarityBundle, SimilarityModel, Triplets, FACTOR_SUM_TOLERANCE, FEATURE_NAMES,
};
pub use features::{
    apply_tf_idf, build_feature_matrices, inheritance_closure, lowercase_key, raw_class_name_matrix, raw_text_matrix,
    FeatureSet,
};
pub use matrix::{FeatureMatrix, SparseVec, SymMatrix};
pub use measures::{cosine_similarity, jaccard_similarity, minmax_similarity, sparse_cosine, sparse_minmax_offdiag};
pub use structural::structural_similarity;
