//! Scoping, lexical scanning and raw feature extraction.

pub mod corpus;
pub mod depgraph;
pub mod entity;
pub mod java;
pub mod scope;
pub mod tokenize;

pub use corpus::{ingest_directory, parse_source_tree, CorpusBundle};
pub use depgraph::{
    build_dependency_graph, load_call_edges, parse_call_edges, resolve_calls, CallEdge, CallFact, CrossLayerEdge,
    DependencyBuild, DependencyGraph,
};
pub use entity::{
    extract_inheritance_list, extract_name_concepts, extract_package_path, extract_textual_features, CodeEntity,
    EntityFeatures, MethodSig,
};
pub use java::{parse_java, ParsedType};
pub use scope::{scope_corpus, Layer, ScopedCorpus, ScopingRules};
pub use tokenize::{
    normalize_tokens, tokenize_identifier, IdentityStemmer, Normalizer, PorterStemmer, Stemmer, TokenBag,
};
