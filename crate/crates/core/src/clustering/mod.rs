//! Partition search maximizing MQC over the combined similarity graph.

pub mod anneal;
pub mod climb;
pub mod graph;
pub mod outliers;
pub mod partition;
pub mod search;
pub mod seeds;

pub use anneal::{sn_accept, AnnealingState, DEFAULT_COOLING, DEFAULT_TEMPERATURE};
pub use climb::{climb_hill, ClimbOutcome};
pub use graph::Graph;
pub use outliers::{eliminate_outliers, next_percentile, skewness_g1, stoer_wagner, OutlierResult, OutlierSummary};
pub use partition::{
    audit_counters, clustering_factor, mq, mq_after_move, mqc, quality, Move, MoveEval, Partition, QualityReport,
    Target,
};
pub use search::{
    initiation_test, search, InitiationReport, SearchConfig, SearchResult, SeedOutcome, TraceLine,
    DEFAULT_EPSILON_STOP, DEFAULT_MAX_ITERATIONS,
};
pub use seeds::{cc_seed, clique_strength, generate_seed, SeedContext, SeedStrategy};
