//! Architecture recovery for Java-style code bases.
//!
//! Source trees are scoped and scanned into entities ([`ingest`]), compared
//! on six features ([`similarity`]), partitioned by a quality-driven search
//! ([`clustering`]) and described by interfaces, interactions, labels and a
//! hierarchy ([`architecture`]). [`retrieval`] maps free text onto classes
//! and clusters, [`portfolio`] clusters whole applications, and
//! [`pipeline`] plus [`service`] tie everything to files and HTTP.

pub mod architecture;
pub mod clustering;
pub mod config;
pub mod error;
pub mod graphml;
pub mod ingest;
pub mod pipeline;
pub mod portfolio;
pub mod retrieval;
pub mod service;
pub mod similarity;

pub use config::{FactorChoice, RunConfig};
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, Analysis, ArchitectureSnapshot, PipelineOutput};
