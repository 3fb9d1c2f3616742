//! End-to-end analysis and the persisted architecture snapshot.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::architecture::{
    reassign_and_refresh, Architecture, ArchitectureInputs, ArchitectureOptions, ClassMove, RejectedMove,
};
use crate::clustering::{search, Graph, InitiationReport, SeedContext, SeedOutcome};
use crate::config::{FactorChoice, RunConfig};
use crate::error::{Error, Result};
use crate::graphml::export_graphml;
use crate::ingest::{ingest_directory, CorpusBundle, Normalizer, ScopingRules};
use crate::retrieval::{
    cluster_vectors, map_entities, query_classes, EntityMapping, QueryParams, QueryResult, RetrievalInputs,
};
use crate::similarity::{
    raw_class_name_matrix, suggest_significance_factors, FeatureMatrix, FeatureRichness, SignificanceFactors,
    SimilarityModel,
};

pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;
pub const CORPUS_FILE: &str = "corpus.json";
pub const SIMILARITY_FILE: &str = "similarity.json";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const GRAPHML_FILE: &str = "interactions.graphml";
pub const TRACE_FILE: &str = "trace.log";

/// Settings the derived views depend on, kept with the snapshot so a saved
/// analysis can be reopened without the original config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisSettings {
    /// Factors actually used (after resolving `auto`).
    pub factors: SignificanceFactors,
    pub architecture: ArchitectureOptions,
    pub query: QueryParams,
    pub mapping_threshold: f64,
}

/// A corpus with its similarity model, ready for derivations and queries.
#[derive(Debug)]
pub struct Analysis {
    pub corpus: CorpusBundle,
    pub model: SimilarityModel,
    pub graph: Graph,
    pub raw_class_names: FeatureMatrix,
    pub normalizer: Normalizer,
    pub settings: AnalysisSettings,
}

impl Analysis {
    pub fn new(corpus: CorpusBundle, settings: AnalysisSettings) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::NothingToCluster);
        }
        let model = SimilarityModel::build(&corpus, &settings.factors)?;
        let graph = Graph::new(model.combined.clone());
        let raw_class_names = raw_class_name_matrix(&corpus.features);
        Ok(Analysis {
            corpus,
            model,
            graph,
            raw_class_names,
            normalizer: Normalizer::java_default(),
            settings,
        })
    }

    /// Reopens a saved output directory.
    pub fn open(dir: &Path) -> Result<(Self, ArchitectureSnapshot)> {
        let snapshot = ArchitectureSnapshot::load(&dir.join(SNAPSHOT_FILE))?;
        let corpus = CorpusBundle::load(&dir.join(CORPUS_FILE))?;
        if corpus.len() != snapshot.entities.len() {
            return Err(Error::Ingest(format!(
                "{} holds {} entities but the snapshot expects {}",
                dir.join(CORPUS_FILE).display(),
                corpus.len(),
                snapshot.entities.len()
            )));
        }
        let analysis = Analysis::new(corpus, snapshot.settings.clone())?;
        Ok((analysis, snapshot))
    }

    pub fn architecture_inputs(&self) -> ArchitectureInputs<'_> {
        ArchitectureInputs {
            entities: &self.corpus.entities,
            dependencies: &self.corpus.dependencies,
            cross_layer: &self.corpus.cross_layer,
            class_names: &self.model.features.class_names,
            raw_class_names: &self.raw_class_names,
            graph: &self.graph,
        }
    }

    pub fn retrieval_inputs(&self) -> RetrievalInputs<'_> {
        RetrievalInputs {
            text: &self.model.features.text,
            class_names: &self.model.features.class_names,
            graph: &self.graph,
            normalizer: &self.normalizer,
        }
    }

    pub fn query(&self, text: &str) -> Result<QueryResult> {
        query_classes(text, &self.retrieval_inputs(), &self.settings.query)
    }

    pub fn map_entities(&self, clusters: &[Vec<usize>], descriptions: &[String]) -> EntityMapping {
        let inputs = self.retrieval_inputs();
        let vectors = cluster_vectors(clusters, inputs.text, inputs.class_names);
        map_entities(descriptions, &vectors, &inputs, self.settings.mapping_threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SnapshotMeta {
    /// Bumped by every reassignment.
    pub revision: u64,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

impl SnapshotMeta {
    fn fresh() -> Self {
        let now = Utc::now();
        SnapshotMeta {
            revision: 0,
            created_at: now,
            updated_at: now,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusRef {
    pub file: String,
    pub entity_count: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityInfo {
    pub id: usize,
    pub name: String,
    pub package: String,
    pub original_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchSummary {
    pub best_seed: usize,
    pub seeds: Vec<SeedOutcome>,
    pub initiation: InitiationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ArchitectureSnapshot {
    pub schema_version: u32,
    pub meta: SnapshotMeta,
    pub config_fingerprint: String,
    pub rng_seed: u64,
    pub corpus: CorpusRef,
    pub settings: AnalysisSettings,
    pub entities: Vec<EntityInfo>,
    pub search: SearchSummary,
    pub architecture: Architecture,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ArchitectureSnapshot {
    /// JSON without `meta`: equal for equal analysis contents.
    pub fn content_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("snapshot serializes");
        v.as_object_mut().expect("snapshot is an object").remove("meta");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn same_content(&self, other: &Self) -> bool {
        Self {
            meta: other.meta.clone(),
            ..self.clone()
        } == *other
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let s: ArchitectureSnapshot = serde_json::from_str(&text)?;
        if s.schema_version != SNAPSHOT_SCHEMA_VERSION {
            return Err(Error::Ingest(format!(
                "{}: unsupported snapshot schema version {}",
                path.display(),
                s.schema_version
            )));
        }
        Ok(s)
    }

    /// New snapshot with `moves` applied; revision and update time advance
    /// even when every move is rejected.
    pub fn reassign(&self, analysis: &Analysis, moves: &[ClassMove]) -> Result<(Self, Vec<RejectedMove>)> {
        let out = reassign_and_refresh(
            &analysis.architecture_inputs(),
            &self.architecture,
            moves,
            &analysis.settings.architecture,
        )?;
        let mut next = self.clone();
        next.architecture = out.architecture;
        next.meta.revision += 1;
        next.meta.updated_at = Utc::now();
        Ok((next, out.rejected))
    }
}

/// Result of [`run_pipeline`].
#[derive(Debug)]
pub struct PipelineOutput {
    pub analysis: Analysis,
    pub snapshot: ArchitectureSnapshot,
    pub output_dir: PathBuf,
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Scoping, ingestion, similarity, search and derivation for one corpus.
/// Writes the corpus bundle, similarity matrices, snapshot and GraphML into
/// `cfg.output`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let root = cfg
        .corpus
        .as_deref()
        .ok_or_else(|| Error::Config("no corpus path given".into()))?;
    let rules = match &cfg.scoping_rules {
        Some(p) => ScopingRules::load(p)?,
        None => ScopingRules::heuristics(),
    };
    let normalizer = Normalizer::java_default();
    info!("ingesting {}", root.display());
    let corpus = ingest_directory(root, &rules, cfg.call_edges.as_deref(), &normalizer)?;
    for w in &corpus.warnings {
        warn!("{w}");
    }
    if corpus.is_empty() {
        return Err(Error::NothingToCluster);
    }
    let factors = match cfg.factors {
        FactorChoice::Explicit(f) => f,
        FactorChoice::Auto => {
            let f = suggest_significance_factors(&FeatureRichness::of_corpus(&corpus));
            info!("suggested factors: {f:?}");
            f
        }
    };
    let settings = AnalysisSettings {
        factors,
        architecture: cfg.architecture(),
        query: cfg.query(),
        mapping_threshold: cfg.mapping_threshold,
    };
    let analysis = Analysis::new(corpus, settings)?;
    info!("{} entities, searching partitions", analysis.corpus.len());

    let packages: Vec<String> = analysis.corpus.entities.iter().map(|e| e.package.clone()).collect();
    let ctx = SeedContext {
        graph: &analysis.graph,
        packages: Some(&packages),
        inheritance: Some(analysis.model.deltas.inheritance()),
        outlier_elimination: cfg.outlier_elimination,
    };
    let result = search(&ctx, &cfg.search())?;
    info!(
        "best seed {} ({}): {} clusters, MQC {:.6}",
        result.best_seed, cfg.strategies[result.best_seed], result.report.cluster_count, result.report.mqc
    );
    let architecture = Architecture::derive(
        &analysis.architecture_inputs(),
        &result.best,
        &analysis.settings.architecture,
    )?;

    std::fs::create_dir_all(&cfg.output).map_err(|e| Error::io(&cfg.output, e))?;
    let corpus_json = serde_json::to_vec_pretty(&analysis.corpus)?;
    write(&cfg.output.join(CORPUS_FILE), &corpus_json)?;
    analysis.model.bundle().save(&cfg.output.join(SIMILARITY_FILE))?;

    let snapshot = ArchitectureSnapshot {
        schema_version: SNAPSHOT_SCHEMA_VERSION,
        meta: SnapshotMeta::fresh(),
        config_fingerprint: cfg.fingerprint(),
        rng_seed: cfg.rng_seed,
        corpus: CorpusRef {
            file: CORPUS_FILE.into(),
            entity_count: analysis.corpus.len(),
            sha256: sha256_hex(&corpus_json),
        },
        settings: analysis.settings.clone(),
        entities: analysis
            .corpus
            .entities
            .iter()
            .zip(&analysis.corpus.original_ids)
            .map(|(e, &original_id)| EntityInfo {
                id: e.id,
                name: e.name.clone(),
                package: e.package.clone(),
                original_id,
            })
            .collect(),
        search: SearchSummary {
            best_seed: result.best_seed,
            seeds: result.seeds,
            initiation: result.initiation,
        },
        architecture,
    };
    snapshot.save(&cfg.output.join(SNAPSHOT_FILE))?;
    export_graphml(
        &snapshot.architecture.interactions,
        &snapshot.architecture.labels,
        &cfg.output.join(GRAPHML_FILE),
    )?;
    if cfg.trace {
        let lines: String = result.trace.iter().map(|t| format!("{t}\n")).collect();
        write(&cfg.output.join(TRACE_FILE), lines.as_bytes())?;
    }
    Ok(PipelineOutput {
        analysis,
        snapshot,
        output_dir: cfg.output.clone(),
    })
}
