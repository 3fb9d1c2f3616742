use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::depgraph::{
    build_dependency_graph, load_call_edges, resolve_calls, CallFact, CrossLayerEdge, DependencyGraph,
};
use super::entity::{CodeEntity, EntityFeatures};
use super::java::{parse_java, ParsedType};
use super::scope::{scope_corpus, Layer, ScopingRules};
use super::tokenize::Normalizer;
use crate::error::{Error, Result};

pub const CORPUS_SCHEMA_VERSION: u32 = 1;

/// Everything downstream stages need from ingestion. Entity ids are dense
/// over the business layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusBundle {
    pub schema_version: u32,
    pub entities: Vec<CodeEntity>,
    /// Position of each business entity in the unscoped input order.
    pub original_ids: Vec<usize>,
    pub features: Vec<EntityFeatures>,
    pub dependencies: DependencyGraph,
    pub cross_layer: Vec<CrossLayerEdge>,
    /// Qualified names of scoped-out classes per layer.
    pub excluded: BTreeMap<Layer, Vec<String>>,
    pub warnings: Vec<String>,
}

impl CorpusBundle {
    /// Scopes `entities`, places `facts` into the dependency graph and
    /// extracts per-entity features.
    pub fn from_entities(
        entities: Vec<CodeEntity>,
        facts: &[CallFact],
        rules: &ScopingRules,
        normalizer: &Normalizer,
    ) -> Result<Self> {
        let scoped = scope_corpus(entities, rules)?;
        let build = build_dependency_graph(&scoped, facts);
        let features = scoped
            .business
            .par_iter()
            .map(|e| EntityFeatures::extract(e, normalizer))
            .collect();
        let excluded = scoped
            .excluded
            .iter()
            .map(|(l, es)| (*l, es.iter().map(CodeEntity::qualified_name).collect()))
            .collect();
        Ok(CorpusBundle {
            schema_version: CORPUS_SCHEMA_VERSION,
            entities: scoped.business,
            original_ids: scoped.original_ids,
            features,
            dependencies: build.graph,
            cross_layer: build.cross_layer,
            excluded,
            warnings: build.warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Number of distinct package declarations in the business layer.
    pub fn package_count(&self) -> usize {
        self.entities
            .iter()
            .map(|e| e.package.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn public_method_counts(&self) -> Vec<usize> {
        self.entities.iter().map(|e| e.public_methods.len()).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bundle: CorpusBundle = serde_json::from_str(&text)?;
        if bundle.schema_version != CORPUS_SCHEMA_VERSION {
            return Err(Error::Ingest(format!(
                "{}: unsupported corpus schema version {}",
                path.display(),
                bundle.schema_version
            )));
        }
        Ok(bundle)
    }
}

/// Parses every `.java` file under `root` in path order. Source paths are
/// stored relative to `root`. Undecodable files are reported and skipped.
pub fn parse_source_tree(root: &Path) -> Result<(Vec<ParsedType>, Vec<String>)> {
    if !root.is_dir() {
        return Err(Error::Ingest(format!("{} is not a directory", root.display())));
    }
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Ingest(format!("walking {}: {e}", root.display())))?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "java") {
            files.push(entry.into_path());
        }
    }
    if files.is_empty() {
        return Err(Error::Ingest(format!("no .java files under {}", root.display())));
    }
    let parsed: Vec<std::result::Result<Vec<ParsedType>, String>> = files
        .par_iter()
        .map(|f| {
            let bytes = std::fs::read(f).map_err(|e| format!("{}: {e}", f.display()))?;
            let text = String::from_utf8(bytes).map_err(|_| format!("{}: not valid UTF-8, skipped", f.display()))?;
            let rel = f.strip_prefix(root).unwrap_or(f);
            Ok(parse_java(&text, Some(rel)))
        })
        .collect();
    let mut types = Vec::new();
    let mut warnings = Vec::new();
    for r in parsed {
        match r {
            Ok(ts) => types.extend(ts),
            Err(w) => warnings.push(w),
        }
    }
    for (i, t) in types.iter_mut().enumerate() {
        t.entity.id = i;
    }
    Ok((types, warnings))
}

/// Full ingestion of one source tree. Call facts come from `call_edges` when
/// given, otherwise from source-level resolution.
pub fn ingest_directory(
    root: &Path,
    rules: &ScopingRules,
    call_edges: Option<&Path>,
    normalizer: &Normalizer,
) -> Result<CorpusBundle> {
    let (types, mut warnings) = parse_source_tree(root)?;
    let facts = match call_edges {
        Some(p) => load_call_edges(p)?,
        None => resolve_calls(&types),
    };
    let entities = types.into_iter().map(|t| t.entity).collect();
    let mut bundle = CorpusBundle::from_entities(entities, &facts, rules, normalizer)?;
    warnings.append(&mut bundle.warnings);
    bundle.warnings = warnings;
    Ok(bundle)
}
