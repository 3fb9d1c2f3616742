//! Clustering whole applications by their aggregated features and the calls
//! between them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{search, Graph, QualityReport, SearchConfig, SeedContext, SeedStrategy};
use crate::error::{Error, Result};
use crate::ingest::{parse_source_tree, resolve_calls, CorpusBundle, Normalizer, ParsedType, ScopingRules};
use crate::similarity::{
    apply_tf_idf, raw_class_name_matrix, raw_text_matrix, sparse_cosine, sparse_minmax_offdiag, FeatureMatrix,
    SignificanceFactors, SparseVec, SymMatrix, Triplets, FACTOR_SUM_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Application {
    pub name: String,
    pub corpus: CorpusBundle,
}

/// A call from a business class of one application into a business class of
/// another.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossAppCall {
    pub caller_app: usize,
    pub callee_app: usize,
    /// Qualified name of the called class.
    pub callee: String,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApplicationProfile {
    pub app_id: usize,
    pub name: String,
    pub giant_text: SparseVec,
    pub giant_names: SparseVec,
    /// Calls this application makes into others.
    pub cross_app_calls: Vec<CrossAppCall>,
    pub public_methods: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PortfolioProfiles {
    pub profiles: Vec<ApplicationProfile>,
    pub text_vocabulary: Vec<String>,
    pub name_vocabulary: Vec<String>,
}

fn giant_vectors(m: &FeatureMatrix, ranges: &[std::ops::Range<usize>]) -> Vec<SparseVec> {
    ranges
        .iter()
        .map(|r| {
            let mut acc = SparseVec::new();
            for row in &m.rows[r.clone()] {
                acc.add_assign(row);
            }
            acc
        })
        .collect()
}

/// Per-application giant vectors: raw frequencies summed over member
/// classes, weighted with idf recomputed over the classes of all
/// applications.
pub fn build_app_profiles(apps: &[Application], cross: &[CrossAppCall]) -> Result<PortfolioProfiles> {
    if apps.len() < 2 {
        return Err(Error::PortfolioTooSmall(apps.len()));
    }
    let mut ranges = Vec::with_capacity(apps.len());
    let mut features = Vec::new();
    for a in apps {
        let start = features.len();
        features.extend(a.corpus.features.iter().cloned());
        ranges.push(start..features.len());
    }
    // tf-idf is linear in the counts, so weighting the union and then summing
    // equals summing raw counts and weighting with the union idf
    let text = apply_tf_idf(raw_text_matrix(&features));
    let names = apply_tf_idf(raw_class_name_matrix(&features));
    let giant_text = giant_vectors(&text, &ranges);
    let giant_names = giant_vectors(&names, &ranges);
    let profiles = apps
        .iter()
        .enumerate()
        .map(|(i, a)| ApplicationProfile {
            app_id: i,
            name: a.name.clone(),
            giant_text: giant_text[i].clone(),
            giant_names: giant_names[i].clone(),
            cross_app_calls: cross.iter().filter(|c| c.caller_app == i).cloned().collect(),
            public_methods: a.corpus.public_method_counts().iter().sum(),
        })
        .collect();
    Ok(PortfolioProfiles {
        profiles,
        text_vocabulary: text.vocabulary,
        name_vocabulary: names.vocabulary,
    })
}

/// Weights of the three features defined between applications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AppFactors {
    pub textual: f64,
    pub class_name: f64,
    pub structural: f64,
}

impl AppFactors {
    /// Keeps the textual, class-name and structural factors and rescales
    /// them to sum to 1.
    pub fn from_significance(f: &SignificanceFactors) -> Result<Self> {
        let s = f.textual + f.class_name + f.structural;
        if s <= 0.0 {
            return Err(Error::Config(format!(
                "textual ({}), class-name ({}) and structural ({}) factors are all zero",
                f.textual, f.class_name, f.structural
            )));
        }
        Ok(AppFactors {
            textual: f.textual / s,
            class_name: f.class_name / s,
            structural: f.structural / s,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let v = [self.textual, self.class_name, self.structural];
        if v.iter().any(|x| !(0.0..=1.0).contains(x)) || (v.iter().sum::<f64>() - 1.0).abs() > FACTOR_SUM_TOLERANCE {
            return Err(Error::Config(format!(
                "application factors must lie in [0, 1] and sum to 1, got textual={} classNames={} structural={}",
                self.textual, self.class_name, self.structural
            )));
        }
        Ok(())
    }
}

impl Default for AppFactors {
    fn default() -> Self {
        Self::from_significance(&SignificanceFactors::default()).expect("default factors are positive")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppSimilarity {
    pub textual: SymMatrix,
    pub class_names: SymMatrix,
    pub structural: SymMatrix,
    pub combined: SymMatrix,
}

pub fn app_similarity(p: &PortfolioProfiles, f: &AppFactors) -> Result<AppSimilarity> {
    f.validate()?;
    let ps = &p.profiles;
    let n = ps.len();
    let textual = SymMatrix::from_fn(n, |i, j| sparse_cosine(&ps[i].giant_text, &ps[j].giant_text));
    let class_names = SymMatrix::from_fn(n, |i, j| sparse_minmax_offdiag(&ps[i].giant_names, &ps[j].giant_names));
    let keys: Vec<(usize, usize, String)> = ps
        .iter()
        .flat_map(|a| &a.cross_app_calls)
        .map(|c| (c.caller_app, c.callee_app, format!("{}.{}", c.callee, c.method)))
        .collect();
    let structural = crate::similarity::structural_similarity(
        n,
        keys.iter().map(|(u, v, m)| (*u, *v, m.as_str())),
        &ps.iter().map(|a| a.public_methods).collect::<Vec<_>>(),
    );
    let combined = SymMatrix::from_fn(n, |i, j| {
        (f.textual * textual.get(i, j) + f.class_name * class_names.get(i, j) + f.structural * structural.get(i, j))
            .clamp(0.0, 1.0)
    });
    Ok(AppSimilarity {
        textual,
        class_names,
        structural,
        combined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AppSummary {
    pub app_id: usize,
    pub name: String,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PortfolioReport {
    pub schema_version: u32,
    pub applications: Vec<AppSummary>,
    pub factors: AppFactors,
    pub similarity: BTreeMap<String, Triplets>,
    pub cross_app_calls: Vec<CrossAppCall>,
    /// Application ids per cluster.
    pub clusters: Vec<Vec<usize>>,
    pub quality: QualityReport,
}

/// Searches partitions of the application graph with the graph-only seeds.
pub fn cluster_apps(g: &Graph, cfg: &SearchConfig) -> Result<crate::clustering::SearchResult> {
    let mut cfg = cfg.clone();
    cfg.strategies.retain(|s| SeedStrategy::GRAPH_ONLY.contains(s));
    if cfg.strategies.is_empty() {
        cfg.strategies = SeedStrategy::GRAPH_ONLY.to_vec();
    }
    search(&SeedContext::graph_only(g), &cfg)
}

/// Profiles, similarity and clustering of a set of applications.
pub fn analyze_portfolio(
    apps: &[Application],
    cross: &[CrossAppCall],
    factors: &AppFactors,
    cfg: &SearchConfig,
) -> Result<PortfolioReport> {
    let profiles = build_app_profiles(apps, cross)?;
    let sim = app_similarity(&profiles, factors)?;
    let g = Graph::new(sim.combined.clone());
    let result = cluster_apps(&g, cfg)?;
    let similarity = [
        ("textual", &sim.textual),
        ("classNames", &sim.class_names),
        ("structural", &sim.structural),
        ("combined", &sim.combined),
    ]
    .into_iter()
    .map(|(k, m)| (k.to_string(), m.triplets()))
    .collect();
    Ok(PortfolioReport {
        schema_version: 1,
        applications: apps
            .iter()
            .enumerate()
            .map(|(app_id, a)| AppSummary {
                app_id,
                name: a.name.clone(),
                classes: a.corpus.len(),
            })
            .collect(),
        factors: *factors,
        similarity,
        cross_app_calls: cross.to_vec(),
        clusters: result.best.clusters(),
        quality: result.report,
    })
}

/// Calls resolved over the union of all applications' types whose caller
/// and callee are business classes of different applications.
pub fn discover_cross_app_calls(types: &[Vec<ParsedType>], apps: &[Application]) -> Vec<CrossAppCall> {
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for (i, a) in apps.iter().enumerate() {
        for e in &a.corpus.entities {
            owner.entry(e.qualified_name()).or_insert(i);
        }
    }
    let all: Vec<ParsedType> = types.iter().flatten().cloned().collect();
    let mut calls: Vec<CrossAppCall> = resolve_calls(&all)
        .into_iter()
        .filter_map(|f| {
            let (&u, &v) = (owner.get(&f.caller)?, owner.get(&f.callee)?);
            (u != v).then_some(CrossAppCall {
                caller_app: u,
                callee_app: v,
                callee: f.callee,
                method: f.method,
            })
        })
        .collect();
    calls.sort();
    calls
}

/// One application per line: `path` or `name=path`. Blank lines and `#`
/// comments are skipped; relative paths are resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, path) = match line.split_once('=') {
            Some((n, p)) => (Some(n.trim().to_string()), p.trim()),
            None => (None, line),
        };
        let path = base.join(path);
        let name = name.unwrap_or_else(|| {
            path.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string())
        });
        out.push((name, path));
    }
    Ok(out)
}

/// Ingests every application of a manifest and resolves calls between them.
pub fn ingest_portfolio(
    entries: &[(String, PathBuf)],
    rules: &ScopingRules,
    normalizer: &Normalizer,
) -> Result<(Vec<Application>, Vec<CrossAppCall>)> {
    if entries.len() < 2 {
        return Err(Error::PortfolioTooSmall(entries.len()));
    }
    let mut apps = Vec::new();
    let mut types = Vec::new();
    for (name, root) in entries {
        let (parsed, mut warnings) = parse_source_tree(root)?;
        let facts = resolve_calls(&parsed);
        let entities = parsed.iter().map(|t| t.entity.clone()).collect();
        let mut corpus = CorpusBundle::from_entities(entities, &facts, rules, normalizer)?;
        warnings.append(&mut corpus.warnings);
        corpus.warnings = warnings;
        apps.push(Application {
            name: name.clone(),
            corpus,
        });
        types.push(parsed);
    }
    let cross = discover_cross_app_calls(&types, &apps);
    Ok((apps, cross))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CodeEntity, MethodSig};
    use approx::assert_relative_eq;

    fn app(name: &str, classes: &[(&str, &str)]) -> Application {
        let entities = classes
            .iter()
            .enumerate()
            .map(|(i, (n, c))| {
                CodeEntity::new(i, *n, format!("{name}.core"))
                    .with_comment(*c)
                    .with_method(MethodSig::new("run", &[], "void"))
            })
            .collect();
        Application {
            name: name.into(),
            corpus: CorpusBundle::from_entities(entities, &[], &ScopingRules::empty(), &Normalizer::java_default())
                .unwrap(),
        }
    }

    #[test]
    fn one_app_is_too_small() {
        let a = app("a", &[("Foo", "foo")]);
        assert!(matches!(
            build_app_profiles(&[a], &[]),
            Err(Error::PortfolioTooSmall(1))
        ));
    }

    #[test]
    fn identical_apps_are_fully_similar() {
        let a = app(
            "a",
            &[("InvoiceService", "bills customers"), ("Shared", "common thing")],
        );
        let mut b = a.clone();
        b.name = "b".into();
        let c = app("c", &[("Shared", "common thing"), ("Radar", "tracks aircraft")]);
        let p = build_app_profiles(&[a, b, c], &[]).unwrap();
        assert_eq!(p.profiles[0].giant_text, p.profiles[1].giant_text);
        let s = app_similarity(&p, &AppFactors::default()).unwrap();
        assert_relative_eq!(s.textual.get(0, 1), 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.class_names.get(0, 1), 1.0, epsilon = 1e-12);
        assert_eq!(s.structural.get(0, 1), 0.0);
    }

    #[test]
    fn unique_token_only_weights_its_app() {
        let a = app("a", &[("Alpha", "ledger shared")]);
        let b = app("b", &[("Beta", "radar shared")]);
        let p = build_app_profiles(&[a, b], &[]).unwrap();
        let col = |t: &str| p.text_vocabulary.iter().position(|v| v == t).unwrap();
        assert!(p.profiles[0].giant_text.get(col("ledger")) > 0.0);
        assert_eq!(p.profiles[1].giant_text.get(col("ledger")), 0.0);
        assert_eq!(p.profiles[0].giant_text.get(col("share")), 0.0);
        let s = app_similarity(&p, &AppFactors::default()).unwrap();
        assert_eq!(s.combined.get(0, 1), 0.0);
    }

    #[test]
    fn default_factors_renormalize() {
        let f = AppFactors::default();
        assert_relative_eq!(f.textual, 0.2);
        assert_relative_eq!(f.class_name, 0.4);
        assert_relative_eq!(f.structural, 0.4);
    }

    #[test]
    fn cross_calls_feed_structural_similarity() {
        let a = app("a", &[("A1", "x")]);
        let b = app("b", &[("B1", "y")]);
        let c = app("c", &[("C1", "z")]);
        let call = |u, v, callee: &str| CrossAppCall {
            caller_app: u,
            callee_app: v,
            callee: callee.into(),
            method: "run".into(),
        };
        let p = build_app_profiles(&[a, b, c], &[call(0, 1, "b.core.B1"), call(2, 1, "b.core.B1")]).unwrap();
        let s = app_similarity(&p, &AppFactors::default()).unwrap();
        // each call is half of B1.run's fan-in; both pairs tie at the maximum
        assert_relative_eq!(s.structural.get(0, 1), 1.0);
        assert_relative_eq!(s.structural.get(1, 2), 1.0);
        assert_eq!(s.structural.get(0, 2), 0.0);
    }

    #[test]
    fn manifest_lines() {
        let m = parse_manifest(
            "# apps\nbilling=apps/billing\n\nlib/radar  # trailing\n",
            Path::new("/p"),
        )
        .unwrap();
        assert_eq!(
            m,
            [
                ("billing".to_string(), PathBuf::from("/p/apps/billing")),
                ("radar".to_string(), PathBuf::from("/p/lib/radar")),
            ]
        );
    }
}
