//! Separates the business layer from presentation, data-access, model and
//! utility classes before anything is clustered.
//!
//! Rules file format (`#` starts a comment, one `key = value` per line, list
//! values comma separated):
//!
//! ```text
//! defaults    = true                 # keep built-in package-segment heuristics
//! ui          = *.ui.*, *.swing.*    # globs over fully qualified class names
//! data_access = *.dao.*
//! models      = *.model.*
//! utils       = *.util.*
//! include     = com.acme.ui.Facade   # force into the business layer
//! exclude     = com.acme.Legacy      # force out (layer `other`)
//! ```
//!
//! Globs given for a layer replace that layer's built-in heuristic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use super::entity::CodeEntity;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Ui,
    DataAccess,
    Models,
    Utils,
    /// Explicitly excluded by name.
    Other,
}

impl Layer {
    pub const HEURISTIC: [Layer; 4] = [Layer::Ui, Layer::DataAccess, Layer::Models, Layer::Utils];

    fn key(self) -> &'static str {
        match self {
            Layer::Ui => "ui",
            Layer::DataAccess => "data_access",
            Layer::Models => "models",
            Layer::Utils => "utils",
            Layer::Other => "other",
        }
    }

    fn default_segments(self) -> &'static [&'static str] {
        match self {
            Layer::Ui => &["ui", "view", "web"],
            Layer::DataAccess => &["dao", "persistence", "repository"],
            Layer::Models => &["model", "dto", "entity"],
            Layer::Utils => &["util", "utils", "common", "helper"],
            Layer::Other => &[],
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone)]
enum LayerMatcher {
    Segments(Vec<String>),
    Globs { patterns: Vec<String>, set: GlobSet },
}

impl LayerMatcher {
    fn matches(&self, e: &CodeEntity) -> bool {
        match self {
            LayerMatcher::Segments(segs) => e
                .package
                .split('.')
                .any(|p| segs.iter().any(|s| s.eq_ignore_ascii_case(p))),
            LayerMatcher::Globs { set, .. } => set.is_match(e.qualified_name()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScopingRules {
    layers: BTreeMap<Layer, LayerMatcher>,
    include: BTreeSet<String>,
    exclude: BTreeSet<String>,
}

impl ScopingRules {
    /// No layer matchers: everything is business.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Built-in package-segment heuristics for the four technical layers.
    pub fn heuristics() -> Self {
        let mut rules = Self::default();
        for layer in Layer::HEURISTIC {
            rules.layers.insert(
                layer,
                LayerMatcher::Segments(layer.default_segments().iter().map(|s| s.to_string()).collect()),
            );
        }
        rules
    }

    /// Replaces a layer's matcher with fully-qualified-name globs.
    pub fn with_globs<S: AsRef<str>>(mut self, layer: Layer, patterns: &[S]) -> Result<Self> {
        let mut builder = GlobSetBuilder::new();
        let mut kept = Vec::new();
        for p in patterns {
            let p = p.as_ref().trim();
            if p.is_empty() {
                continue;
            }
            builder.add(Glob::new(p).map_err(|e| Error::Config(format!("bad glob `{p}`: {e}")))?);
            kept.push(p.to_string());
        }
        let set = builder
            .build()
            .map_err(|e| Error::Config(format!("bad glob set: {e}")))?;
        self.layers.insert(layer, LayerMatcher::Globs { patterns: kept, set });
        Ok(self)
    }

    pub fn with_include(mut self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if self.exclude.contains(&name) {
            return Err(Error::Config(format!("`{name}` is both included and excluded")));
        }
        self.include.insert(name);
        Ok(self)
    }

    pub fn with_exclude(mut self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if self.include.contains(&name) {
            return Err(Error::Config(format!("`{name}` is both included and excluded")));
        }
        self.exclude.insert(name);
        Ok(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut defaults = true;
        let mut globs: BTreeMap<Layer, Vec<String>> = BTreeMap::new();
        let mut include = Vec::new();
        let mut exclude = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "scoping rules line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            let values: Vec<String> = value
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            match key.trim() {
                "defaults" => {
                    defaults = match value.trim() {
                        "true" => true,
                        "false" => false,
                        other => {
                            return Err(Error::Config(format!(
                                "scoping rules line {}: `defaults` must be true or false, got `{other}`",
                                lineno + 1
                            )))
                        }
                    }
                }
                "ui" => globs.entry(Layer::Ui).or_default().extend(values),
                "data_access" | "da" => globs.entry(Layer::DataAccess).or_default().extend(values),
                "models" => globs.entry(Layer::Models).or_default().extend(values),
                "utils" => globs.entry(Layer::Utils).or_default().extend(values),
                "include" => include.extend(values),
                "exclude" => exclude.extend(values),
                other => {
                    return Err(Error::Config(format!(
                        "scoping rules line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let mut rules = if defaults { Self::heuristics() } else { Self::empty() };
        for (layer, patterns) in globs {
            rules = rules.with_globs(layer, &patterns)?;
        }
        for name in include {
            rules = rules.with_include(name)?;
        }
        for name in exclude {
            rules = rules.with_exclude(name)?;
        }
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn names_match(set: &BTreeSet<String>, e: &CodeEntity) -> bool {
        set.contains(&e.name) || set.contains(&e.qualified_name())
    }

    /// Layer an entity is scoped into, or `None` for the business layer.
    pub fn classify(&self, e: &CodeEntity) -> Option<Layer> {
        if Self::names_match(&self.include, e) {
            return None;
        }
        if Self::names_match(&self.exclude, e) {
            return Some(Layer::Other);
        }
        self.layers.iter().find(|(_, m)| m.matches(e)).map(|(&layer, _)| layer)
    }

    /// Human-readable description of the active matchers.
    pub fn describe(&self) -> BTreeMap<String, Vec<String>> {
        let mut out = BTreeMap::new();
        for (layer, m) in &self.layers {
            let v = match m {
                LayerMatcher::Segments(s) => s.iter().map(|s| format!("segment:{s}")).collect(),
                LayerMatcher::Globs { patterns, .. } => patterns.clone(),
            };
            out.insert(layer.to_string(), v);
        }
        if !self.include.is_empty() {
            out.insert("include".into(), self.include.iter().cloned().collect());
        }
        if !self.exclude.is_empty() {
            out.insert("exclude".into(), self.exclude.iter().cloned().collect());
        }
        out
    }
}

/// Result of scoping: business entities re-indexed densely, plus the
/// scoped-out entities per layer with their original ids.
#[derive(Debug, Clone)]
pub struct ScopedCorpus {
    pub business: Vec<CodeEntity>,
    /// `original_ids[new_id]` is the entity's id in the input list.
    pub original_ids: Vec<usize>,
    pub excluded: BTreeMap<Layer, Vec<CodeEntity>>,
}

pub fn scope_corpus(entities: Vec<CodeEntity>, rules: &ScopingRules) -> Result<ScopedCorpus> {
    if entities.is_empty() {
        return Err(Error::Ingest("no classes found in the corpus".into()));
    }
    let mut business = Vec::new();
    let mut original_ids = Vec::new();
    let mut excluded: BTreeMap<Layer, Vec<CodeEntity>> = BTreeMap::new();
    for e in entities {
        match rules.classify(&e) {
            None => {
                original_ids.push(e.id);
                let mut e = e;
                e.id = business.len();
                business.push(e);
            }
            Some(layer) => excluded.entry(layer).or_default().push(e),
        }
    }
    if business.is_empty() {
        return Err(Error::NothingToCluster);
    }
    Ok(ScopedCorpus {
        business,
        original_ids,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<CodeEntity> {
        vec![
            CodeEntity::new(0, "Button", "app.ui.widgets"),
            CodeEntity::new(1, "OrderService", "app.orders"),
            CodeEntity::new(2, "OrderDao", "app.dao"),
            CodeEntity::new(3, "Strings", "app.util"),
            CodeEntity::new(4, "Order", "app.model"),
        ]
    }

    #[test]
    fn glob_places_ui_class_in_ui_layer() {
        let rules = ScopingRules::empty().with_globs(Layer::Ui, &["*.ui.*"]).unwrap();
        let s = scope_corpus(corpus(), &rules).unwrap();
        assert_eq!(s.excluded[&Layer::Ui][0].name, "Button");
        assert_eq!(s.business.len(), 4);
        assert_eq!(s.original_ids, [1, 2, 3, 4]);
        assert!(s.business.iter().enumerate().all(|(i, e)| e.id == i));
    }

    #[test]
    fn empty_rules_keep_everything() {
        let s = scope_corpus(corpus(), &ScopingRules::empty()).unwrap();
        assert_eq!(s.business.len(), 5);
        assert!(s.excluded.is_empty());
    }

    #[test]
    fn excluding_everything_is_fatal() {
        let rules = ScopingRules::empty().with_globs(Layer::Utils, &["*"]).unwrap();
        assert!(matches!(scope_corpus(corpus(), &rules), Err(Error::NothingToCluster)));
    }

    #[test]
    fn heuristics_cover_four_layers_and_preserve_multiplicity() {
        let s = scope_corpus(corpus(), &ScopingRules::heuristics()).unwrap();
        assert_eq!(
            s.business.iter().map(|e| e.name.as_str()).collect::<Vec<_>>(),
            ["OrderService"]
        );
        let total: usize = s.business.len() + s.excluded.values().map(Vec::len).sum::<usize>();
        assert_eq!(total, 5);
        assert_eq!(s.excluded[&Layer::DataAccess][0].name, "OrderDao");
        assert_eq!(s.excluded[&Layer::Models][0].name, "Order");
    }

    #[test]
    fn rules_file_overrides_and_explicit_lists() {
        let text =
            "defaults = true\nui = *.widgets.*  # only widgets\ninclude = Strings\nexclude = app.orders.OrderService\n";
        let rules = ScopingRules::parse(text).unwrap();
        let mut entities = corpus();
        entities.push(CodeEntity::new(5, "Page", "app.ui"));
        let s = scope_corpus(entities, &rules).unwrap();
        let names: Vec<_> = s.business.iter().map(|e| e.name.as_str()).collect();
        // `ui` globs replaced the segment heuristic, so app.ui.Page stays.
        assert_eq!(names, ["Strings", "Page"]);
        assert_eq!(s.excluded[&Layer::Other][0].name, "OrderService");
        assert_eq!(s.excluded[&Layer::Ui][0].name, "Button");
    }

    #[test]
    fn include_and_exclude_must_be_disjoint() {
        assert!(ScopingRules::parse("include = A\nexclude = A").is_err());
        assert!(ScopingRules::parse("colour = blue").is_err());
    }
}
