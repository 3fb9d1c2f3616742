use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_identifier, Normalizer, TokenBag};

/// Public method signature as declared in source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodSig {
    pub name: String,
    pub param_types: Vec<String>,
    pub return_type: String,
}

impl MethodSig {
    pub fn new(name: impl Into<String>, params: &[&str], ret: impl Into<String>) -> Self {
        MethodSig {
            name: name.into(),
            param_types: params.iter().map(|s| s.to_string()).collect(),
            return_type: ret.into(),
        }
    }

    /// `(T1,T2)R`, the form used by call-edge files.
    pub fn descriptor(&self) -> String {
        format!("({}){}", self.param_types.join(","), self.return_type)
    }
}

/// One analyzed class (or interface, enum, record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeEntity {
    pub id: usize,
    pub name: String,
    /// Dotted package declaration, empty for the default package.
    pub package: String,
    pub public_methods: Vec<MethodSig>,
    pub public_variables: Vec<String>,
    pub comments: Vec<String>,
    /// Extended and implemented type names as written, before closure.
    pub inheritance_raw: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<PathBuf>,
    #[serde(default)]
    pub line: usize,
}

impl CodeEntity {
    pub fn new(id: usize, name: impl Into<String>, package: impl Into<String>) -> Self {
        CodeEntity {
            id,
            name: name.into(),
            package: package.into(),
            public_methods: Vec::new(),
            public_variables: Vec::new(),
            comments: Vec::new(),
            inheritance_raw: BTreeSet::new(),
            source: None,
            line: 0,
        }
    }

    pub fn qualified_name(&self) -> String {
        if self.package.is_empty() {
            self.name.clone()
        } else {
            format!("{}.{}", self.package, self.name)
        }
    }

    pub fn has_public_method(&self, name: &str) -> bool {
        self.public_methods.iter().any(|m| m.name == name)
    }

    pub fn with_method(mut self, sig: MethodSig) -> Self {
        self.public_methods.push(sig);
        self
    }

    pub fn with_comment(mut self, c: impl Into<String>) -> Self {
        self.comments.push(c.into());
        self
    }

    pub fn with_variable(mut self, v: impl Into<String>) -> Self {
        self.public_variables.push(v.into());
        self
    }

    pub fn with_parent(mut self, p: impl Into<String>) -> Self {
        let p = p.into();
        if p != self.name {
            self.inheritance_raw.insert(p);
        }
        self
    }
}

/// IR tokens from all comment strings and public-variable identifiers.
pub fn extract_textual_features(e: &CodeEntity, normalizer: &Normalizer) -> TokenBag {
    let mut bag = TokenBag::new();
    for text in e.comments.iter().chain(e.public_variables.iter()) {
        bag.merge(&normalizer.text_to_bag(text));
    }
    bag
}

/// Concept words of a class or method name: split but neither stemmed nor
/// filtered.
pub fn extract_name_concepts(s: &str) -> Vec<String> {
    tokenize_identifier(s)
}

/// Package declaration split on `.` with each segment camel-split.
pub fn extract_package_path(packaging: &str) -> Vec<String> {
    packaging
        .split('.')
        .filter(|seg| !seg.is_empty())
        .flat_map(tokenize_identifier)
        .collect()
}

pub fn extract_inheritance_list(e: &CodeEntity) -> BTreeSet<String> {
    e.inheritance_raw.clone()
}

/// Derived per-entity features carried in the corpus bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityFeatures {
    pub tokens: TokenBag,
    pub class_concepts: Vec<String>,
    pub method_concepts: Vec<String>,
    pub package_path: Vec<String>,
}

impl EntityFeatures {
    pub fn extract(e: &CodeEntity, normalizer: &Normalizer) -> Self {
        EntityFeatures {
            tokens: extract_textual_features(e, normalizer),
            class_concepts: extract_name_concepts(&e.name),
            method_concepts: e
                .public_methods
                .iter()
                .flat_map(|m| extract_name_concepts(&m.name))
                .collect(),
            package_path: extract_package_path(&e.package),
        }
    }
}
