//! Method-call dependency multigraph between business classes.
//!
//! Calls come either from the source scanner ([`resolve_calls`]) or from a
//! pre-extracted call-edge file, one call site per line:
//!
//! ```text
//! # caller <TAB> callee <TAB> method <TAB> signature
//! com.acme.Billing	com.acme.Ledger	record	(int,String)void
//! ```
//!
//! Class names may be simple or fully qualified. The signature column is
//! optional and uses `(ParamType,...)ReturnType`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::entity::{CodeEntity, MethodSig};
use super::java::ParsedType;
use super::scope::{Layer, ScopedCorpus};
use crate::error::{Error, Result};

/// One resolved call site before it is placed into the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallFact {
    pub caller: String,
    pub callee: String,
    pub method: String,
    pub signature: Option<(Vec<String>, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CallEdge {
    pub caller: usize,
    pub callee: usize,
    pub method: String,
    pub param_types: Vec<String>,
    pub return_type: String,
}

/// Directed multigraph over business entity ids. Parallel edges are kept,
/// one per call site.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DependencyGraph {
    pub node_count: usize,
    pub edges: Vec<CallEdge>,
}

impl DependencyGraph {
    pub fn new(node_count: usize) -> Self {
        DependencyGraph {
            node_count,
            edges: Vec::new(),
        }
    }

    /// Adds a call edge, enforcing the no-self-loop rule.
    pub fn add_call(&mut self, caller: usize, callee: usize, sig: &MethodSig) -> bool {
        if caller == callee || caller >= self.node_count || callee >= self.node_count {
            return false;
        }
        self.edges.push(CallEdge {
            caller,
            callee,
            method: sig.name.clone(),
            param_types: sig.param_types.clone(),
            return_type: sig.return_type.clone(),
        });
        true
    }
}

/// A business class calling into a scoped-out class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossLayerEdge {
    pub caller: usize,
    pub layer: Layer,
    pub callee: String,
    pub method: String,
}

#[derive(Debug, Clone, Default)]
pub struct DependencyBuild {
    pub graph: DependencyGraph,
    pub cross_layer: Vec<CrossLayerEdge>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Business(usize, &'a CodeEntity),
    Excluded(Layer, &'a CodeEntity),
}

struct NameIndex<'a> {
    by_qualified: HashMap<String, Target<'a>>,
    by_simple: HashMap<&'a str, Vec<Target<'a>>>,
}

impl<'a> NameIndex<'a> {
    fn new(corpus: &'a ScopedCorpus) -> Self {
        let mut by_qualified = HashMap::new();
        let mut by_simple: HashMap<&str, Vec<Target>> = HashMap::new();
        let all = corpus.business.iter().map(|e| Target::Business(e.id, e)).chain(
            corpus
                .excluded
                .iter()
                .flat_map(|(&l, es)| es.iter().map(move |e| Target::Excluded(l, e))),
        );
        for t in all {
            let e = match t {
                Target::Business(_, e) | Target::Excluded(_, e) => e,
            };
            by_qualified.entry(e.qualified_name()).or_insert(t);
            by_simple.entry(e.name.as_str()).or_default().push(t);
        }
        NameIndex {
            by_qualified,
            by_simple,
        }
    }

    fn get(&self, name: &str) -> Option<Target<'a>> {
        self.by_qualified
            .get(name)
            .copied()
            .or_else(|| self.by_simple.get(name).and_then(|v| v.first().copied()))
    }
}

fn pick_overload<'e>(e: &'e CodeEntity, fact: &CallFact) -> Option<&'e MethodSig> {
    let mut candidates = e.public_methods.iter().filter(|m| m.name == fact.method);
    let first = candidates.clone().next()?;
    if let Some((params, ret)) = &fact.signature {
        if let Some(exact) = candidates.find(|m| &m.param_types == params && &m.return_type == ret) {
            return Some(exact);
        }
    }
    Some(first)
}

/// Places call facts into the dependency graph of a scoped corpus. Calls
/// into scoped-out classes go to the cross-layer list; calls from
/// scoped-out classes are ignored.
pub fn build_dependency_graph(corpus: &ScopedCorpus, facts: &[CallFact]) -> DependencyBuild {
    let index = NameIndex::new(corpus);
    let mut out = DependencyBuild {
        graph: DependencyGraph::new(corpus.business.len()),
        ..Default::default()
    };
    for fact in facts {
        let caller = match index.get(&fact.caller) {
            Some(Target::Business(id, _)) => id,
            Some(Target::Excluded(..)) => continue,
            None => {
                out.warnings
                    .push(format!("unknown caller class `{}`, call skipped", fact.caller));
                continue;
            }
        };
        match index.get(&fact.callee) {
            Some(Target::Business(callee, e)) => {
                if callee == caller {
                    continue;
                }
                match pick_overload(e, fact) {
                    Some(sig) => {
                        let mut sig = sig.clone();
                        if let Some((params, ret)) = &fact.signature {
                            sig.param_types = params.clone();
                            sig.return_type = ret.clone();
                        }
                        out.graph.add_call(caller, callee, &sig);
                    }
                    None => out.warnings.push(format!(
                        "`{}` has no public method `{}`, call skipped",
                        fact.callee, fact.method
                    )),
                }
            }
            Some(Target::Excluded(layer, e)) => out.cross_layer.push(CrossLayerEdge {
                caller,
                layer,
                callee: e.qualified_name(),
                method: fact.method.clone(),
            }),
            None => out
                .warnings
                .push(format!("unknown callee class `{}`, call skipped", fact.callee)),
        }
    }
    out
}

/// Best-effort source-level resolution: a receiver resolves through the
/// caller's identifier table or as a class name (static call); the callee
/// must be one of the parsed types and declare a public method of that name.
pub fn resolve_calls(types: &[ParsedType]) -> Vec<CallFact> {
    let mut by_simple: BTreeMap<&str, Vec<&ParsedType>> = BTreeMap::new();
    for t in types {
        by_simple.entry(t.entity.name.as_str()).or_default().push(t);
    }
    // single-type imports shadow the caller's package, which shadows
    // on-demand imports
    let lookup = |caller: &ParsedType, name: &str| -> Option<&ParsedType> {
        let cands = by_simple.get(name)?;
        cands
            .iter()
            .find(|c| {
                let q = c.entity.qualified_name();
                caller.imports.iter().any(|imp| imp == &q)
            })
            .or_else(|| cands.iter().find(|c| c.entity.package == caller.entity.package))
            .or_else(|| {
                cands.iter().find(|c| {
                    caller
                        .imports
                        .iter()
                        .any(|imp| imp.strip_suffix(".*").is_some_and(|p| p == c.entity.package))
                })
            })
            .or_else(|| cands.first())
            .copied()
    };

    let mut facts = Vec::new();
    for caller in types {
        for site in &caller.call_sites {
            let type_name = caller
                .var_types
                .get(&site.receiver)
                .map(String::as_str)
                .unwrap_or(site.receiver.as_str());
            let Some(callee) = lookup(caller, type_name) else {
                continue;
            };
            let overloads: Vec<&MethodSig> = callee
                .entity
                .public_methods
                .iter()
                .filter(|m| m.name == site.method)
                .collect();
            let Some(&first) = overloads.first() else { continue };
            let sig = overloads
                .iter()
                .find(|m| m.param_types.len() == site.arg_count)
                .copied()
                .unwrap_or(first);
            facts.push(CallFact {
                caller: caller.entity.qualified_name(),
                callee: callee.entity.qualified_name(),
                method: site.method.clone(),
                signature: Some((sig.param_types.clone(), sig.return_type.clone())),
            });
        }
    }
    facts
}

/// Parses `(A,B<C,D>)R` into parameter types and return type.
pub fn parse_descriptor(s: &str) -> Option<(Vec<String>, String)> {
    let s = s.trim();
    let rest = s.strip_prefix('(')?;
    let mut depth = 0i32;
    let mut params = Vec::new();
    let mut cur = String::new();
    for (i, c) in rest.char_indices() {
        match c {
            '<' | '[' => {
                depth += 1;
                cur.push(c);
            }
            '>' | ']' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                params.push(cur.trim().to_string());
                cur.clear();
            }
            ')' if depth == 0 => {
                if !cur.trim().is_empty() {
                    params.push(cur.trim().to_string());
                }
                return Some((params, rest[i + 1..].trim().to_string()));
            }
            _ => cur.push(c),
        }
    }
    None
}

pub fn parse_call_edges(text: &str, path: &Path) -> Result<Vec<CallFact>> {
    let mut facts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 || cols.len() > 4 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected 3 or 4 tab-separated columns, got {}", cols.len()),
            });
        }
        let signature = match cols.get(3).map(|s| s.trim()).filter(|s| !s.is_empty()) {
            Some(sig) => Some(parse_descriptor(sig).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("malformed signature `{sig}`"),
            })?),
            None => None,
        };
        facts.push(CallFact {
            caller: cols[0].trim().to_string(),
            callee: cols[1].trim().to_string(),
            method: cols[2].trim().to_string(),
            signature,
        });
    }
    Ok(facts)
}

pub fn load_call_edges(path: &Path) -> Result<Vec<CallFact>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_call_edges(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::scope::{scope_corpus, ScopingRules};

    fn corpus() -> ScopedCorpus {
        let entities = vec![
            CodeEntity::new(0, "A", "app.core").with_method(MethodSig::new("run", &[], "void")),
            CodeEntity::new(1, "B", "app.core").with_method(MethodSig::new("m", &["int"], "String")),
            CodeEntity::new(2, "Panel", "app.ui").with_method(MethodSig::new("show", &[], "void")),
        ];
        scope_corpus(entities, &ScopingRules::heuristics()).unwrap()
    }

    fn fact(caller: &str, callee: &str, method: &str) -> CallFact {
        CallFact {
            caller: caller.into(),
            callee: callee.into(),
            method: method.into(),
            signature: None,
        }
    }

    #[test]
    fn one_edge_per_call_site() {
        let c = corpus();
        let b = build_dependency_graph(&c, &[fact("A", "B", "m"), fact("app.core.A", "B", "m")]);
        assert_eq!(b.graph.edges.len(), 2);
        assert!(b
            .graph
            .edges
            .iter()
            .all(|e| e.caller == 0 && e.callee == 1 && e.method == "m"));
        assert_eq!(b.graph.edges[0].param_types, ["int"]);
        assert!(b.warnings.is_empty());
    }

    #[test]
    fn explicit_import_beats_same_package() {
        use crate::ingest::java::parse_java;
        let mut types = parse_java(
            "package a; public class Ledger { public int total() { return 0; } }",
            None,
        );
        types.extend(parse_java(
            "package b; public class Ledger { public int total() { return 1; } }",
            None,
        ));
        types.extend(parse_java(
            "package b; import a.Ledger; public class Bridge { private Ledger l; public int f() { return l.total(); } }",
            None,
        ));
        let facts = resolve_calls(&types);
        assert_eq!(facts.len(), 1);
        assert_eq!(
            (facts[0].caller.as_str(), facts[0].callee.as_str()),
            ("b.Bridge", "a.Ledger")
        );
    }

    #[test]
    fn no_calls_gives_edgeless_graph() {
        let b = build_dependency_graph(&corpus(), &[]);
        assert!(b.graph.edges.is_empty());
        assert_eq!(b.graph.node_count, 2);
    }

    #[test]
    fn calls_into_excluded_layer_go_to_side_list() {
        let b = build_dependency_graph(&corpus(), &[fact("A", "Panel", "show")]);
        assert!(b.graph.edges.is_empty());
        assert_eq!(
            b.cross_layer,
            [CrossLayerEdge {
                caller: 0,
                layer: Layer::Ui,
                callee: "app.ui.Panel".into(),
                method: "show".into()
            }]
        );
    }

    #[test]
    fn unknown_classes_warn_and_self_calls_drop() {
        let b = build_dependency_graph(
            &corpus(),
            &[
                fact("A", "Ghost", "x"),
                fact("Ghost", "A", "run"),
                fact("A", "A", "run"),
                fact("A", "B", "nope"),
            ],
        );
        assert!(b.graph.edges.is_empty());
        assert_eq!(b.warnings.len(), 3);
    }

    #[test]
    fn call_edge_file_round_trip() {
        let text = "# header\nA\tB\tm\t(int)String\n\nA\tB\tm\n";
        let facts = parse_call_edges(text, Path::new("calls.tsv")).unwrap();
        assert_eq!(facts.len(), 2);
        assert_eq!(facts[0].signature, Some((vec!["int".into()], "String".into())));
        assert!(parse_call_edges("A\tB", Path::new("x")).is_err());
        assert_eq!(
            parse_descriptor("(Map<String,Integer>,int[])void"),
            Some((vec!["Map<String,Integer>".into(), "int[]".into()], "void".into()))
        );
        assert_eq!(parse_descriptor("()int"), Some((vec![], "int".into())));
    }
}
