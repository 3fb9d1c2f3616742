//! GraphML export of the interaction graph.

use std::fmt::Write as _;
use std::path::Path;

use crate::architecture::{ClusterLabel, InteractionGraph};
use crate::error::{Error, Result};

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Deterministic GraphML: node `c{id}` per cluster with its id and label,
/// edge `provider → consumer` per interaction whose `methods` attribute
/// joins `Owner.method` entries with `;`.
pub fn to_graphml(ig: &InteractionGraph, labels: &[ClusterLabel]) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    s.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"int\"/>\n");
    s.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    s.push_str("  <key id=\"methods\" for=\"edge\" attr.name=\"methods\" attr.type=\"string\"/>\n");
    s.push_str("  <graph id=\"interactions\" edgedefault=\"directed\">\n");
    for &n in &ig.nodes {
        let label = labels
            .iter()
            .find(|l| l.cluster_id == n)
            .map(ClusterLabel::text)
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "    <node id=\"c{n}\">\n      <data key=\"cluster\">{n}</data>\n      <data key=\"label\">{}</data>\n    </node>",
            escape(&label)
        );
    }
    for (i, e) in ig.edges.iter().enumerate() {
        let mut names: Vec<String> = e.methods.iter().map(|m| m.qualified()).collect();
        names.dedup();
        let _ = writeln!(
            s,
            "    <edge id=\"e{i}\" source=\"c{}\" target=\"c{}\">\n      <data key=\"methods\">{}</data>\n    </edge>",
            e.provider,
            e.consumer,
            escape(&names.join(";"))
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn export_graphml(ig: &InteractionGraph, labels: &[ClusterLabel], path: &Path) -> Result<()> {
    std::fs::write(path, to_graphml(ig, labels)).map_err(|e| Error::io(path, e))
}
