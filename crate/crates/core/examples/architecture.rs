//! Runs the whole pipeline and prints the recovered architecture.
//!
//! `cargo run --example architecture [SOURCE_DIR]`

use std::path::PathBuf;

use archrecover::{run_pipeline, RunConfig};

fn main() -> anyhow::Result<()> {
    let corpus = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shop"));
    let out = tempfile::tempdir()?;
    let cfg = RunConfig {
        corpus: Some(corpus),
        output: out.path().to_path_buf(),
        ..RunConfig::default()
    };
    let a = run_pipeline(&cfg)?.snapshot.architecture;

    for (c, l) in a.clusters.iter().zip(&a.labels) {
        println!("cluster {} \"{}\": {}", c.id, l.text(), c.names.join(", "));
    }
    for i in &a.interfaces {
        let ms: Vec<String> = i
            .methods
            .iter()
            .map(|m| format!("{}.{}", m.owner_name, m.method))
            .collect();
        println!("interface of {}: {}", i.cluster_id, ms.join(", "));
    }
    for e in &a.interactions.edges {
        println!(
            "{} provides {} method(s) to {}",
            e.provider,
            e.methods.len(),
            e.consumer
        );
    }
    for u in &a.cross_layer {
        for (layer, classes) in &u.layers {
            println!("cluster {} uses {layer:?}: {}", u.cluster_id, classes.join(", "));
        }
    }
    for (depth, level) in a.hierarchy.levels.iter().enumerate() {
        println!("hierarchy level {depth}: {:?}", level.members);
    }
    Ok(())
}
