//! Ranks classes against a text query and maps descriptions onto clusters.
//!
//! `cargo run --example retrieval [QUERY...]`

use std::path::PathBuf;

use archrecover::{run_pipeline, RunConfig};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let text = if args.is_empty() {
        "schedule process".to_string()
    } else {
        args.join(" ")
    };
    let out = tempfile::tempdir()?;
    let cfg = RunConfig {
        corpus: Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dispatch")),
        output: out.path().to_path_buf(),
        ..RunConfig::default()
    };
    let run = run_pipeline(&cfg)?;
    let analysis = &run.analysis;

    println!("query {text:?}");
    for r in &analysis.query(&text)?.top {
        println!(
            "  {:>5.2}  {:<12} vsm #{} centroid #{}",
            r.score, analysis.corpus.entities[r.class_id].name, r.vsm_rank, r.centroid_rank
        );
    }

    let descriptions = vec!["append audit records".to_string(), "retry with backoff".to_string()];
    let mapping = analysis.map_entities(&run.snapshot.architecture.partition_clusters(), &descriptions);
    println!("{}", serde_json::to_string_pretty(&mapping)?);
    Ok(())
}
