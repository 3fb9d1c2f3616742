//! Tokenizes identifiers and ingests a source tree.
//!
//! `cargo run --example ingest [SOURCE_DIR]`

use std::path::PathBuf;

use archrecover::ingest::{ingest_directory, tokenize_identifier, Normalizer, ScopingRules};

fn main() -> archrecover::Result<()> {
    for id in ["parseHTTPResponse", "MAX_RETRY_COUNT", "getX2Value"] {
        println!("{id:>18} -> {:?}", tokenize_identifier(id));
    }

    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shop"));
    let normalizer = Normalizer::java_default();
    let corpus = ingest_directory(&root, &ScopingRules::heuristics(), None, &normalizer)?;
    println!(
        "\n{} business classes in {} packages",
        corpus.len(),
        corpus.package_count()
    );
    for (e, f) in corpus.entities.iter().zip(&corpus.features) {
        let concepts: Vec<&str> = f.class_concepts.iter().map(String::as_str).collect();
        println!("  {:<28} concepts {:?}", e.qualified_name(), concepts);
    }
    for (layer, names) in &corpus.excluded {
        println!("  scoped out as {layer:?}: {}", names.join(", "));
    }
    println!("{} call edges", corpus.dependencies.edges.len());
    Ok(())
}
