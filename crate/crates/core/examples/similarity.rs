//! Per-feature and combined similarity between the classes of a source tree.
//!
//! `cargo run --example similarity [SOURCE_DIR]`

use std::path::PathBuf;

use archrecover::ingest::{ingest_directory, Normalizer, ScopingRules};
use archrecover::similarity::suggest_significance_factors;
use archrecover::similarity::{FeatureRichness, SignificanceFactors, SimilarityModel, FEATURE_NAMES};

fn main() -> archrecover::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shop"));
    let corpus = ingest_directory(&root, &ScopingRules::heuristics(), None, &Normalizer::java_default())?;

    let suggested = suggest_significance_factors(&FeatureRichness::of_corpus(&corpus));
    println!("suggested factors {:?}", suggested.as_array());

    let model = SimilarityModel::build(&corpus, &SignificanceFactors::default())?;
    let names: Vec<&str> = corpus.entities.iter().map(|e| e.name.as_str()).collect();
    for (feature, m) in FEATURE_NAMES.iter().zip(&model.deltas.matrices) {
        let nonzero = m.triplets().iter().filter(|t| t.0 < t.1 && t.2 > 0.0).count();
        println!("{feature:>12}: {nonzero} related pairs");
    }
    println!("\ncombined similarity");
    print!("{:>18}", "");
    for n in &names {
        print!("{:>8.7}", n);
    }
    println!();
    for (i, n) in names.iter().enumerate() {
        print!("{n:>18}");
        for j in 0..names.len() {
            print!("{:>8.3}", model.combined.get(i, j));
        }
        println!();
    }
    Ok(())
}
