//! Clusters whole applications listed in a manifest.
//!
//! `cargo run --example portfolio [MANIFEST]`; by default the two test
//! fixtures form the portfolio.

use std::path::{Path, PathBuf};

use archrecover::clustering::SearchConfig;
use archrecover::ingest::{Normalizer, ScopingRules};
use archrecover::portfolio::{analyze_portfolio, ingest_portfolio, parse_manifest, AppFactors};

fn main() -> anyhow::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let (text, base) = match std::env::args().nth(1) {
        Some(p) => {
            let p = PathBuf::from(p);
            let base = p.parent().unwrap_or(Path::new(".")).to_path_buf();
            (std::fs::read_to_string(&p)?, base)
        }
        None => ("shop\ndispatch\n".to_string(), fixtures),
    };
    let entries = parse_manifest(&text, &base)?;
    let (apps, cross) = ingest_portfolio(&entries, &ScopingRules::heuristics(), &Normalizer::java_default())?;
    let report = analyze_portfolio(&apps, &cross, &AppFactors::default(), &SearchConfig::default())?;

    for a in &report.applications {
        println!("app {} {:<10} {} classes", a.app_id, a.name, a.classes);
    }
    println!("{} cross-application calls", report.cross_app_calls.len());
    if let Some(combined) = report.similarity.get("combined") {
        println!("combined similarity {combined:?}");
    }
    println!("clusters {:?} (MQC {:.3})", report.clusters, report.quality.mqc);
    Ok(())
}
