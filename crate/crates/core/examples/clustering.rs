//! Partition search on a synthetic graph with three planted groups.
//!
//! `cargo run --example clustering`

use archrecover::clustering::{search, Graph, SearchConfig, SeedContext, SeedStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> archrecover::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let group = |v: usize| v % 3;
    let noise: Vec<f64> = (0..12 * 12).map(|_| rng.random_range(0.0..0.1)).collect();
    let g = Graph::from_fn(12, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        if group(a) == group(b) {
            0.8
        } else {
            noise[a * 12 + b]
        }
    });

    let cfg = SearchConfig {
        strategies: SeedStrategy::GRAPH_ONLY.to_vec(),
        ..SearchConfig::default()
    };
    let result = search(&SeedContext::graph_only(&g), &cfg)?;
    for s in &result.seeds {
        println!(
            "{:>8}: seed MQC {:>7.3} -> {:>7.3} in {} iterations",
            s.strategy.name(),
            s.seed_quality.mqc,
            s.final_quality.mqc,
            s.iterations
        );
    }
    println!(
        "best from {}: {:?}",
        cfg.strategies[result.best_seed],
        result.best.clusters()
    );
    println!("MQ {:.4}, MQC {:.4}", result.report.mq, result.report.mqc);
    Ok(())
}
