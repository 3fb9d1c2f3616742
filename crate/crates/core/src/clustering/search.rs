use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anneal::{AnnealingState, DEFAULT_COOLING, DEFAULT_TEMPERATURE};
use super::climb::{climb_hill, GAIN_EPSILON};
use super::graph::Graph;
use super::partition::{Partition, QualityReport};
use super::seeds::{generate_seed, SeedContext, SeedStrategy};
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON_STOP: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct SearchConfig {
    pub strategies: Vec<SeedStrategy>,
    pub rng_seed: u64,
    pub temperature: f64,
    pub cooling: f64,
    pub epsilon_stop: f64,
    /// Cap on climbing steps per seed.
    pub max_iterations: usize,
    /// Run seeds on the rayon pool. Results do not depend on this.
    #[serde(skip)]
    pub parallel: bool,
    /// Keep one [`TraceLine`] per climbing step.
    #[serde(skip)]
    pub trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategies: SeedStrategy::ALL.to_vec(),
            rng_seed: 0,
            temperature: DEFAULT_TEMPERATURE,
            cooling: DEFAULT_COOLING,
            epsilon_stop: DEFAULT_EPSILON_STOP,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            parallel: true,
            trace: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one seed strategy is required".into()));
        }
        AnnealingState::new(self.temperature, self.cooling)?;
        if !(self.epsilon_stop.is_finite() && self.epsilon_stop > 0.0) {
            return Err(Error::Config(format!(
                "epsilon_stop must be positive, got {}",
                self.epsilon_stop
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// One climbing step of one seed. `Display` gives the stable trace format:
///
/// ```text
/// seed=2 strategy=random iter=5 mq=1.500000 mqc=4.000000 temp=343.000000 sn=false
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceLine {
    pub seed: usize,
    pub strategy: SeedStrategy,
    pub iteration: usize,
    pub mq: f64,
    pub mqc: f64,
    pub temp: f64,
    pub sn_tag: bool,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} strategy={} iter={} mq={:.6} mqc={:.6} temp={:.6} sn={}",
            self.seed, self.strategy, self.iteration, self.mq, self.mqc, self.temp, self.sn_tag
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InitiationReport {
    pub density: f64,
    pub flagged: Vec<bool>,
    /// Seed judged already near optimal; it is not climbed.
    pub marked: Option<usize>,
}

/// Flags seeds whose `2·MQ − diff − iso` exceeds their cluster count and,
/// on a dense graph, marks the flagged seed with the highest MQ.
pub fn initiation_test(seeds: &[Partition], g: &Graph) -> InitiationReport {
    let density = g.density();
    let flagged: Vec<bool> = seeds
        .iter()
        .map(|p| {
            let q = p.quality();
            q.mqc_without_count() > q.cluster_count as f64
        })
        .collect();
    let dense = density > 0.5 * g.pair_count() as f64;
    let marked = if dense {
        flagged
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if seeds[b].mq() >= seeds[i].mq() => Some(b),
                _ => Some(i),
            })
    } else {
        None
    };
    InitiationReport {
        density,
        flagged,
        marked,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeedOutcome {
    pub strategy: SeedStrategy,
    pub seed_quality: QualityReport,
    pub final_quality: QualityReport,
    pub iterations: usize,
    /// Returned without climbing because `MQC − |P|` was within ε of zero.
    pub early_return: bool,
    pub marked: bool,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Partition,
    pub report: QualityReport,
    pub best_seed: usize,
    pub seeds: Vec<SeedOutcome>,
    pub initiation: InitiationReport,
    pub trace: Vec<TraceLine>,
}

fn seed_rng(base: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct Climbed {
    best: Partition,
    iterations: usize,
    early_return: bool,
    trace: Vec<TraceLine>,
}

fn climb_seed(
    seed: Partition,
    g: &Graph,
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
    index: usize,
    strategy: SeedStrategy,
) -> Climbed {
    let mut state = AnnealingState {
        temp: cfg.temperature,
        cooling: cfg.cooling,
        sn_tag: false,
    };
    let mut p = seed;
    let mut mq_old = -(g.len() as f64);
    let mut mq_new = p.mqc();
    if (mq_new - (p.len() as f64)).abs() < cfg.epsilon_stop {
        return Climbed {
            best: p,
            iterations: 0,
            early_return: true,
            trace: Vec::new(),
        };
    }
    let mut best = p.clone();
    let mut best_val = mq_new;
    let mut trace = Vec::new();
    let mut iterations = 0;
    while (mq_new > mq_old + GAIN_EPSILON || state.sn_tag) && iterations < cfg.max_iterations {
        mq_old = mq_new;
        state.sn_tag = false;
        climb_hill(&mut p, g, &mut state, rng);
        mq_new = p.mqc();
        iterations += 1;
        if mq_new > best_val + GAIN_EPSILON {
            best = p.clone();
            best_val = mq_new;
        }
        if cfg.trace {
            trace.push(TraceLine {
                seed: index,
                strategy,
                iteration: iterations,
                mq: p.mq(),
                mqc: mq_new,
                temp: state.temp,
                sn_tag: state.sn_tag,
            });
        }
    }
    Climbed {
        best,
        iterations,
        early_return: false,
        trace,
    }
}

/// Builds every configured seed, runs the initiation test, climbs each
/// unmarked seed and returns the partition with the highest MQC (lowest seed
/// index on ties).
pub fn search(ctx: &SeedContext<'_>, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let g = ctx.graph;
    if g.is_empty() {
        return Err(Error::NothingToCluster);
    }
    let mut rngs: Vec<ChaCha8Rng> = (0..cfg.strategies.len()).map(|i| seed_rng(cfg.rng_seed, i)).collect();
    let seeds: Vec<Partition> = cfg
        .strategies
        .iter()
        .zip(rngs.iter_mut())
        .map(|(&s, rng)| generate_seed(s, ctx, rng))
        .collect();
    let initiation = initiation_test(&seeds, g);

    let jobs: Vec<(usize, Partition, ChaCha8Rng)> = seeds
        .iter()
        .cloned()
        .zip(rngs)
        .enumerate()
        .map(|(i, (p, r))| (i, p, r))
        .collect();
    let run = |(i, p, mut rng): (usize, Partition, ChaCha8Rng)| {
        if initiation.marked == Some(i) {
            Climbed {
                best: p,
                iterations: 0,
                early_return: false,
                trace: Vec::new(),
            }
        } else {
            climb_seed(p, g, cfg, &mut rng, i, cfg.strategies[i])
        }
    };
    let climbed: Vec<Climbed> = if cfg.parallel {
        jobs.into_par_iter().map(run).collect()
    } else {
        jobs.into_iter().map(run).collect()
    };

    let mut outcomes = Vec::with_capacity(climbed.len());
    let mut trace = Vec::new();
    let mut best_idx = 0;
    for (i, c) in climbed.iter().enumerate() {
        outcomes.push(SeedOutcome {
            strategy: cfg.strategies[i],
            seed_quality: seeds[i].quality(),
            final_quality: c.best.quality(),
            iterations: c.iterations,
            early_return: c.early_return,
            marked: initiation.marked == Some(i),
        });
        trace.extend(c.trace.iter().cloned());
        if c.best.mqc() > climbed[best_idx].best.mqc() + GAIN_EPSILON {
            best_idx = i;
        }
    }
    let best = climbed[best_idx].best.canonical(g);
    Ok(SearchResult {
        report: best.quality(),
        best,
        best_seed: best_idx,
        seeds: outcomes,
        initiation,
        trace,
    })
}
