use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use archrecover::clustering::SeedStrategy;
use archrecover::config::{FactorChoice, RunConfig};
use archrecover::graphml::export_graphml;
use archrecover::ingest::{Normalizer, ScopingRules};
use archrecover::pipeline::{Analysis, ArchitectureSnapshot, SNAPSHOT_FILE};
use archrecover::portfolio::{analyze_portfolio, ingest_portfolio, parse_manifest, AppFactors};
use archrecover::retrieval::parse_descriptions;
use archrecover::service::{serve, ServiceState};
use archrecover::similarity::SignificanceFactors;
use archrecover::{run_pipeline, Error, Result};

#[derive(Parser)]
#[command(
    name = "archrecover",
    version,
    about = "Recover functional components from Java source"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a source tree, cluster it and write the analysis directory.
    Analyze(AnalyzeArgs),
    /// Write the interaction graph of a saved analysis as GraphML.
    ExportGraphml {
        /// Analysis directory or snapshot file.
        #[arg(long, default_value = "archrecover-out")]
        snapshot: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Serve a saved analysis over HTTP.
    Serve {
        #[arg(long, default_value = "archrecover-out")]
        analysis: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Rewrite snapshot.json after every reassignment.
        #[arg(long)]
        persist: bool,
    },
    /// Rank classes of a saved analysis against a text query.
    Query {
        #[arg(long, default_value = "archrecover-out")]
        analysis: PathBuf,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
        text: Vec<String>,
    },
    /// Map functional-entity descriptions onto clusters.
    MapEntities {
        #[arg(long, default_value = "archrecover-out")]
        analysis: PathBuf,
        /// File with one description per line.
        #[arg(long)]
        file: Option<PathBuf>,
        descriptions: Vec<String>,
    },
    /// Cluster the applications listed in a manifest.
    Portfolio(PortfolioArgs),
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scoping_rules: Option<PathBuf>,
    /// `auto` or six comma-separated factors.
    #[arg(long)]
    factors: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    /// Comma-separated seed strategies.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<SeedStrategy>>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    epsilon_stop: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    no_outlier_elimination: bool,
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    borderline_ratio: Option<f64>,
    #[arg(long)]
    label_count: Option<usize>,
    #[arg(long)]
    mapping_threshold: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    top: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Source tree root (overrides `corpus` in the config).
    corpus: Option<PathBuf>,
    #[arg(long)]
    call_edges: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct PortfolioArgs {
    manifest: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

fn parse_factors(s: &str) -> Result<FactorChoice> {
    if s == "auto" {
        return Ok(FactorChoice::Auto);
    }
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("--factors {s:?}: {e}")))?;
    let arr: [f64; 6] = vals
        .try_into()
        .map_err(|v: Vec<f64>| Error::Config(format!("--factors needs 6 values, got {}", v.len())))?;
    Ok(FactorChoice::Explicit(SignificanceFactors::from_array(arr)))
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        set!(
            temperature,
            cooling,
            strategies,
            rng_seed,
            epsilon_stop,
            max_iterations,
            borderline_ratio,
            label_count,
            mapping_threshold,
            alpha,
            beta,
            top,
            output
        );
        if let Some(p) = &self.scoping_rules {
            c.scoping_rules = Some(p.clone());
        }
        if let Some(f) = &self.factors {
            c.factors = parse_factors(f)?;
        }
        c.outlier_elimination &= !self.no_outlier_elimination;
        c.parallel &= !self.sequential;
        c.trace |= self.trace;
        c.validate()?;
        Ok(c)
    }
}

fn snapshot_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join(SNAPSHOT_FILE)
    } else {
        p.to_path_buf()
    }
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let mut cfg = args.overrides.resolve()?;
    if args.corpus.is_some() {
        cfg.corpus = args.corpus;
    }
    if args.call_edges.is_some() {
        cfg.call_edges = args.call_edges;
    }
    let out = run_pipeline(&cfg)?;
    let a = &out.snapshot.architecture;
    println!(
        "{} classes in {} clusters, MQ {:.4}, MQC {:.4}",
        out.analysis.corpus.len(),
        a.clusters.len(),
        a.quality.mq,
        a.quality.mqc
    );
    for (c, l) in a.clusters.iter().zip(&a.labels) {
        println!("  [{}] {}: {}", c.id, l.text(), c.names.join(", "));
    }
    println!(
        "{} borderline classes; wrote {}",
        a.borderline.entries.len(),
        out.output_dir.display()
    );
    Ok(())
}

fn portfolio(args: PortfolioArgs) -> Result<()> {
    let cfg = args.overrides.resolve()?;
    let text = std::fs::read_to_string(&args.manifest).map_err(|e| Error::Io {
        path: args.manifest.clone(),
        source: e,
    })?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&text, base)?;
    let rules = match &cfg.scoping_rules {
        Some(p) => ScopingRules::load(p)?,
        None => ScopingRules::heuristics(),
    };
    let (apps, cross) = ingest_portfolio(&entries, &rules, &Normalizer::java_default())?;
    let factors = match cfg.factors {
        FactorChoice::Explicit(f) => AppFactors::from_significance(&f)?,
        FactorChoice::Auto => AppFactors::default(),
    };
    let report = analyze_portfolio(&apps, &cross, &factors, &cfg.search())?;
    std::fs::create_dir_all(&cfg.output).map_err(|e| Error::Io {
        path: cfg.output.clone(),
        source: e,
    })?;
    let path = cfg.output.join("portfolio.json");
    std::fs::write(&path, serde_json::to_string_pretty(&report)?).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    for (i, c) in report.clusters.iter().enumerate() {
        let names: Vec<&str> = c.iter().map(|&a| report.applications[a].name.as_str()).collect();
        println!("  [{i}] {}", names.join(", "));
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Portfolio(p) => portfolio(p),
        Command::ExportGraphml { snapshot, out } => {
            let s = ArchitectureSnapshot::load(&snapshot_path(&snapshot))?;
            export_graphml(&s.architecture.interactions, &s.architecture.labels, &out)
        }
        Command::Serve {
            analysis,
            bind,
            persist,
        } => {
            let (a, s) = Analysis::open(&analysis)?;
            let state = ServiceState::new(a, s, persist.then(|| analysis.join(SNAPSHOT_FILE)));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::Internal(e.to_string()))?;
            rt.block_on(serve(state, bind))
        }
        Command::Query { analysis, json, text } => {
            let (a, _) = Analysis::open(&analysis)?;
            let r = a.query(&text.join(" "))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                for f in &r.top {
                    println!(
                        "{:>8.2}  {} (vsm #{}, centroid #{})",
                        f.score, a.corpus.entities[f.class_id].name, f.vsm_rank, f.centroid_rank
                    );
                }
            }
            Ok(())
        }
        Command::MapEntities {
            analysis,
            file,
            mut descriptions,
        } => {
            if let Some(f) = file {
                let text = std::fs::read_to_string(&f).map_err(|e| Error::Io {
                    path: f.clone(),
                    source: e,
                })?;
                descriptions.extend(parse_descriptions(&text));
            }
            let (a, s) = Analysis::open(&analysis)?;
            let m = a.map_entities(&s.architecture.partition_clusters(), &descriptions);
            println!("{}", serde_json::to_string_pretty(&m)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
