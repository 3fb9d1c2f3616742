//! Run configuration: defaults, TOML loading, validation and fingerprint.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::architecture::{ArchitectureOptions, DEFAULT_BORDERLINE_RATIO, DEFAULT_LABEL_COUNT};
use crate::clustering::{
    SearchConfig, SeedStrategy, DEFAULT_COOLING, DEFAULT_EPSILON_STOP, DEFAULT_MAX_ITERATIONS, DEFAULT_TEMPERATURE,
};
use crate::error::{Error, Result};
use crate::retrieval::{QueryParams, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MAPPING_THRESHOLD, DEFAULT_TOP};
use crate::similarity::SignificanceFactors;

/// Significance factors, given explicitly or derived from the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFactors", into = "RawFactors")]
pub enum FactorChoice {
    Auto,
    Explicit(SignificanceFactors),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawFactors {
    Word(String),
    Table(SignificanceFactors),
}

impl TryFrom<RawFactors> for FactorChoice {
    type Error = String;

    fn try_from(r: RawFactors) -> std::result::Result<Self, String> {
        match r {
            RawFactors::Word(w) if w == "auto" => Ok(FactorChoice::Auto),
            RawFactors::Word(w) => Err(format!("expected \"auto\" or a factor table, got {w:?}")),
            RawFactors::Table(f) => Ok(FactorChoice::Explicit(f)),
        }
    }
}

impl From<FactorChoice> for RawFactors {
    fn from(f: FactorChoice) -> Self {
        match f {
            FactorChoice::Auto => RawFactors::Word("auto".into()),
            FactorChoice::Explicit(f) => RawFactors::Table(f),
        }
    }
}

impl Default for FactorChoice {
    fn default() -> Self {
        FactorChoice::Explicit(SignificanceFactors::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root of the Java source tree.
    pub corpus: Option<PathBuf>,
    /// Pre-extracted call edges replacing source-level call resolution.
    pub call_edges: Option<PathBuf>,
    pub scoping_rules: Option<PathBuf>,
    pub factors: FactorChoice,
    pub temperature: f64,
    pub cooling: f64,
    pub strategies: Vec<SeedStrategy>,
    pub rng_seed: u64,
    pub epsilon_stop: f64,
    pub max_iterations: usize,
    pub outlier_elimination: bool,
    pub parallel: bool,
    /// Write the per-step search trace next to the snapshot.
    pub trace: bool,
    pub borderline_ratio: f64,
    pub label_count: usize,
    pub mapping_threshold: f64,
    pub alpha: f64,
    pub beta: f64,
    pub top: usize,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            call_edges: None,
            scoping_rules: None,
            factors: FactorChoice::default(),
            temperature: DEFAULT_TEMPERATURE,
            cooling: DEFAULT_COOLING,
            strategies: SeedStrategy::ALL.to_vec(),
            rng_seed: 0,
            epsilon_stop: DEFAULT_EPSILON_STOP,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            outlier_elimination: true,
            parallel: true,
            trace: false,
            borderline_ratio: DEFAULT_BORDERLINE_RATIO,
            label_count: DEFAULT_LABEL_COUNT,
            mapping_threshold: DEFAULT_MAPPING_THRESHOLD,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            top: DEFAULT_TOP,
            output: PathBuf::from("archrecover-out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            strategies: self.strategies.clone(),
            rng_seed: self.rng_seed,
            temperature: self.temperature,
            cooling: self.cooling,
            epsilon_stop: self.epsilon_stop,
            max_iterations: self.max_iterations,
            parallel: self.parallel,
            trace: self.trace,
        }
    }

    pub fn architecture(&self) -> ArchitectureOptions {
        ArchitectureOptions {
            borderline_ratio: self.borderline_ratio,
            label_count: self.label_count,
            hierarchy: SearchConfig {
                trace: false,
                ..self.search()
            },
        }
    }

    pub fn query(&self) -> QueryParams {
        QueryParams {
            alpha: self.alpha,
            beta: self.beta,
            depth: None,
            top: self.top,
        }
    }

    /// Checks every knob before any work starts.
    pub fn validate(&self) -> Result<()> {
        if let FactorChoice::Explicit(f) = &self.factors {
            f.validate()?;
        }
        self.search().validate()?;
        self.architecture().validate()?;
        self.query().validate()?;
        if !(self.mapping_threshold.is_finite() && self.mapping_threshold >= 0.0) {
            return Err(Error::Config(format!(
                "mapping threshold must be nonnegative, got {}",
                self.mapping_threshold
            )));
        }
        if self.top == 0 {
            return Err(Error::Config("top must be at least 1".into()));
        }
        Ok(())
    }

    /// SHA-256 over every setting that can change the analysis result. The
    /// output directory and the parallelism switch are left out.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.output = PathBuf::new();
        c.parallel = true;
        c.trace = false;
        let json = serde_json::to_vec(&c).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_overrides_defaults() {
        let c = RunConfig::from_toml(
            r#"
            corpus = "src"
            factors = "auto"
            rng-seed = 7
            strategies = ["cc", "random"]
            "#,
        )
        .unwrap();
        assert_eq!(c.factors, FactorChoice::Auto);
        assert_eq!(c.rng_seed, 7);
        assert_eq!(c.strategies, [SeedStrategy::Cc, SeedStrategy::Random]);
        assert_eq!(c.cooling, DEFAULT_COOLING);
    }

    #[test]
    fn explicit_factor_table() {
        let c = RunConfig::from_toml(
            "[factors]\ntextual = 0.5\nclassName = 0.5\nmethodName = 0\npackaging = 0\ninheritance = 0\nstructural = 0\n",
        )
        .unwrap();
        assert!(matches!(c.factors, FactorChoice::Explicit(f) if f.textual == 0.5));
    }

    #[test]
    fn bad_factor_sum_echoes_values() {
        let c = RunConfig {
            factors: FactorChoice::Explicit(SignificanceFactors::from_array([0.1, 0.2, 0.1, 0.2, 0.2, 0.1])),
            ..RunConfig::default()
        };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("0.9") || msg.contains("0.1"), "{msg}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(RunConfig::from_toml("tempreature = 3"), Err(Error::Config(_))));
    }

    #[test]
    fn fingerprint_ignores_output_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output = "elsewhere".into();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.rng_seed = 1;
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }
}
