//! Experiment configuration: a flat `key = value` text file in which every
//! key can also be supplied (and overridden) by a command-line flag of the
//! same name. Lists are comma-separated. Precedence: built-in defaults,
//! then the config file, then flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use termweight::corpus::Stopwords;
use termweight::ltw::{parse_scheme_name, LtwConfig};
use termweight::weighting::WeightingScheme;
use termweight::LearnerKind;

/// How the corpus path is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One delimited file (or, with a named split, a directory holding
    /// `train.tsv` and `test.tsv`): id TAB comma-separated-labels TAB text.
    Tsv,
    /// A directory of labeled text files (or `train/` and `test/` subtrees).
    Dir,
}

impl CorpusFormat {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(CorpusFormat::Tsv),
            "dir" => Ok(CorpusFormat::Dir),
            other => bail!("unknown corpus format {other:?} (expected tsv or dir)"),
        }
    }
}

/// Train/test split policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPolicy {
    /// The corpus ships pre-split (train/test files or directories).
    Named,
    /// Single corpus, split by a seeded deterministic draw.
    Fraction,
}

impl SplitPolicy {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "named" => Ok(SplitPolicy::Named),
            "fraction" => Ok(SplitPolicy::Fraction),
            other => bail!("unknown split policy {other:?} (expected named or fraction)"),
        }
    }
}

/// Which sample pairing the significance table uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificancePairing {
    /// One test per (learner, scheme pair); samples are per-class F1 values.
    PerClass,
    /// One test per scheme pair; samples are per-(class, learner) F1 values
    /// pooled across learners.
    Pooled,
}

impl SignificancePairing {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "per-class" => Ok(SignificancePairing::PerClass),
            "pooled" => Ok(SignificancePairing::Pooled),
            other => bail!("unknown significance pairing {other:?} (expected per-class or pooled)"),
        }
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub format: CorpusFormat,
    pub split: SplitPolicy,
    pub train_fraction: f64,
    pub dataset: String,
    /// "english", "none", or a path to a one-word-per-line file.
    pub stopwords: String,
    /// Per-class chi-square feature selection keeps `ceil(ratio * F)` terms;
    /// 1.0 disables selection.
    pub select_ratio: f64,
    pub schemes: Vec<String>,
    pub learners: Vec<LearnerKind>,
    pub repetitions: u64,
    pub seed: u64,
    pub output: PathBuf,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    pub significance_pairing: SignificancePairing,
    pub surface_resolution: usize,
    pub surface_prior: f64,
    pub surface_docs: f64,
    pub ltw: LtwOverrides,
}

/// Optional overrides applied on top of the per-scheme training defaults.
#[derive(Debug, Clone, Default)]
pub struct LtwOverrides {
    pub hidden_local: Option<usize>,
    pub hidden_global_cap: Option<usize>,
    pub hidden_dd: Option<usize>,
    pub dropout: Option<f64>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub max_steps: Option<usize>,
    pub validation_every: Option<usize>,
    pub patience: Option<usize>,
    pub min_delta: Option<f64>,
    pub validation_fraction: Option<f64>,
}

impl LtwOverrides {
    pub fn apply(&self, mut config: LtwConfig) -> LtwConfig {
        if let Some(v) = self.hidden_local {
            config.hidden_local = v;
        }
        if let Some(v) = self.hidden_global_cap {
            config.hidden_global_cap = v;
        }
        if let Some(v) = self.hidden_dd {
            config.hidden_dd = v;
        }
        if let Some(v) = self.dropout {
            config.dropout = v;
        }
        if let Some(v) = self.learning_rate {
            config.learning_rate = v;
        }
        if let Some(v) = self.batch_size {
            config.batch_size = v;
        }
        if let Some(v) = self.max_steps {
            config.max_steps = v;
        }
        if let Some(v) = self.validation_every {
            config.validation_every = v;
        }
        if let Some(v) = self.patience {
            config.patience = v;
        }
        if let Some(v) = self.min_delta {
            config.min_delta = v;
        }
        if let Some(v) = self.validation_fraction {
            config.validation_fraction = v;
        }
        config
    }
}

/// The raw option set as it arrives from a file or from flags: every field
/// optional, merged with `overlay`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "corpus",
    "format",
    "split",
    "train_fraction",
    "dataset",
    "stopwords",
    "select_ratio",
    "schemes",
    "learners",
    "repetitions",
    "seed",
    "output",
    "workers",
    "significance_pairing",
    "surface_resolution",
    "surface_prior",
    "surface_docs",
    "ltw_hidden_local",
    "ltw_hidden_global_cap",
    "ltw_hidden_dd",
    "ltw_dropout",
    "ltw_learning_rate",
    "ltw_batch_size",
    "ltw_max_steps",
    "ltw_validation_every",
    "ltw_patience",
    "ltw_min_delta",
    "ltw_validation_fraction",
];

impl RawConfig {
    /// Parse the flat `key = value` format. `#` starts a comment; blank
    /// lines are ignored; keys must be known.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("{}:{}: unknown config key {key:?}", path.display(), lineno + 1);
            }
            entries.insert(key.to_owned(), value.trim().to_owned());
        }
        Ok(RawConfig { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_owned(), value.into());
    }

    /// Later sources win key by key.
    pub fn overlay(mut self, later: RawConfig) -> RawConfig {
        self.entries.extend(later.entries);
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}: invalid value {v:?}: {e}")),
        }
    }

    /// Resolve to a validated [`ExperimentConfig`].
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let corpus: PathBuf = self
            .get("corpus")
            .ok_or_else(|| anyhow!("config key corpus is required"))?
            .into();
        let output: PathBuf = self
            .get("output")
            .ok_or_else(|| anyhow!("config key output is required"))?
            .into();
        let format = match self.get("format") {
            Some(v) => CorpusFormat::parse(v)?,
            None => CorpusFormat::Tsv,
        };
        let split = match self.get("split") {
            Some(v) => SplitPolicy::parse(v)?,
            None => SplitPolicy::Fraction,
        };
        let significance_pairing = match self.get("significance_pairing") {
            Some(v) => SignificancePairing::parse(v)?,
            None => SignificancePairing::PerClass,
        };
        let dataset = match self.get("dataset") {
            Some(v) => v.to_owned(),
            None => corpus
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".to_owned()),
        };
        let schemes: Vec<String> = split_list(self.get("schemes").unwrap_or("LogTFIDF"));
        if schemes.is_empty() {
            bail!("config key schemes must name at least one weighting scheme");
        }
        for name in &schemes {
            if WeightingScheme::from_name(name).is_none() && parse_scheme_name(name).is_none() {
                bail!("unknown weighting scheme {name:?}");
            }
        }
        let mut learners = Vec::new();
        for name in split_list(self.get("learners").unwrap_or("LR")) {
            learners.push(
                LearnerKind::from_name(&name).ok_or_else(|| anyhow!("unknown learner {name:?}"))?,
            );
        }
        if learners.is_empty() {
            bail!("config key learners must name at least one learner");
        }

        let config = ExperimentConfig {
            corpus,
            format,
            split,
            train_fraction: self.parse("train_fraction")?.unwrap_or(0.7),
            dataset,
            stopwords: self.get("stopwords").unwrap_or("english").to_owned(),
            select_ratio: self.parse("select_ratio")?.unwrap_or(0.1),
            schemes,
            learners,
            repetitions: self.parse("repetitions")?.unwrap_or(10),
            seed: self.parse("seed")?.unwrap_or(0),
            output,
            workers: self.parse("workers")?.unwrap_or(0),
            significance_pairing,
            surface_resolution: self.parse("surface_resolution")?.unwrap_or(101),
            surface_prior: self.parse("surface_prior")?.unwrap_or(0.05),
            surface_docs: self.parse("surface_docs")?.unwrap_or(1000.0),
            ltw: LtwOverrides {
                hidden_local: self.parse("ltw_hidden_local")?,
                hidden_global_cap: self.parse("ltw_hidden_global_cap")?,
                hidden_dd: self.parse("ltw_hidden_dd")?,
                dropout: self.parse("ltw_dropout")?,
                learning_rate: self.parse("ltw_learning_rate")?,
                batch_size: self.parse("ltw_batch_size")?,
                max_steps: self.parse("ltw_max_steps")?,
                validation_every: self.parse("ltw_validation_every")?,
                patience: self.parse("ltw_patience")?,
                min_delta: self.parse("ltw_min_delta")?,
                validation_fraction: self.parse("ltw_validation_fraction")?,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

fn split_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            bail!("repetitions must be at least 1");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            bail!("train_fraction must lie strictly between 0 and 1");
        }
        if !(self.select_ratio > 0.0 && self.select_ratio <= 1.0) {
            bail!("select_ratio must lie in (0, 1]");
        }
        if self.surface_resolution < 2 {
            bail!("surface_resolution needs at least 2 points per axis");
        }
        if !(self.surface_prior > 0.0 && self.surface_prior < 1.0) {
            bail!("surface_prior must lie strictly between 0 and 1");
        }
        if self.surface_docs <= 0.0 {
            bail!("surface_docs must be positive");
        }
        Ok(())
    }

    pub fn load_stopwords(&self) -> Result<Stopwords> {
        match self.stopwords.as_str() {
            "english" => Ok(Stopwords::english()),
            "none" => Ok(Stopwords::none()),
            path => termweight::io::read_stopwords(path)
                .with_context(|| format!("reading stopword list {path}")),
        }
    }

    /// The resolved settings, echoed into the output tree so a result
    /// directory is self-describing.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "corpus = {}", self.corpus.display());
        let _ = writeln!(
            s,
            "format = {}",
            match self.format {
                CorpusFormat::Tsv => "tsv",
                CorpusFormat::Dir => "dir",
            }
        );
        let _ = writeln!(
            s,
            "split = {}",
            match self.split {
                SplitPolicy::Named => "named",
                SplitPolicy::Fraction => "fraction",
            }
        );
        let _ = writeln!(s, "train_fraction = {}", self.train_fraction);
        let _ = writeln!(s, "dataset = {}", self.dataset);
        let _ = writeln!(s, "stopwords = {}", self.stopwords);
        let _ = writeln!(s, "select_ratio = {}", self.select_ratio);
        let _ = writeln!(s, "schemes = {}", self.schemes.join(","));
        let _ = writeln!(
            s,
            "learners = {}",
            self.learners
                .iter()
                .map(|l| l.name())
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(s, "repetitions = {}", self.repetitions);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(
            s,
            "significance_pairing = {}",
            match self.significance_pairing {
                SignificancePairing::PerClass => "per-class",
                SignificancePairing::Pooled => "pooled",
            }
        );
        let _ = writeln!(s, "surface_resolution = {}", self.surface_resolution);
        let _ = writeln!(s, "surface_prior = {}", self.surface_prior);
        let _ = writeln!(s, "surface_docs = {}", self.surface_docs);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> RawConfig {
        let mut raw = RawConfig::default();
        raw.set("corpus", "corpus.tsv");
        raw.set("output", "out");
        raw
    }

    #[test]
    fn defaults_fill_in() {
        let config = minimal().resolve().unwrap();
        assert_eq!(config.select_ratio, 0.1);
        assert_eq!(config.repetitions, 10);
        assert_eq!(config.schemes, vec!["LogTFIDF".to_owned()]);
        assert_eq!(config.learners, vec![LearnerKind::Lr]);
        assert_eq!(config.dataset, "corpus");
        assert_eq!(config.significance_pairing, SignificancePairing::PerClass);
    }

    #[test]
    fn file_parsing_and_overlay() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        std::fs::write(
            &path,
            "# comment\ncorpus = data.tsv\noutput = out\nschemes = LogTFIDF, LTW-L-I\nseed = 7\n",
        )
        .unwrap();
        let file = RawConfig::from_file(&path).unwrap();
        let mut flags = RawConfig::default();
        flags.set("seed", "9");
        let config = file.overlay(flags).resolve().unwrap();
        assert_eq!(config.seed, 9);
        assert_eq!(config.schemes.len(), 2);
    }

    #[test]
    fn unknown_keys_and_values_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        std::fs::write(&path, "corped = data.tsv\n").unwrap();
        assert!(RawConfig::from_file(&path).is_err());

        let mut raw = minimal();
        raw.set("schemes", "NoSuchScheme");
        assert!(raw.resolve().is_err());

        let mut raw = minimal();
        raw.set("learners", "perceptron");
        assert!(raw.resolve().is_err());

        let mut raw = minimal();
        raw.set("select_ratio", "0");
        assert!(raw.resolve().is_err());

        let mut raw = minimal();
        raw.set("surface_resolution", "1");
        assert!(raw.resolve().is_err());
    }

    #[test]
    fn ltw_overrides_apply() {
        let mut raw = minimal();
        raw.set("ltw_hidden_local", "64");
        raw.set("ltw_learning_rate", "0.01");
        let config = raw.resolve().unwrap();
        let base = LtwConfig::new(
            termweight::ltw::LtwVariant::Local,
            termweight::ltw::OutputHead::Identity,
        );
        let tuned = config.ltw.apply(base);
        assert_eq!(tuned.hidden_local, 64);
        assert_eq!(tuned.learning_rate, 0.01);
    }
}
