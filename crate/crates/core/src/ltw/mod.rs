//! Trainable term weighting: learn the collection factor (and optionally the
//! document-term factor) of a weighting scheme from a labelled corpus.
//!
//! Each vocabulary term is described by two fixed rates computed once before
//! training: its true positive rate `tpr` (fraction of positive documents
//! containing it) and false positive rate `fpr`. A small feed-forward net maps
//! these rates to a per-term score `cd(t)`:
//!
//! * **Local** variant: one shared 2 -> H -> 1 net applied to every term's
//!   `(tpr, fpr)` pair, convolution-style. Terms with equal rates get equal
//!   scores by construction.
//! * **Global** variant: a single net over the concatenation of all
//!   2F rates, producing all F scores in one shot, so a term's score may
//!   depend on every other term's rates.
//!
//! The output head is either a sigmoid (scores in (0,1), like classical
//! normalized factors) or the identity (unbounded scores, possibly negative).
//! Document vectors are then `dd(t,d) * cd(t)`, L2-normalized, where `dd` is
//! the length-normalized log frequency `ln(1 + f/dl)` — or, when `learn_dd`
//! is set, a second learned net over the raw frequency, forced to 0 at `f = 0`
//! so sparsity is preserved. A single auxiliary logistic unit on top of the
//! normalized vector provides the training signal (binary cross-entropy);
//! after training only the weighting branches are kept, and downstream
//! classifiers are trained on the weighted vectors as with any other scheme.

mod net;
mod train;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hash::Fnv1a;
use crate::stats::TermStats;
use crate::Result;

pub use net::{batch_gradients, batch_loss, Gradients};
pub use train::{train, StopReason, TraceRow, TrainingTrace};

pub(crate) use net::{expected_shapes, ParamSet};

/// Which architecture produces the per-term scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LtwVariant {
    Local,
    Global,
}

/// Activation applied to the collection branch output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputHead {
    Sigmoid,
    Identity,
}

impl OutputHead {
    #[inline]
    pub(crate) fn apply(self, s: f64) -> f64 {
        match self {
            OutputHead::Sigmoid => 1.0 / (1.0 + (-s).exp()),
            OutputHead::Identity => s,
        }
    }

    /// Derivative expressed through the output value.
    #[inline]
    pub(crate) fn derivative_from_output(self, o: f64) -> f64 {
        match self {
            OutputHead::Sigmoid => o * (1.0 - o),
            OutputHead::Identity => 1.0,
        }
    }
}

/// Hyperparameters for architecture and training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtwConfig {
    pub variant: LtwVariant,
    pub head: OutputHead,
    /// Learn the document-term factor too (a 1 -> hidden_dd -> 1 ReLU net on
    /// the raw frequency) instead of the fixed `ln(1 + f/dl)`.
    pub learn_dd: bool,
    /// Hidden units for the shared local net.
    pub hidden_local: usize,
    /// The global net uses `ceil(F/2)` hidden units, capped by this ceiling.
    pub hidden_global_cap: usize,
    /// Hidden units for the learned document-term branch.
    pub hidden_dd: usize,
    /// Drop probability for hidden activations (inverted dropout).
    pub dropout: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_steps: usize,
    /// Run a validation pass every this many steps.
    pub validation_every: usize,
    /// Stop after this many consecutive validations without improvement.
    pub patience: usize,
    /// A validation loss must undercut the best seen by this margin to count
    /// as an improvement (keeps training from crawling forever on separable
    /// data where the loss decreases by vanishing amounts).
    pub min_delta: f64,
    /// Fraction of the training rows held out for early stopping.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl LtwConfig {
    /// Defaults tuned for desk-scale corpora; only variant and head must be
    /// chosen.
    pub fn new(variant: LtwVariant, head: OutputHead) -> Self {
        LtwConfig {
            variant,
            head,
            learn_dd: false,
            hidden_local: 1000,
            hidden_global_cap: 2048,
            hidden_dd: 100,
            dropout: 0.2,
            learning_rate: 0.005,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 100,
            max_steps: 100_000,
            validation_every: 100,
            patience: 20,
            min_delta: 1e-4,
            validation_fraction: 0.2,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if !(self.learning_rate > 0.0) {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad(format!("betas ({}, {}) outside (0, 1)", self.beta1, self.beta2));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon {} must be positive", self.epsilon));
        }
        if self.hidden_local == 0 || self.hidden_global_cap == 0 || self.hidden_dd == 0 {
            return bad("hidden sizes must be at least 1".into());
        }
        if self.batch_size == 0 || self.max_steps == 0 || self.validation_every == 0 {
            return bad("batch size, max steps and validation cadence must be at least 1".into());
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        if !(self.min_delta >= 0.0) {
            return bad(format!("min_delta {} must be non-negative", self.min_delta));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad(format!(
                "validation fraction {} outside (0, 1)",
                self.validation_fraction
            ));
        }
        Ok(())
    }

    /// Hidden width of the collection branch for a vocabulary of `n_terms`.
    pub fn hidden_units(&self, n_terms: usize) -> usize {
        match self.variant {
            LtwVariant::Local => self.hidden_local,
            LtwVariant::Global => n_terms.div_ceil(2).clamp(1, self.hidden_global_cap),
        }
    }

    /// Short human-readable tag like `local-sigmoid` or `global-identity+dd`.
    pub fn describe(&self) -> String {
        let variant = match self.variant {
            LtwVariant::Local => "local",
            LtwVariant::Global => "global",
        };
        let head = match self.head {
            OutputHead::Sigmoid => "sigmoid",
            OutputHead::Identity => "identity",
        };
        let dd = if self.learn_dd { "+dd" } else { "" };
        format!("{variant}-{head}{dd}")
    }
}

/// Parsed form of a learned-scheme name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtwSchemeSpec {
    pub variant: LtwVariant,
    pub head: OutputHead,
    pub learn_dd: bool,
}

impl LtwSchemeSpec {
    pub fn canonical_name(&self) -> &'static str {
        match (self.variant, self.head, self.learn_dd) {
            (LtwVariant::Local, OutputHead::Identity, true) => "LTW-TF",
            (LtwVariant::Local, OutputHead::Sigmoid, false) => "LTW-L-sigma",
            (LtwVariant::Local, OutputHead::Identity, false) => "LTW-L-I",
            (LtwVariant::Global, OutputHead::Sigmoid, false) => "LTW-G-sigma",
            (LtwVariant::Global, OutputHead::Identity, false) => "LTW-G-I",
            // Remaining combinations have no short name; they are still
            // trainable through an explicit config.
            _ => "LTW-custom",
        }
    }

    /// Apply this spec on top of a base config.
    pub fn configure(&self, mut config: LtwConfig) -> LtwConfig {
        config.variant = self.variant;
        config.head = self.head;
        config.learn_dd = self.learn_dd;
        config
    }
}

/// Parse a learned-scheme name: `LTW-{L|G}-{sigma|I}` (case-insensitive,
/// `s`/`sig` and `id`/`identity` accepted) or `LTW-TF` for the variant that
/// also learns the document-term factor.
pub fn parse_scheme_name(name: &str) -> Option<LtwSchemeSpec> {
    let lower = name.to_ascii_lowercase();
    if lower == "ltw-tf" {
        return Some(LtwSchemeSpec {
            variant: LtwVariant::Local,
            head: OutputHead::Identity,
            learn_dd: true,
        });
    }
    let rest = lower.strip_prefix("ltw-")?;
    let (variant, head) = rest.split_once('-')?;
    let variant = match variant {
        "l" | "local" => LtwVariant::Local,
        "g" | "global" => LtwVariant::Global,
        _ => return None,
    };
    let head = match head {
        "s" | "sig" | "sigma" => OutputHead::Sigmoid,
        "i" | "id" | "identity" => OutputHead::Identity,
        _ => return None,
    };
    Some(LtwSchemeSpec {
        variant,
        head,
        learn_dd: false,
    })
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    config: LtwConfig,
    vocab_fingerprint: u64,
    table_tpr: Vec<f64>,
    table_fpr: Vec<f64>,
    tensors: Vec<net::Tensor>,
}

/// A trained (or freshly initialized) weighting model: parameter tensors plus
/// the fixed per-term `(tpr, fpr)` input table it was built against.
#[derive(Debug, Clone)]
pub struct LtwModel {
    pub(crate) config: LtwConfig,
    pub(crate) vocab_fingerprint: u64,
    pub(crate) table_tpr: Vec<f64>,
    pub(crate) table_fpr: Vec<f64>,
    pub(crate) params: ParamSet,
}

impl LtwModel {
    /// Initialize a model for the given statistics table: weights drawn from
    /// a symmetric uniform scaled by 1/sqrt(fan-in), biases zero. All draws
    /// come from a ChaCha stream seeded with `config.seed`, so initialization
    /// is reproducible on any platform.
    pub fn new(config: LtwConfig, stats: &TermStats, vocab_fingerprint: u64) -> Result<Self> {
        config.validate()?;
        if stats.n_terms() == 0 {
            return Err(Error::InvalidConfig("empty vocabulary".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(0);
        let params = ParamSet::init(&config, stats.n_terms(), &mut rng);
        Ok(LtwModel {
            config,
            vocab_fingerprint,
            table_tpr: stats.tpr_slice().to_vec(),
            table_fpr: stats.fpr_slice().to_vec(),
            params,
        })
    }

    pub fn config(&self) -> &LtwConfig {
        &self.config
    }

    pub fn n_terms(&self) -> usize {
        self.table_tpr.len()
    }

    pub fn vocab_fingerprint(&self) -> u64 {
        self.vocab_fingerprint
    }

    pub fn has_learned_dd(&self) -> bool {
        self.config.learn_dd
    }

    /// Stable hash of the fixed input table; unchanged by training.
    pub fn table_fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        for &v in &self.table_tpr {
            h = h.write_f64(v);
        }
        for &v in &self.table_fpr {
            h = h.write_f64(v);
        }
        h.finish()
    }

    /// The collection factor for every vocabulary term (inference mode, no
    /// dropout).
    pub fn cd_scores(&self) -> Result<Vec<f64>> {
        Ok(net::cd_forward_inference(self))
    }

    /// The collection factor at an arbitrary `(tpr, fpr)` point. Only the
    /// local variant defines scores off the table's own terms.
    pub fn cd_at(&self, tpr: f64, fpr: f64) -> Result<f64> {
        if self.config.variant != LtwVariant::Local {
            return Err(Error::GlobalSurface);
        }
        Ok(net::local_cd_at(self, tpr, fpr))
    }

    /// The learned document-term factor for each entry of a sparse count row
    /// (inference mode). Requires `learn_dd`.
    pub fn dd_scores(&self, row: &[(u32, u32)]) -> Result<Vec<f64>> {
        if !self.config.learn_dd {
            return Err(Error::InvalidConfig(
                "model has no learned document-term branch".into(),
            ));
        }
        Ok(row
            .iter()
            .map(|&(_, f)| net::dd_forward_inference(self, f))
            .collect())
    }

    /// Weight one sparse count row: `dd * cd`, L2-normalized, plus the
    /// auxiliary classifier's probability for the positive class. An all-zero
    /// row stays all-zero and the prediction falls back to the bias.
    pub fn lw_forward(&self, row: &[(u32, u32)], dl: u32) -> Result<(Vec<(u32, f64)>, f64)> {
        net::lw_forward(self, row, dl)
    }

    /// Number of scalar parameters across all tensors.
    pub fn param_len(&self) -> usize {
        self.params.flat_len()
    }

    /// Read one parameter by flat index (tensor order: collection branch,
    /// auxiliary unit, then the learned document-term branch if present).
    pub fn param_get(&self, i: usize) -> f64 {
        self.params.flat_get(i)
    }

    /// Overwrite one parameter by flat index (used by finite-difference
    /// checks).
    pub fn param_set(&mut self, i: usize, v: f64) {
        self.params.flat_set(i, v);
    }

    /// Evaluate the learned collection surface on a uniform grid over
    /// `[0,1] x [0,1]` (`resolution` points per axis, so resolution 2 yields
    /// the four corners), together with the per-term `(tpr, fpr, cd)` scatter.
    /// Only local models have a surface; global models reject.
    pub fn export_surface(&self, resolution: usize) -> Result<Surface> {
        if resolution < 2 {
            return Err(Error::InvalidResolution(resolution));
        }
        if self.config.variant != LtwVariant::Local {
            return Err(Error::GlobalSurface);
        }
        let step = 1.0 / (resolution - 1) as f64;
        let mut grid = Vec::with_capacity(resolution * resolution);
        for i in 0..resolution {
            let tpr = i as f64 * step;
            for j in 0..resolution {
                let fpr = j as f64 * step;
                grid.push((tpr, fpr, net::local_cd_at(self, tpr, fpr)));
            }
        }
        let cd = net::cd_forward_inference(self);
        let scatter = (0..self.n_terms())
            .map(|t| (self.table_tpr[t], self.table_fpr[t], cd[t]))
            .collect();
        Ok(Surface {
            resolution,
            grid,
            scatter,
        })
    }

    /// Persist the model as a versioned JSON container: config, vocabulary
    /// fingerprint, the `(tpr, fpr)` table, and every tensor with declared
    /// dimensions (row-major). Values round-trip bit-exactly.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let cp = Checkpoint {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            vocab_fingerprint: self.vocab_fingerprint,
            table_tpr: self.table_tpr.clone(),
            table_fpr: self.table_fpr.clone(),
            tensors: self.params.tensors.clone(),
        };
        let json = serde_json::to_string(&cp)?;
        fs::write(path, json)?;
        Ok(())
    }

    /// Load a checkpoint, validating the version tag and every tensor shape
    /// against the stored config and table arity.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let json = fs::read_to_string(path)?;
        let cp: Checkpoint = serde_json::from_str(&json)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointVersion(cp.version));
        }
        cp.config.validate()?;
        if cp.table_tpr.len() != cp.table_fpr.len() {
            return Err(Error::ArityMismatch {
                expected: cp.table_tpr.len(),
                got: cp.table_fpr.len(),
                context: "checkpoint rate table",
            });
        }
        let shapes = expected_shapes(&cp.config, cp.table_tpr.len());
        if cp.tensors.len() != shapes.len() {
            return Err(Error::ArityMismatch {
                expected: shapes.len(),
                got: cp.tensors.len(),
                context: "checkpoint tensor count",
            });
        }
        for (t, &(r, c)) in cp.tensors.iter().zip(&shapes) {
            if t.rows != r || t.cols != c || t.data.len() != r * c {
                return Err(Error::ArityMismatch {
                    expected: r * c,
                    got: t.data.len(),
                    context: "checkpoint tensor shape",
                });
            }
        }
        Ok(LtwModel {
            config: cp.config,
            vocab_fingerprint: cp.vocab_fingerprint,
            table_tpr: cp.table_tpr,
            table_fpr: cp.table_fpr,
            params: ParamSet {
                tensors: cp.tensors,
            },
        })
    }
}

/// A sampled collection surface plus the training terms' scatter.
#[derive(Debug, Clone)]
pub struct Surface {
    pub resolution: usize,
    /// `(tpr, fpr, cd)` triples, tpr-major.
    pub grid: Vec<(f64, f64, f64)>,
    /// One `(tpr, fpr, cd)` triple per vocabulary term.
    pub scatter: Vec<(f64, f64, f64)>,
}

impl Surface {
    fn write_triples(path: impl AsRef<Path>, triples: &[(f64, f64, f64)]) -> Result<()> {
        let mut out = String::from("tpr\tfpr\tcd\n");
        for &(tpr, fpr, cd) in triples {
            writeln!(out, "{tpr:.8e}\t{fpr:.8e}\t{cd:.8e}").expect("string write");
        }
        fs::write(path, out)?;
        Ok(())
    }

    pub fn write_grid_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        Self::write_triples(path, &self.grid)
    }

    pub fn write_scatter_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        Self::write_triples(path, &self.scatter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Document, Stopwords};

    fn tiny_stats() -> TermStats {
        let docs = vec![
            Document::new("p0", ["c"], "m m x"),
            Document::new("p1", ["c"], "m y"),
            Document::new("n0", Vec::<String>::new(), "x y"),
            Document::new("n1", Vec::<String>::new(), "y y"),
        ];
        let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
        TermStats::compute(&corpus, &corpus.binary_task("c")).unwrap()
    }

    fn small_config(variant: LtwVariant, head: OutputHead) -> LtwConfig {
        let mut c = LtwConfig::new(variant, head);
        c.hidden_local = 7;
        c.hidden_global_cap = 5;
        c.hidden_dd = 4;
        c
    }

    #[test]
    fn scheme_name_parsing() {
        let spec = parse_scheme_name("LTW-L-I").unwrap();
        assert_eq!(spec.variant, LtwVariant::Local);
        assert_eq!(spec.head, OutputHead::Identity);
        assert!(!spec.learn_dd);
        assert_eq!(spec.canonical_name(), "LTW-L-I");

        let spec = parse_scheme_name("ltw-g-sigma").unwrap();
        assert_eq!(spec.variant, LtwVariant::Global);
        assert_eq!(spec.head, OutputHead::Sigmoid);
        assert_eq!(spec.canonical_name(), "LTW-G-sigma");

        let spec = parse_scheme_name("LTW-TF").unwrap();
        assert!(spec.learn_dd);
        assert_eq!(spec.variant, LtwVariant::Local);
        assert_eq!(spec.head, OutputHead::Identity);

        assert!(parse_scheme_name("TFIDF").is_none());
        assert!(parse_scheme_name("LTW-X-I").is_none());
    }

    #[test]
    fn init_is_seed_deterministic() {
        let stats = tiny_stats();
        let cfg = small_config(LtwVariant::Local, OutputHead::Sigmoid);
        let a = LtwModel::new(cfg.clone(), &stats, 1).unwrap();
        let b = LtwModel::new(cfg.clone(), &stats, 1).unwrap();
        for i in 0..a.param_len() {
            assert_eq!(a.param_get(i).to_bits(), b.param_get(i).to_bits());
        }
        let mut cfg2 = cfg;
        cfg2.seed = 99;
        let c = LtwModel::new(cfg2, &stats, 1).unwrap();
        let differs = (0..a.param_len()).any(|i| a.param_get(i) != c.param_get(i));
        assert!(differs, "different seed should change initialization");
    }

    #[test]
    fn sigmoid_head_scores_in_unit_interval() {
        let stats = tiny_stats();
        let model = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        for s in model.cd_scores().unwrap() {
            assert!(s > 0.0 && s < 1.0);
        }
    }

    #[test]
    fn local_permutation_equivariance() {
        // Permuting the table rows permutes the scores identically: the local
        // net treats terms independently.
        let stats = tiny_stats();
        let cfg = small_config(LtwVariant::Local, OutputHead::Identity);
        let model = LtwModel::new(cfg, &stats, 0).unwrap();
        let base = model.cd_scores().unwrap();
        let mut permuted = model.clone();
        let f = permuted.n_terms();
        permuted.table_tpr.rotate_left(1);
        permuted.table_fpr.rotate_left(1);
        let rotated = permuted.cd_scores().unwrap();
        for t in 0..f {
            let src = (t + 1) % f;
            assert_eq!(rotated[t].to_bits(), base[src].to_bits());
        }
    }

    #[test]
    fn equal_rates_get_equal_local_scores() {
        let stats = tiny_stats();
        let mut model = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        model.table_tpr = vec![0.3, 0.3, 0.9];
        model.table_fpr = vec![0.1, 0.1, 0.2];
        let cd = model.cd_scores().unwrap();
        assert_eq!(cd[0].to_bits(), cd[1].to_bits());
    }

    #[test]
    fn lw_forward_zero_row_uses_bias() {
        let stats = tiny_stats();
        let model = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        let (vec, yhat) = model.lw_forward(&[], 0).unwrap();
        assert!(vec.is_empty());
        let b3 = model.params.tensors[net::B3].data[0];
        let expected = 1.0 / (1.0 + (-b3).exp());
        assert!((yhat - expected).abs() < 1e-15);
    }

    #[test]
    fn lw_forward_is_unit_norm() {
        let stats = tiny_stats();
        for head in [OutputHead::Sigmoid, OutputHead::Identity] {
            let model =
                LtwModel::new(small_config(LtwVariant::Local, head), &stats, 0).unwrap();
            let (vec, _) = model.lw_forward(&[(0, 2), (2, 1)], 5).unwrap();
            let norm: f64 = vec.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn surface_resolution_two_is_corners() {
        let stats = tiny_stats();
        let model = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        let surface = model.export_surface(2).unwrap();
        let coords: Vec<(f64, f64)> = surface.grid.iter().map(|&(a, b, _)| (a, b)).collect();
        assert_eq!(
            coords,
            vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        );
        // Grid values agree with direct evaluation.
        for &(tpr, fpr, cd) in &surface.grid {
            assert_eq!(cd.to_bits(), model.cd_at(tpr, fpr).unwrap().to_bits());
        }
        assert_eq!(surface.scatter.len(), model.n_terms());
    }

    #[test]
    fn surface_rejects_bad_inputs() {
        let stats = tiny_stats();
        let local = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        assert!(matches!(
            local.export_surface(1),
            Err(Error::InvalidResolution(1))
        ));
        let global = LtwModel::new(
            small_config(LtwVariant::Global, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        assert!(matches!(global.export_surface(10), Err(Error::GlobalSurface)));
        assert!(matches!(global.cd_at(0.5, 0.5), Err(Error::GlobalSurface)));
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let stats = tiny_stats();
        let mut cfg = small_config(LtwVariant::Local, OutputHead::Identity);
        cfg.learn_dd = true;
        let model = LtwModel::new(cfg, &stats, 0xfeed).unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = LtwModel::load(&path).unwrap();
        assert_eq!(loaded.vocab_fingerprint(), 0xfeed);
        assert_eq!(loaded.param_len(), model.param_len());
        for i in 0..model.param_len() {
            assert_eq!(loaded.param_get(i).to_bits(), model.param_get(i).to_bits());
        }
        assert_eq!(loaded.table_fingerprint(), model.table_fingerprint());
        assert_eq!(loaded.config(), model.config());
    }

    #[test]
    fn checkpoint_rejects_corrupted_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let stats = tiny_stats();
        let model = LtwModel::new(
            small_config(LtwVariant::Local, OutputHead::Sigmoid),
            &stats,
            0,
        )
        .unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let mut json = fs::read_to_string(&path).unwrap();
        json = json.replace("\"version\":1", "\"version\":9");
        fs::write(&path, &json).unwrap();
        assert!(matches!(
            LtwModel::load(&path),
            Err(Error::CheckpointVersion(9))
        ));
    }

    #[test]
    fn config_validation_catches_bad_values() {
        let mut c = LtwConfig::new(LtwVariant::Local, OutputHead::Sigmoid);
        c.dropout = 1.0;
        assert!(c.validate().is_err());
        let mut c = LtwConfig::new(LtwVariant::Local, OutputHead::Sigmoid);
        c.learning_rate = 0.0;
        assert!(c.validate().is_err());
        let mut c = LtwConfig::new(LtwVariant::Local, OutputHead::Sigmoid);
        c.validation_fraction = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn global_hidden_size_is_half_vocabulary_capped() {
        let mut c = LtwConfig::new(LtwVariant::Global, OutputHead::Sigmoid);
        assert_eq!(c.hidden_units(10), 5);
        assert_eq!(c.hidden_units(11), 6);
        c.hidden_global_cap = 4;
        assert_eq!(c.hidden_units(10), 4);
        assert_eq!(c.hidden_units(1), 1);
    }
}
