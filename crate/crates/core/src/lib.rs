//! Supervised term weighting and binary text classification.
//!
//! The crate decomposes a term-weighting scheme into three cooperating factors:
//! a *document–term* factor `dd(t, d)` that looks only at the frequency of term
//! `t` inside document `d`, a *collection* factor `cd(t)` that looks at how `t`
//! is distributed over the collection (and, for supervised variants, over the
//! two sides of a binary labelling), and a vector normalization. Classical
//! schemes (TF-IDF, BM25, chi-square / gain-ratio / relevance-frequency
//! weighting, ...) fix both factors in closed form; the [`ltw`] module instead
//! *learns* the collection factor — and optionally the document–term factor —
//! from data, by feeding per-term true/false positive rates through a small
//! feed-forward net trained end-to-end against an auxiliary logistic
//! classifier.
//!
//! The remaining modules supply everything needed to run controlled
//! experiments on top of these representations: corpus ingestion and sparse
//! count matrices ([`corpus`], [`io`]), per-term contingency statistics and
//! feature selection ([`stats`]), downstream learners with grid search
//! ([`classifiers`]), and F1 aggregation plus Wilcoxon signed-rank comparisons
//! ([`eval`]).
//!
//! Everything is deterministic given a seed: corpus splits, net
//! initialization, minibatch shuffling, and dropout masks all derive from
//! explicit `u64` seeds through a counter-based RNG, so two runs with the same
//! inputs produce bitwise-identical models and result tables.

pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod hash;
pub mod io;
pub mod ltw;
pub mod stats;
pub mod toy;
pub mod weighting;

pub use classifiers::{LearnerKind, LearnerSpec, TrainedClassifier, ValidationPolicy};
pub use corpus::{BinaryTask, Document, SparseCorpus, Vocabulary};
pub use error::Error;
pub use eval::{ClassOutcome, EvalReport, WilcoxonTest};
pub use ltw::{LtwConfig, LtwModel, LtwVariant, OutputHead, TrainingTrace};
pub use stats::{ContingencyTable, TermStats};
pub use weighting::{CdFactor, CorpusStats, DdFactor, Normalization, SparseMatrix, WeightingScheme};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
