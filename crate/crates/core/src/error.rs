//! Error type shared by every module in the crate.

use thiserror::Error;

/// Anything that can go wrong while building corpora, weighting, training or
/// evaluating. Variants carry enough context to point at the offending input.
#[derive(Debug, Error)]
pub enum Error {
    /// Two documents with the same id were passed to corpus construction.
    #[error("duplicate document id: {0:?}")]
    DuplicateDocumentId(String),

    /// A split or selection fraction outside its legal open/half-open range.
    #[error("fraction {value} outside valid range {range}")]
    InvalidFraction { value: f64, range: &'static str },

    /// An operation that needs at least one document got none.
    #[error("corpus contains no documents")]
    EmptyCorpus,

    /// A binary task whose positive class is empty (or covers everything).
    #[error("degenerate task for class {class:?}: {positives} positive of {total} documents")]
    DegenerateTask {
        class: String,
        positives: usize,
        total: usize,
    },

    /// A stored sparse row disagrees with its declared document length.
    #[error("document {doc} has positive term count but zero length")]
    ZeroLengthDocument { doc: usize },

    /// Class prior of 0 or 1: entropy-normalized scores are undefined.
    #[error("class prior {prc} is degenerate; score undefined")]
    DegeneratePrior { prc: f64 },

    /// idf-style factors are undefined for terms absent from the collection.
    #[error("term index {term} has zero document frequency")]
    TermAbsent { term: usize },

    /// A vector/matrix arity does not match the vocabulary it is used with.
    #[error("arity mismatch: expected {expected}, got {got} ({context})")]
    ArityMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// Supervised collection factors need term statistics that were not built.
    #[error("collection statistics were built without a labelling; supervised factor unavailable")]
    MissingTermStats,

    /// Surface export asks for fewer than two grid points per axis.
    #[error("surface grid resolution must be >= 2, got {0}")]
    InvalidResolution(usize),

    /// Surface export is only defined for the shared-net (local) variant.
    #[error("surface export requires a local-variant model; this model is global")]
    GlobalSurface,

    /// Wilcoxon test with too few informative pairs.
    #[error("need at least {needed} non-zero paired differences, got {got}")]
    InsufficientPairs { needed: usize, got: usize },

    /// Paired samples of different lengths.
    #[error("paired samples differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    /// Classifier training input with only one class present.
    #[error("training labels contain a single class ({observed} of {total} positive)")]
    SingleClass { observed: usize, total: usize },

    /// A malformed configuration value (bad hyperparameter, empty grid, ...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A malformed input file (documents, sparse matrix, checkpoint, ...).
    #[error("parse error in {file} line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    /// Checkpoint container with an unsupported version tag.
    #[error("unsupported checkpoint version {0}")]
    CheckpointVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
