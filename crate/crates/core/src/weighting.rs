//! Term-weighting schemes: a document-term factor times a collection factor,
//! followed by optional cosine normalization.
//!
//! The document-term factor `dd(t, d)` sees only the in-document frequency
//! (and, for the length-normalized kind, the document length). The collection
//! factor `cd(t)` sees collection-level statistics: document frequency for the
//! idf kinds, the per-term contingency table for the supervised kinds, or a
//! trained model for the learned kind. BM25 does not fit the two-factor mold —
//! its saturation component needs the collection's average document length and
//! it is conventionally used without re-normalization — so it is carried as a
//! whole-formula scheme with `k1`/`b` parameters.
//!
//! Weighting never densifies: absent counts stay absent, and a document whose
//! every stored weight comes out zero is passed through unnormalized.

use std::sync::Arc;

use crate::corpus::{BinaryTask, SparseCorpus};
use crate::error::Error;
use crate::ltw::LtwModel;
use crate::stats::{self, TermStats};
use crate::Result;

/// Document-term factor: how much one occurrence pattern inside a single
/// document is worth. `eval` is 0 whenever the raw frequency is 0, so sparse
/// rows stay sparse under every kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdFactor {
    /// 1 if the term occurs, else 0.
    Binary,
    /// The raw frequency itself.
    Raw,
    /// `1 + ln f` for positive `f`, else 0.
    OnePlusLog,
    /// `ln(1 + f)`.
    LogOnePlus,
    /// `ln(1 + f/dl)`: frequency relative to document length, which makes the
    /// factor invariant under document self-concatenation.
    LengthNormalizedLog,
}

impl DdFactor {
    /// Evaluate on a raw frequency and the document length it came from.
    pub fn eval(self, f: u32, dl: u32) -> Result<f64> {
        if f == 0 {
            return Ok(0.0);
        }
        Ok(match self {
            DdFactor::Binary => 1.0,
            DdFactor::Raw => f as f64,
            DdFactor::OnePlusLog => 1.0 + (f as f64).ln(),
            DdFactor::LogOnePlus => (1.0 + f as f64).ln(),
            DdFactor::LengthNormalizedLog => {
                if dl == 0 {
                    return Err(Error::ZeroLengthDocument { doc: 0 });
                }
                (1.0 + f as f64 / dl as f64).ln()
            }
        })
    }
}

/// Collection-level statistics a scheme draws on: collection size, average
/// document length, per-term document frequency, and (when built against a
/// task) per-term supervised statistics.
#[derive(Debug, Clone)]
pub struct CorpusStats {
    d_total: usize,
    avdl: f64,
    doc_freq: Vec<u32>,
    term_stats: Option<TermStats>,
}

impl CorpusStats {
    /// Statistics without a labelling; supervised factors will be unavailable.
    pub fn unsupervised(corpus: &SparseCorpus) -> Self {
        CorpusStats {
            d_total: corpus.n_docs(),
            avdl: corpus.avdl(),
            doc_freq: corpus.document_frequency(),
            term_stats: None,
        }
    }

    /// Statistics including per-term contingency against `task`.
    pub fn supervised(corpus: &SparseCorpus, task: &BinaryTask) -> Result<Self> {
        let term_stats = TermStats::compute(corpus, task)?;
        Ok(CorpusStats {
            d_total: corpus.n_docs(),
            avdl: corpus.avdl(),
            doc_freq: corpus.document_frequency(),
            term_stats: Some(term_stats),
        })
    }

    pub fn d_total(&self) -> usize {
        self.d_total
    }

    pub fn avdl(&self) -> f64 {
        self.avdl
    }

    pub fn n_terms(&self) -> usize {
        self.doc_freq.len()
    }

    pub fn doc_freq(&self, term: usize) -> u32 {
        self.doc_freq[term]
    }

    pub fn term_stats(&self) -> Option<&TermStats> {
        self.term_stats.as_ref()
    }

    fn require_term_stats(&self) -> Result<&TermStats> {
        self.term_stats.as_ref().ok_or(Error::MissingTermStats)
    }

    /// `ln(|D| / n_t)`; errors for terms with zero document frequency.
    pub fn idf(&self, term: usize) -> Result<f64> {
        let n = self.doc_freq[term];
        if n == 0 {
            return Err(Error::TermAbsent { term });
        }
        Ok((self.d_total as f64 / n as f64).ln())
    }

    /// BM25's idf `ln((|D| - n + 0.5) / (n + 0.5))`, deliberately uncapped:
    /// terms in more than half the collection go negative.
    pub fn bm25_idf(&self, term: usize) -> Result<f64> {
        let n = self.doc_freq[term];
        if n == 0 {
            return Err(Error::TermAbsent { term });
        }
        let d = self.d_total as f64;
        Ok(((d - n as f64 + 0.5) / (n as f64 + 0.5)).ln())
    }
}

/// Collection factor: one value per term.
#[derive(Clone)]
pub enum CdFactor {
    /// Constant 1 (purely frequency-based schemes).
    One,
    /// Inverse document frequency.
    Idf,
    /// BM25's shifted idf.
    Bm25Idf,
    /// Chi-square association with the task.
    ChiSquare,
    /// Gain ratio against the task.
    GainRatio,
    /// Relevance frequency against the task.
    RelevanceFrequency,
    /// Scores produced by a trained model's collection branch.
    Learned(Arc<LtwModel>),
}

impl std::fmt::Debug for CdFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CdFactor::One => write!(f, "One"),
            CdFactor::Idf => write!(f, "Idf"),
            CdFactor::Bm25Idf => write!(f, "Bm25Idf"),
            CdFactor::ChiSquare => write!(f, "ChiSquare"),
            CdFactor::GainRatio => write!(f, "GainRatio"),
            CdFactor::RelevanceFrequency => write!(f, "RelevanceFrequency"),
            CdFactor::Learned(m) => write!(f, "Learned({})", m.config().describe()),
        }
    }
}

impl CdFactor {
    /// Evaluate for a single term. The learned kind routes through the model's
    /// collection branch (use [`CdFactor::values`] to weight a whole corpus —
    /// it evaluates the branch once instead of per term).
    pub fn eval(&self, term: usize, stats: &CorpusStats) -> Result<f64> {
        if term >= stats.n_terms() {
            return Err(Error::ArityMismatch {
                expected: stats.n_terms(),
                got: term,
                context: "cd term index",
            });
        }
        match self {
            CdFactor::One => Ok(1.0),
            CdFactor::Idf => stats.idf(term),
            CdFactor::Bm25Idf => stats.bm25_idf(term),
            CdFactor::ChiSquare => Ok(stats::chi_square(stats.require_term_stats()?.table(term))),
            CdFactor::GainRatio => stats::gain_ratio(stats.require_term_stats()?.table(term)),
            CdFactor::RelevanceFrequency => Ok(stats::relevance_frequency(
                stats.require_term_stats()?.table(term),
            )),
            CdFactor::Learned(model) => Ok(model.cd_scores()?[term]),
        }
    }

    /// All per-term values at once.
    pub fn values(&self, stats: &CorpusStats) -> Result<Vec<f64>> {
        if let CdFactor::Learned(model) = self {
            let scores = model.cd_scores()?;
            if scores.len() != stats.n_terms() {
                return Err(Error::ArityMismatch {
                    expected: stats.n_terms(),
                    got: scores.len(),
                    context: "learned cd scores vs vocabulary",
                });
            }
            return Ok(scores);
        }
        (0..stats.n_terms()).map(|t| self.eval(t, stats)).collect()
    }
}

/// Vector normalization applied after the two factors are multiplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    None,
    /// Divide by the L2 norm of the stored entries. All-zero vectors pass
    /// through unchanged.
    Cosine,
}

/// BM25 saturation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

#[derive(Debug, Clone)]
enum SchemeKind {
    Composed {
        dd: DdFactor,
        cd: CdFactor,
        norm: Normalization,
    },
    Bm25(Bm25Params),
}

/// A complete weighting scheme with a display name.
#[derive(Debug, Clone)]
pub struct WeightingScheme {
    name: String,
    kind: SchemeKind,
}

impl WeightingScheme {
    pub fn composed(
        name: impl Into<String>,
        dd: DdFactor,
        cd: CdFactor,
        norm: Normalization,
    ) -> Self {
        WeightingScheme {
            name: name.into(),
            kind: SchemeKind::Composed { dd, cd, norm },
        }
    }

    /// BM25 with the conventional parameters k1 = 1.2, b = 0.75.
    pub fn bm25() -> Self {
        Self::bm25_with(Bm25Params::default())
    }

    pub fn bm25_with(params: Bm25Params) -> Self {
        WeightingScheme {
            name: "BM25".into(),
            kind: SchemeKind::Bm25(params),
        }
    }

    /// Length-normalized log frequency times a trained collection branch,
    /// L2-normalized — the representation the trainable models produce. When
    /// the model learned its own document-term branch, that branch is used
    /// instead of the fixed one.
    pub fn learned(name: impl Into<String>, model: Arc<LtwModel>) -> Self {
        WeightingScheme {
            name: name.into(),
            kind: SchemeKind::Composed {
                dd: DdFactor::LengthNormalizedLog,
                cd: CdFactor::Learned(model),
                norm: Normalization::Cosine,
            },
        }
    }

    /// Resolve a classical scheme by name (case-insensitive): Binary, TF,
    /// LogTF, TFIDF, LogTFIDF, BM25, TFCHI, TFGR, TFRF. Learned schemes need a
    /// trained model and are built with [`WeightingScheme::learned`].
    pub fn from_name(name: &str) -> Option<Self> {
        use CdFactor as C;
        use DdFactor as D;
        let canonical = |n, dd, cd| Some(Self::composed(n, dd, cd, Normalization::Cosine));
        match name.to_ascii_lowercase().as_str() {
            "binary" => canonical("Binary", D::Binary, C::One),
            "tf" => canonical("TF", D::Raw, C::One),
            "logtf" => canonical("LogTF", D::OnePlusLog, C::One),
            "tfidf" => canonical("TFIDF", D::Raw, C::Idf),
            "logtfidf" => canonical("LogTFIDF", D::LogOnePlus, C::Idf),
            "bm25" => Some(Self::bm25()),
            "tfchi" => canonical("TFCHI", D::OnePlusLog, C::ChiSquare),
            "tfgr" => canonical("TFGR", D::OnePlusLog, C::GainRatio),
            "tfrf" => canonical("TFRF", D::OnePlusLog, C::RelevanceFrequency),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Whether this scheme needs supervised term statistics.
    pub fn is_supervised(&self) -> bool {
        matches!(
            self.kind,
            SchemeKind::Composed {
                cd: CdFactor::ChiSquare
                    | CdFactor::GainRatio
                    | CdFactor::RelevanceFrequency
                    | CdFactor::Learned(_),
                ..
            }
        )
    }

    /// Whether this scheme's collection factor comes from a trained model.
    pub fn is_learned(&self) -> bool {
        matches!(
            self.kind,
            SchemeKind::Composed {
                cd: CdFactor::Learned(_),
                ..
            }
        )
    }

    /// The trained model backing a learned scheme, if any.
    pub fn model(&self) -> Option<&Arc<LtwModel>> {
        match &self.kind {
            SchemeKind::Composed {
                cd: CdFactor::Learned(m),
                ..
            } => Some(m),
            _ => None,
        }
    }

    /// Weight a single sparse count row. `cd_values` must hold one value per
    /// vocabulary term (see [`CdFactor::values`]).
    pub fn weigh_document(
        &self,
        row: &[(u32, u32)],
        dl: u32,
        stats: &CorpusStats,
        cd_values: &[f64],
    ) -> Result<Vec<(u32, f64)>> {
        if cd_values.len() != stats.n_terms() {
            return Err(Error::ArityMismatch {
                expected: stats.n_terms(),
                got: cd_values.len(),
                context: "cd values vs vocabulary",
            });
        }
        let mut out = Vec::with_capacity(row.len());
        match &self.kind {
            SchemeKind::Composed { dd, norm, .. } => {
                let mut model_dd: Option<Vec<f64>> = None;
                if let SchemeKind::Composed {
                    cd: CdFactor::Learned(model),
                    ..
                } = &self.kind
                {
                    if model.has_learned_dd() {
                        model_dd = Some(model.dd_scores(row)?);
                    }
                }
                for (k, &(t, f)) in row.iter().enumerate() {
                    let d = match &model_dd {
                        Some(v) => v[k],
                        None => dd.eval(f, dl)?,
                    };
                    out.push((t, d * cd_values[t as usize]));
                }
                if *norm == Normalization::Cosine {
                    let norm_sq: f64 = out.iter().map(|&(_, w)| w * w).sum();
                    if norm_sq > 0.0 {
                        let inv = 1.0 / norm_sq.sqrt();
                        for e in &mut out {
                            e.1 *= inv;
                        }
                    }
                }
            }
            SchemeKind::Bm25(p) => {
                let len_ratio = if stats.avdl() > 0.0 {
                    dl as f64 / stats.avdl()
                } else {
                    0.0
                };
                let denom_base = p.k1 * ((1.0 - p.b) + p.b * len_ratio);
                for &(t, f) in row {
                    let f = f as f64;
                    let sat = ((p.k1 + 1.0) * f) / (denom_base + f);
                    out.push((t, sat * cd_values[t as usize]));
                }
            }
        }
        Ok(out)
    }

    /// Weight every row of a corpus. The collection factor is evaluated once.
    pub fn weigh_corpus(&self, corpus: &SparseCorpus, stats: &CorpusStats) -> Result<SparseMatrix> {
        if corpus.n_terms() != stats.n_terms() {
            return Err(Error::ArityMismatch {
                expected: stats.n_terms(),
                got: corpus.n_terms(),
                context: "corpus vs stats vocabulary",
            });
        }
        let cd = self.cd_factor_values(stats)?;
        let rows: Result<Vec<_>> = (0..corpus.n_docs())
            .map(|d| self.weigh_document(corpus.row(d), corpus.doc_len(d), stats, &cd))
            .collect();
        SparseMatrix::new(corpus.n_terms(), rows?)
    }

    /// The per-term collection factor this scheme applies.
    pub fn cd_factor_values(&self, stats: &CorpusStats) -> Result<Vec<f64>> {
        match &self.kind {
            SchemeKind::Composed { cd, .. } => cd.values(stats),
            SchemeKind::Bm25(_) => (0..stats.n_terms()).map(|t| stats.bm25_idf(t)).collect(),
        }
    }
}

/// Sparse real-valued matrix with a fixed column count; rows hold `(index,
/// value)` entries with strictly increasing indices and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_cols: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl SparseMatrix {
    pub fn new(n_cols: usize, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        for row in &rows {
            let mut prev: Option<u32> = None;
            for &(t, w) in row {
                if t as usize >= n_cols {
                    return Err(Error::ArityMismatch {
                        expected: n_cols,
                        got: t as usize,
                        context: "matrix column index",
                    });
                }
                if prev.map_or(false, |p| p >= t) {
                    return Err(Error::InvalidConfig(
                        "matrix row indices must be strictly increasing".into(),
                    ));
                }
                if !w.is_finite() {
                    return Err(Error::InvalidConfig(format!("non-finite weight {w}")));
                }
                prev = Some(t);
            }
        }
        Ok(SparseMatrix { n_cols, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(u32, f64)>] {
        &self.rows
    }

    /// L2 norm of one row's stored entries.
    pub fn row_norm(&self, i: usize) -> f64 {
        self.rows[i]
            .iter()
            .map(|&(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Document, Stopwords};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn dd_kinds_at_reference_points() {
        for kind in [
            DdFactor::Binary,
            DdFactor::Raw,
            DdFactor::OnePlusLog,
            DdFactor::LogOnePlus,
            DdFactor::LengthNormalizedLog,
        ] {
            assert_eq!(kind.eval(0, 10).unwrap(), 0.0, "{kind:?} at f=0");
        }
        assert_eq!(DdFactor::Binary.eval(3, 10).unwrap(), 1.0);
        assert_eq!(DdFactor::Raw.eval(7, 10).unwrap(), 7.0);
        assert!(close(DdFactor::OnePlusLog.eval(1, 10).unwrap(), 1.0));
        assert!(close(
            DdFactor::OnePlusLog.eval(2, 10).unwrap(),
            1.0 + 2.0f64.ln()
        ));
        assert!(close(
            DdFactor::LogOnePlus.eval(1, 10).unwrap(),
            2.0f64.ln()
        ));
        // Frozen reference: ln(1 + 2/10) = 0.182322 (6 d.p.).
        let v = DdFactor::LengthNormalizedLog.eval(2, 10).unwrap();
        assert!((v - 0.182322).abs() < 1e-6);
        assert!(close(v, (1.2f64).ln()));
    }

    #[test]
    fn dd_rejects_zero_length_with_occurrences() {
        assert!(DdFactor::LengthNormalizedLog.eval(2, 0).is_err());
    }

    #[test]
    fn length_normalized_dd_invariant_under_self_concatenation() {
        // f/dl identical => bitwise-equal factor values.
        let once = DdFactor::LengthNormalizedLog.eval(3, 11).unwrap();
        let twice = DdFactor::LengthNormalizedLog.eval(6, 22).unwrap();
        assert_eq!(once.to_bits(), twice.to_bits());
    }

    fn two_doc_corpus() -> SparseCorpus {
        build_corpus(
            &[
                Document::new("d0", ["c"], "b b a"),
                Document::new("d1", Vec::<String>::new(), "b"),
            ],
            &Stopwords::none(),
        )
        .unwrap()
    }

    #[test]
    fn idf_values_and_absent_term_error() {
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        let b = 0usize; // in both docs
        let a = 1usize; // only in d0
        assert!(close(stats.idf(a).unwrap(), 2.0f64.ln()));
        assert!(close(stats.idf(b).unwrap(), 0.0));

        let mut df_stats = stats.clone();
        df_stats.doc_freq[a] = 0;
        assert!(matches!(df_stats.idf(a), Err(Error::TermAbsent { .. })));
        assert!(matches!(df_stats.bm25_idf(a), Err(Error::TermAbsent { .. })));
    }

    #[test]
    fn bm25_idf_goes_negative_for_common_terms() {
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        // b is in 2 of 2 docs: ln(0.5/2.5) < 0, deliberately not clamped.
        assert!(stats.bm25_idf(0).unwrap() < 0.0);
    }

    #[test]
    fn log_tfidf_worked_example() {
        // doc "b b a" with idf(a) = ln 2, idf(b) = 0: the b entries weigh 0
        // and the a entry normalizes to exactly 1.
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        let scheme = WeightingScheme::from_name("LogTFIDF").unwrap();
        let m = scheme.weigh_corpus(&corpus, &stats).unwrap();
        let row = m.row(0);
        assert_eq!(row.len(), 2);
        assert_eq!(row[0].0, 0); // term b
        assert!(close(row[0].1, 0.0));
        assert_eq!(row[1].0, 1); // term a
        assert!(close(row[1].1, 1.0));
    }

    #[test]
    fn cosine_rows_have_unit_norm_or_are_zero() {
        let docs: Vec<Document> = vec![
            Document::new("d0", ["c"], "x x y z z z"),
            Document::new("d1", Vec::<String>::new(), "y z"),
            Document::new("d2", Vec::<String>::new(), ""),
        ];
        let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
        let stats = CorpusStats::unsupervised(&corpus);
        for name in ["Binary", "TF", "LogTF", "TFIDF", "LogTFIDF"] {
            let scheme = WeightingScheme::from_name(name).unwrap();
            let m = scheme.weigh_corpus(&corpus, &stats).unwrap();
            for i in 0..m.n_rows() {
                let norm = m.row_norm(i);
                assert!(
                    norm == 0.0 || (norm - 1.0).abs() < 1e-6,
                    "{name} row {i} norm {norm}"
                );
            }
        }
    }

    #[test]
    fn cd_scale_invariance_under_cosine() {
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        let scheme = WeightingScheme::composed(
            "test",
            DdFactor::LogOnePlus,
            CdFactor::Idf,
            Normalization::Cosine,
        );
        let base = scheme.cd_factor_values(&stats).unwrap();
        let scaled: Vec<f64> = base.iter().map(|v| v * 37.5).collect();
        for d in 0..corpus.n_docs() {
            let a = scheme
                .weigh_document(corpus.row(d), corpus.doc_len(d), &stats, &base)
                .unwrap();
            let b = scheme
                .weigh_document(corpus.row(d), corpus.doc_len(d), &stats, &scaled)
                .unwrap();
            for (&(t1, w1), &(t2, w2)) in a.iter().zip(&b) {
                assert_eq!(t1, t2);
                assert!((w1 - w2).abs() < 1e-9, "scale changed weight: {w1} vs {w2}");
            }
        }
    }

    #[test]
    fn bm25_saturation_bounded_by_k1_plus_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = Bm25Params::default();
        for _ in 0..1000 {
            let f = rng.gen_range(1..200) as f64;
            let dl = rng.gen_range(1..500) as f64;
            let avdl = rng.gen_range(1.0..500.0);
            let sat = ((p.k1 + 1.0) * f) / (p.k1 * ((1.0 - p.b) + p.b * dl / avdl) + f);
            assert!(sat <= p.k1 + 1.0 + 1e-12);
        }
    }

    #[test]
    fn bm25_scheme_applies_whole_formula() {
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        let scheme = WeightingScheme::bm25();
        let m = scheme.weigh_corpus(&corpus, &stats).unwrap();
        // Expected value for term a in d0: f=1, dl=3, avdl=2, n=1, D=2.
        let p = Bm25Params::default();
        let sat = (p.k1 + 1.0) * 1.0 / (p.k1 * ((1.0 - p.b) + p.b * 3.0 / 2.0) + 1.0);
        let idf = ((2.0 - 1.0 + 0.5) / 1.5f64).ln();
        let expected = sat * idf;
        let got = m.row(0).iter().find(|e| e.0 == 1).unwrap().1;
        assert!(close(got, expected));
        // No normalization: the row norm is whatever the formula says.
        assert!((m.row_norm(0) - 1.0).abs() > 1e-6);
    }

    #[test]
    fn supervised_cd_requires_term_stats() {
        let corpus = two_doc_corpus();
        let stats = CorpusStats::unsupervised(&corpus);
        for cd in [CdFactor::ChiSquare, CdFactor::GainRatio, CdFactor::RelevanceFrequency] {
            assert!(matches!(
                cd.eval(0, &stats),
                Err(Error::MissingTermStats)
            ));
        }
        let task = corpus.binary_task("c");
        let sup = CorpusStats::supervised(&corpus, &task).unwrap();
        for cd in [CdFactor::ChiSquare, CdFactor::GainRatio, CdFactor::RelevanceFrequency] {
            assert!(cd.eval(0, &sup).is_ok());
        }
    }

    #[test]
    fn registry_resolves_classical_names_case_insensitively() {
        for name in [
            "Binary", "TF", "LogTF", "TFIDF", "LogTFIDF", "BM25", "TFCHI", "TFGR", "TFRF",
        ] {
            let s = WeightingScheme::from_name(name).unwrap();
            assert_eq!(s.name(), name);
            let lower = WeightingScheme::from_name(&name.to_lowercase()).unwrap();
            assert_eq!(lower.name(), name);
        }
        assert!(WeightingScheme::from_name("LTW-L-I").is_none());
        assert!(WeightingScheme::from_name("nonsense").is_none());
    }

    #[test]
    fn sparse_matrix_validates() {
        assert!(SparseMatrix::new(2, vec![vec![(0, 1.0), (1, 2.0)]]).is_ok());
        assert!(SparseMatrix::new(2, vec![vec![(1, 1.0), (0, 2.0)]]).is_err());
        assert!(SparseMatrix::new(2, vec![vec![(3, 1.0)]]).is_err());
        assert!(SparseMatrix::new(2, vec![vec![(0, f64::NAN)]]).is_err());
    }
}
