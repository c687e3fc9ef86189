//! Corpus ingestion: tokenization, vocabulary construction, sparse count
//! matrices, binary labellings, and seeded stratified splits.
//!
//! Tokenization is deliberately plain: lowercase, split on non-letter
//! boundaries, drop stopwords, no stemming. Every downstream quantity (document
//! frequency, contingency counts, document length) is derived from the sparse
//! count rows built here, so the invariants enforced by
//! [`SparseCorpus::from_parts`] — strictly increasing indices, counts >= 1,
//! stored length equal to the sum of counts — are what the rest of the crate
//! leans on.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::hash::Fnv1a;
use crate::Result;

static ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// A set of tokens removed during tokenization.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// Empty set: keep every token.
    pub fn none() -> Self {
        Stopwords(HashSet::new())
    }

    /// The bundled English list (318 function words).
    pub fn english() -> Self {
        Self::from_words(ENGLISH_STOPWORDS.lines())
    }

    /// Build from arbitrary words; entries are lowercased.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stopwords(
            words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Lowercase unigram tokenization: split on any non-letter character, drop
/// empty fragments and stopwords. No stemming is applied.
///
/// `tokenize("U.S. trade, trade!", &Stopwords::english())` yields
/// `["u", "s", "trade", "trade"]`.
pub fn tokenize(text: &str, stopwords: &Stopwords) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}

/// A raw input document: external id, label set, and text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub labels: BTreeSet<String>,
    pub text: String,
}

impl Document {
    pub fn new<I, S>(id: impl Into<String>, labels: I, text: impl Into<String>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Document {
            id: id.into(),
            labels: labels.into_iter().map(Into::into).collect(),
            text: text.into(),
        }
    }
}

/// Bijection between term strings and dense indices `0..len`.
///
/// Order is first appearance in the corpus the vocabulary was fitted on; index
/// order doubles as the deterministic tie-breaker wherever scores are ranked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Build from an ordered term list. Terms must be distinct.
    pub fn from_terms<I, S>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate term {t:?}")));
            }
        }
        Ok(Vocabulary { terms, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn index_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Stable content fingerprint, stored in model checkpoints so a checkpoint
    /// cannot silently be applied to a different vocabulary.
    pub fn fingerprint(&self) -> u64 {
        self.terms
            .iter()
            .fold(Fnv1a::new(), |h, t| h.write_str(t))
            .finish()
    }
}

/// Sparse document-term count matrix plus per-document metadata.
///
/// Rows store `(term index, count)` pairs with strictly increasing indices and
/// counts >= 1; absent terms are implicit zeros. `doc_len` is the total number
/// of token occurrences the row represents and always equals the sum of its
/// counts.
#[derive(Debug, Clone)]
pub struct SparseCorpus {
    vocab: Arc<Vocabulary>,
    ids: Vec<String>,
    labels: Vec<BTreeSet<String>>,
    rows: Vec<Vec<(u32, u32)>>,
    doc_len: Vec<u32>,
    avdl: f64,
}

impl SparseCorpus {
    /// Assemble a corpus from pre-built rows, validating every invariant.
    pub fn from_parts(
        vocab: Arc<Vocabulary>,
        ids: Vec<String>,
        labels: Vec<BTreeSet<String>>,
        rows: Vec<Vec<(u32, u32)>>,
    ) -> Result<Self> {
        if ids.len() != rows.len() || labels.len() != rows.len() {
            return Err(Error::ArityMismatch {
                expected: rows.len(),
                got: ids.len().min(labels.len()),
                context: "corpus ids/labels/rows",
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateDocumentId(id.clone()));
            }
        }
        let n_terms = vocab.len() as u32;
        let mut doc_len = Vec::with_capacity(rows.len());
        for (doc, row) in rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            let mut dl: u64 = 0;
            for &(t, c) in row {
                if t >= n_terms {
                    return Err(Error::ArityMismatch {
                        expected: n_terms as usize,
                        got: t as usize,
                        context: "row term index",
                    });
                }
                if prev.map_or(false, |p| p >= t) {
                    return Err(Error::Parse {
                        file: String::new(),
                        line: doc,
                        message: "row indices not strictly increasing".into(),
                    });
                }
                if c == 0 {
                    return Err(Error::Parse {
                        file: String::new(),
                        line: doc,
                        message: "explicit zero count".into(),
                    });
                }
                prev = Some(t);
                dl += u64::from(c);
            }
            doc_len.push(u32::try_from(dl).expect("document length overflows u32"));
        }
        let avdl = if doc_len.is_empty() {
            0.0
        } else {
            doc_len.iter().map(|&d| d as f64).sum::<f64>() / doc_len.len() as f64
        };
        Ok(SparseCorpus {
            vocab,
            ids,
            labels,
            rows,
            doc_len,
            avdl,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn id(&self, doc: usize) -> &str {
        &self.ids[doc]
    }

    pub fn labels(&self, doc: usize) -> &BTreeSet<String> {
        &self.labels[doc]
    }

    pub fn row(&self, doc: usize) -> &[(u32, u32)] {
        &self.rows[doc]
    }

    pub fn doc_len(&self, doc: usize) -> u32 {
        self.doc_len[doc]
    }

    /// Mean document length over the corpus (0 for an empty corpus).
    pub fn avdl(&self) -> f64 {
        self.avdl
    }

    /// Every distinct label appearing on any document, sorted.
    pub fn classes(&self) -> BTreeSet<String> {
        let mut all = BTreeSet::new();
        for l in &self.labels {
            all.extend(l.iter().cloned());
        }
        all
    }

    /// Number of documents containing each term at least once.
    pub fn document_frequency(&self) -> Vec<u32> {
        let mut df = vec![0u32; self.n_terms()];
        for row in &self.rows {
            for &(t, _) in row {
                df[t as usize] += 1;
            }
        }
        df
    }

    /// One-vs-rest labelling for `class`: y[d] = 1 iff `class` appears among
    /// document d's labels.
    pub fn binary_task(&self, class: &str) -> BinaryTask {
        BinaryTask {
            class: class.to_owned(),
            y: self.labels.iter().map(|l| l.contains(class)).collect(),
        }
    }

    /// Row subset in the given order, sharing the vocabulary.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let ids = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let rows: Vec<_> = indices.iter().map(|&i| self.rows[i].clone()).collect();
        SparseCorpus::from_parts(Arc::clone(&self.vocab), ids, labels, rows)
            .expect("subset of a valid corpus is valid")
    }

    /// Deterministic train/validation split.
    ///
    /// Validation gets `round(fraction * n_docs)` rows (clamped so both sides
    /// stay non-empty). When a task is supplied the split is stratified: the
    /// validation set receives `round(fraction * positives)` positive rows,
    /// adjusted only when the negative pool cannot cover the remainder. Row
    /// order within each side follows the original corpus order.
    pub fn split_validation(
        &self,
        fraction: f64,
        seed: u64,
        task: Option<&BinaryTask>,
    ) -> Result<(Self, Self)> {
        if let Some(t) = task {
            if t.y.len() != self.n_docs() {
                return Err(Error::ArityMismatch {
                    expected: self.n_docs(),
                    got: t.y.len(),
                    context: "task labels vs corpus rows",
                });
            }
        }
        let (train_idx, val_idx) =
            stratified_split_indices(self.n_docs(), task.map(|t| t.y.as_slice()), fraction, seed)?;
        Ok((self.subset(&train_idx), self.subset(&val_idx)))
    }

    /// Restrict the corpus to `retained` term indices (strictly ascending).
    /// Indices are remapped to `0..retained.len()`; document lengths and the
    /// average length are recomputed from the surviving counts so the length
    /// invariant keeps holding in the reduced space.
    pub fn project(&self, retained: &[usize]) -> Result<Self> {
        let n = self.n_terms();
        for w in retained.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidConfig(
                    "projection indices must be strictly ascending".into(),
                ));
            }
        }
        if let Some(&last) = retained.last() {
            if last >= n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: last,
                    context: "projection index",
                });
            }
        }
        let mut remap = vec![u32::MAX; n];
        for (new, &old) in retained.iter().enumerate() {
            remap[old] = new as u32;
        }
        let vocab = Arc::new(
            Vocabulary::from_terms(retained.iter().map(|&i| self.vocab.term(i)))
                .expect("projected terms are distinct"),
        );
        let rows: Vec<Vec<(u32, u32)>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter_map(|&(t, c)| {
                        let nt = remap[t as usize];
                        (nt != u32::MAX).then_some((nt, c))
                    })
                    .collect()
            })
            .collect();
        SparseCorpus::from_parts(vocab, self.ids.clone(), self.labels.clone(), rows)
    }
}

/// A binary (one-vs-rest) labelling over a corpus's rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTask {
    pub class: String,
    pub y: Vec<bool>,
}

impl BinaryTask {
    pub fn new(class: impl Into<String>, y: Vec<bool>) -> Self {
        BinaryTask {
            class: class.into(),
            y,
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&b| b).count()
    }

    /// Error unless both classes are represented.
    pub fn require_both_classes(&self) -> Result<()> {
        let p = self.positives();
        if p == 0 || p == self.y.len() {
            return Err(Error::DegenerateTask {
                class: self.class.clone(),
                positives: p,
                total: self.y.len(),
            });
        }
        Ok(())
    }
}

/// Tokenize `docs` and build a corpus with a vocabulary fitted on them
/// (first-appearance order). Duplicate document ids are rejected.
pub fn build_corpus(docs: &[Document], stopwords: &Stopwords) -> Result<SparseCorpus> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut terms: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut rows = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for tok in tokenize(&doc.text, stopwords) {
            let next = terms.len() as u32;
            let t = *index.entry(tok.clone()).or_insert_with(|| {
                terms.push(tok);
                next
            });
            *counts.entry(t).or_insert(0) += 1;
        }
        rows.push(counts.into_iter().collect::<Vec<_>>());
    }
    let vocab = Arc::new(Vocabulary::from_terms(terms)?);
    SparseCorpus::from_parts(
        vocab,
        docs.iter().map(|d| d.id.clone()).collect(),
        docs.iter().map(|d| d.labels.clone()).collect(),
        rows,
    )
}

/// Tokenize `docs` against an existing vocabulary; out-of-vocabulary tokens
/// are dropped. This is how test documents are represented: the vocabulary is
/// fitted on training data only.
pub fn corpus_with_vocabulary(
    docs: &[Document],
    vocab: Arc<Vocabulary>,
    stopwords: &Stopwords,
) -> Result<SparseCorpus> {
    let mut rows = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for tok in tokenize(&doc.text, stopwords) {
            if let Some(t) = vocab.index_of(&tok) {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        rows.push(counts.into_iter().collect::<Vec<_>>());
    }
    SparseCorpus::from_parts(
        vocab,
        docs.iter().map(|d| d.id.clone()).collect(),
        docs.iter().map(|d| d.labels.clone()).collect(),
        rows,
    )
}

/// Seeded (optionally stratified) index split shared by corpus splitting, the
/// trainer's early-stopping holdout, and classifier grid search.
///
/// Returns `(kept, held_out)` index lists, each sorted ascending. The held-out
/// side receives `round(fraction * n)` rows, clamped to `[1, n-1]`; under
/// stratification the positive quota is `round(fraction * positives)`, nudged
/// into feasibility when one stratum is too small to honour it.
pub fn stratified_split_indices(
    n: usize,
    positives: Option<&[bool]>,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidFraction {
            value: fraction,
            range: "(0, 1)",
        });
    }
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "cannot split {n} rows into two non-empty parts"
        )));
    }
    if let Some(y) = positives {
        if y.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: y.len(),
                context: "labels vs rows",
            });
        }
    }
    let held_total = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut held: Vec<usize> = Vec::with_capacity(held_total);
    match positives {
        None => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            held.extend_from_slice(&idx[..held_total]);
        }
        Some(y) => {
            let mut pos: Vec<usize> = (0..n).filter(|&i| y[i]).collect();
            let mut neg: Vec<usize> = (0..n).filter(|&i| !y[i]).collect();
            let quota = (fraction * pos.len() as f64).round() as usize;
            // Feasibility: the negative stratum must supply the remainder.
            let lo = held_total.saturating_sub(neg.len());
            let held_pos = quota.clamp(lo, pos.len().min(held_total));
            let held_neg = held_total - held_pos;
            pos.shuffle(&mut rng);
            neg.shuffle(&mut rng);
            held.extend_from_slice(&pos[..held_pos]);
            held.extend_from_slice(&neg[..held_neg]);
        }
    }
    held.sort_unstable();
    let held_set: HashSet<usize> = held.iter().copied().collect();
    let kept: Vec<usize> = (0..n).filter(|i| !held_set.contains(i)).collect();
    Ok((kept, held))
}
