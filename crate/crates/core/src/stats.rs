//! Per-term contingency statistics over a binary task, the supervised scoring
//! functions built on them (chi-square, information gain, gain ratio,
//! relevance frequency), and score-driven feature selection.
//!
//! Every score is a function of the four joint probabilities of (term present
//! / absent) x (class positive / negative). Two entry points expose the same
//! formulas: count-based functions on [`ContingencyTable`]s, and `_rates`
//! functions on `(tpr, fpr, Pr(c))` triples used for closed-form surface
//! plots. Presence is binary — a term counts once per document regardless of
//! its frequency. Logarithms are natural unless stated otherwise; gain ratio
//! is a ratio of same-base quantities and therefore base-free.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::corpus::{BinaryTask, SparseCorpus, Vocabulary};
use crate::error::Error;
use crate::Result;

/// Document counts for one term against a binary labelling.
///
/// `tp` = positive documents containing the term, `fp` = negative documents
/// containing it, `fn_` = positive documents missing it, `tn` = negative
/// documents missing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContingencyTable {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ContingencyTable {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ContingencyTable { tp, fp, fn_, tn }
    }

    pub fn d_total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// True positive rate Pr(t|c): fraction of positive documents containing
    /// the term. Requires at least one positive document.
    pub fn tpr(&self) -> f64 {
        self.tp as f64 / self.positives() as f64
    }

    /// False positive rate Pr(t|c̄): fraction of negative documents containing
    /// the term. Requires at least one negative document.
    pub fn fpr(&self) -> f64 {
        self.fp as f64 / (self.fp + self.tn) as f64
    }

    fn joints(&self) -> Joints {
        let d = self.d_total() as f64;
        Joints {
            tc: self.tp as f64 / d,
            t_nc: self.fp as f64 / d,
            nt_c: self.fn_ as f64 / d,
            nt_nc: self.tn as f64 / d,
        }
    }
}

/// The four joint probabilities Pr(t', c') for t' in {t, t̄}, c' in {c, c̄}.
#[derive(Debug, Clone, Copy)]
struct Joints {
    tc: f64,
    t_nc: f64,
    nt_c: f64,
    nt_nc: f64,
}

impl Joints {
    fn from_rates(tpr: f64, fpr: f64, prc: f64) -> Self {
        Joints {
            tc: tpr * prc,
            t_nc: fpr * (1.0 - prc),
            nt_c: (1.0 - tpr) * prc,
            nt_nc: (1.0 - fpr) * (1.0 - prc),
        }
    }

    fn pr_t(&self) -> f64 {
        self.tc + self.t_nc
    }

    fn pr_c(&self) -> f64 {
        self.tc + self.nt_c
    }
}

fn chi_square_core(j: Joints, d_total: f64) -> f64 {
    let (pt, pc) = (j.pr_t(), j.pr_c());
    let (pnt, pnc) = (1.0 - pt, 1.0 - pc);
    let den = pt * pnt * pc * pnc;
    if den == 0.0 {
        // A zero marginal means the term (or class) is constant; the term
        // carries no association signal and scores zero by convention.
        return 0.0;
    }
    let num = j.tc * j.nt_nc - j.nt_c * j.t_nc;
    d_total * num * num / den
}

fn info_gain_core(j: Joints) -> f64 {
    let (pt, pc) = (j.pr_t(), j.pr_c());
    let (pnt, pnc) = (1.0 - pt, 1.0 - pc);
    let mut ig = 0.0;
    for (p, pt_marg, pc_marg) in [
        (j.tc, pt, pc),
        (j.t_nc, pt, pnc),
        (j.nt_c, pnt, pc),
        (j.nt_nc, pnt, pnc),
    ] {
        if p > 0.0 {
            ig += p * (p / (pt_marg * pc_marg)).ln();
        }
    }
    ig
}

fn gain_ratio_core(j: Joints) -> Result<f64> {
    let pc = j.pr_c();
    let pnc = 1.0 - pc;
    if pc <= 0.0 || pnc <= 0.0 {
        return Err(Error::DegeneratePrior { prc: pc });
    }
    // Numerator and denominator share the natural log, so the ratio equals
    // the base-2 version.
    let entropy = -(pc * pc.ln() + pnc * pnc.ln());
    Ok(info_gain_core(j) / entropy)
}

fn relevance_frequency_core(j: Joints, d_total: f64) -> f64 {
    let floor = 1.0 / d_total;
    (2.0 + j.tc / j.t_nc.max(floor)).ln()
}

/// Chi-square association between term presence and the class, scaled by the
/// collection size. Returns 0 when any marginal is degenerate.
pub fn chi_square(ct: &ContingencyTable) -> f64 {
    chi_square_core(ct.joints(), ct.d_total() as f64)
}

/// Information gain (mutual information of term presence and class) in nats.
/// Cells with zero joint probability contribute zero.
pub fn info_gain(ct: &ContingencyTable) -> f64 {
    info_gain_core(ct.joints())
}

/// Information gain normalized by class entropy. Errors when the class prior
/// is 0 or 1 (entropy would be zero).
pub fn gain_ratio(ct: &ContingencyTable) -> Result<f64> {
    gain_ratio_core(ct.joints())
}

/// Relevance frequency `log(2 + Pr(t,c) / max(1/|D|, Pr(t,c̄)))`. The floor on
/// the denominator keeps terms absent from the negative class finite. Always
/// at least `ln 2`.
pub fn relevance_frequency(ct: &ContingencyTable) -> f64 {
    let d = ct.d_total() as f64;
    relevance_frequency_core(ct.joints(), d)
}

/// Chi-square as a closed-form function of `(tpr, fpr, Pr(c))`, scaled by a
/// nominal collection size (use 1.0 for a scale-free surface).
pub fn chi_square_rates(tpr: f64, fpr: f64, prc: f64, d_total: f64) -> f64 {
    chi_square_core(Joints::from_rates(tpr, fpr, prc), d_total)
}

/// Information gain as a function of `(tpr, fpr, Pr(c))`, in nats.
pub fn info_gain_rates(tpr: f64, fpr: f64, prc: f64) -> f64 {
    info_gain_core(Joints::from_rates(tpr, fpr, prc))
}

/// Gain ratio as a function of `(tpr, fpr, Pr(c))`.
pub fn gain_ratio_rates(tpr: f64, fpr: f64, prc: f64) -> Result<f64> {
    gain_ratio_core(Joints::from_rates(tpr, fpr, prc))
}

/// Relevance frequency as a function of `(tpr, fpr, Pr(c))` with an explicit
/// collection size for the denominator floor.
pub fn relevance_frequency_rates(tpr: f64, fpr: f64, prc: f64, d_total: f64) -> f64 {
    relevance_frequency_core(Joints::from_rates(tpr, fpr, prc), d_total)
}

/// Per-term contingency tables for a corpus under a binary task. Presence is
/// counted once per document.
pub fn contingency(corpus: &SparseCorpus, task: &BinaryTask) -> Result<Vec<ContingencyTable>> {
    if task.y.len() != corpus.n_docs() {
        return Err(Error::ArityMismatch {
            expected: corpus.n_docs(),
            got: task.y.len(),
            context: "task labels vs corpus rows",
        });
    }
    let positives = task.positives() as u64;
    let negatives = corpus.n_docs() as u64 - positives;
    let mut tp = vec![0u64; corpus.n_terms()];
    let mut fp = vec![0u64; corpus.n_terms()];
    for d in 0..corpus.n_docs() {
        let target = if task.y[d] { &mut tp } else { &mut fp };
        for &(t, _) in corpus.row(d) {
            target[t as usize] += 1;
        }
    }
    Ok((0..corpus.n_terms())
        .map(|t| ContingencyTable {
            tp: tp[t],
            fp: fp[t],
            fn_: positives - tp[t],
            tn: negatives - fp[t],
        })
        .collect())
}

/// Per-term statistics over a corpus and task: contingency tables plus the
/// `(tpr, fpr)` rates that feed the learned collection factor.
#[derive(Debug, Clone)]
pub struct TermStats {
    class: String,
    d_total: u64,
    positives: u64,
    tables: Vec<ContingencyTable>,
    tpr: Vec<f64>,
    fpr: Vec<f64>,
}

impl TermStats {
    /// Compute statistics for every term. The task must contain at least one
    /// document of each class, otherwise the rates are undefined.
    pub fn compute(corpus: &SparseCorpus, task: &BinaryTask) -> Result<Self> {
        task.require_both_classes()?;
        let tables = contingency(corpus, task)?;
        let tpr = tables.iter().map(ContingencyTable::tpr).collect();
        let fpr = tables.iter().map(ContingencyTable::fpr).collect();
        Ok(TermStats {
            class: task.class.clone(),
            d_total: corpus.n_docs() as u64,
            positives: task.positives() as u64,
            tables,
            tpr,
            fpr,
        })
    }

    pub fn class(&self) -> &str {
        &self.class
    }

    pub fn n_terms(&self) -> usize {
        self.tables.len()
    }

    pub fn d_total(&self) -> u64 {
        self.d_total
    }

    pub fn positives(&self) -> u64 {
        self.positives
    }

    pub fn class_prior(&self) -> f64 {
        self.positives as f64 / self.d_total as f64
    }

    pub fn table(&self, term: usize) -> &ContingencyTable {
        &self.tables[term]
    }

    pub fn tpr(&self, term: usize) -> f64 {
        self.tpr[term]
    }

    pub fn fpr(&self, term: usize) -> f64 {
        self.fpr[term]
    }

    pub fn tpr_slice(&self) -> &[f64] {
        &self.tpr
    }

    pub fn fpr_slice(&self) -> &[f64] {
        &self.fpr
    }
}

/// Keep the `ceil(ratio * len)` highest-scoring indices; ties broken by lower
/// index. Returns the retained indices in ascending order, ready for
/// [`SparseCorpus::project`]. `ratio` must lie in `(0, 1]`; NaN scores are
/// rejected.
pub fn select_features(scores: &[f64], ratio: f64) -> Result<Vec<usize>> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidFraction {
            value: ratio,
            range: "(0, 1]",
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidConfig("NaN feature score".into()));
    }
    let k = (ratio * scores.len() as f64).ceil() as usize;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("NaN excluded above")
            .then(a.cmp(&b))
    });
    let mut kept = order[..k.min(order.len())].to_vec();
    kept.sort_unstable();
    Ok(kept)
}

/// Dump `(term, tpr, fpr, score)` rows as tab-separated text, one per term.
pub fn write_term_scores(
    path: impl AsRef<Path>,
    vocab: &Vocabulary,
    stats: &TermStats,
    scores: &[f64],
) -> Result<()> {
    if scores.len() != vocab.len() || stats.n_terms() != vocab.len() {
        return Err(Error::ArityMismatch {
            expected: vocab.len(),
            got: scores.len().min(stats.n_terms()),
            context: "scores vs vocabulary",
        });
    }
    let mut out = String::from("term\ttpr\tfpr\tscore\n");
    for t in 0..vocab.len() {
        writeln!(
            out,
            "{}\t{:.8e}\t{:.8e}\t{:.8e}",
            vocab.term(t),
            stats.tpr(t),
            stats.fpr(t),
            scores[t]
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}
