//! Binary F1 evaluation, micro/macro aggregation across classes, and a
//! paired Wilcoxon signed-rank test.
//!
//! The signed-rank test is exact for up to 25 nonzero pairs: zero differences
//! are dropped, tied magnitudes receive average ranks, and the null
//! distribution of the positive-rank sum is enumerated by dynamic programming
//! over doubled ranks (doubling keeps average ranks integral). Beyond 25
//! pairs it switches to the normal approximation with the tie-corrected
//! variance and a 0.5 continuity correction. Reported p-values are two-sided.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Binary F1 from confusion counts: `2TP / (2TP + FP + FN)`.
///
/// When all three counts are zero there were no positives anywhere and none
/// predicted; that is a perfect outcome, so the value is 1.
pub fn f1(tp: u64, fp: u64, fn_: u64) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        1.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Confusion counts of predicted vs true binary labels: `(tp, fp, fn)`.
pub fn confusion(pred: &[bool], truth: &[bool]) -> Result<(u64, u64, u64)> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            a: pred.len(),
            b: truth.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok((tp, fp, fn_))
}

/// Per-class test outcome: confusion counts and the class F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassOutcome {
    pub class: String,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub f1: f64,
}

impl ClassOutcome {
    pub fn from_counts(class: impl Into<String>, tp: u64, fp: u64, fn_: u64) -> Self {
        ClassOutcome {
            class: class.into(),
            tp,
            fp,
            fn_,
            f1: f1(tp, fp, fn_),
        }
    }

    pub fn from_predictions(
        class: impl Into<String>,
        pred: &[bool],
        truth: &[bool],
    ) -> Result<Self> {
        let (tp, fp, fn_) = confusion(pred, truth)?;
        Ok(Self::from_counts(class, tp, fp, fn_))
    }
}

/// Micro/macro aggregation over per-class outcomes. Micro-F1 pools the
/// confusion counts before computing F1; macro-F1 averages the per-class F1
/// values with equal class weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub outcomes: Vec<ClassOutcome>,
    pub micro_f1: f64,
    pub macro_f1: f64,
}

impl EvalReport {
    pub fn aggregate(outcomes: Vec<ClassOutcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidConfig(
                "cannot aggregate zero class outcomes".into(),
            ));
        }
        let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
        let mut f1_sum = 0.0;
        for o in &outcomes {
            tp += o.tp;
            fp += o.fp;
            fn_ += o.fn_;
            f1_sum += o.f1;
        }
        Ok(EvalReport {
            micro_f1: f1(tp, fp, fn_),
            macro_f1: f1_sum / outcomes.len() as f64,
            outcomes,
        })
    }
}

/// Result of a two-sided paired Wilcoxon signed-rank test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonTest {
    /// Pairs remaining after zero differences were dropped.
    pub n_used: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`, the conventional reported statistic.
    pub statistic: f64,
    pub p_value: f64,
    /// Whether the exact enumeration (rather than the normal approximation)
    /// produced the p-value.
    pub exact: bool,
    /// All differences were zero: the sequences are identical pairwise and no
    /// test can be run; `p_value` is reported as 1.
    pub degenerate: bool,
}

impl WilcoxonTest {
    pub fn significant(&self, alpha: f64) -> bool {
        !self.degenerate && self.p_value <= alpha
    }
}

const EXACT_LIMIT: usize = 25;
const MIN_PAIRS: usize = 5;

/// Two-sided paired Wilcoxon signed-rank test of `a` against `b`.
///
/// Errors if the slices differ in length or if fewer than 5 nonzero
/// differences remain (too few pairs for the test to ever reject at 0.05).
/// Identical sequences (all differences zero) return a degenerate result
/// rather than an error.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonTest {
            n_used: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            statistic: 0.0,
            p_value: 1.0,
            exact: true,
            degenerate: true,
        });
    }
    if n < MIN_PAIRS {
        return Err(Error::InsufficientPairs {
            needed: MIN_PAIRS,
            got: n,
        });
    }

    // Rank |d| ascending; ties get average ranks. Doubling every rank keeps
    // the arithmetic integral: a tie-averaged rank is always a multiple of
    // one half.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).unwrap());
    let mut dranks = vec![0u64; n]; // doubled ranks, in `diffs` order
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && diffs[order[j]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Positions i+1 ..= j (1-based) share the rank (i+1 + j) / 2, i.e. a
        // doubled rank of i + 1 + j.
        let doubled = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            dranks[k] = doubled;
        }
        tie_sizes.push((j - i) as u64);
        i = j;
    }

    let w2_plus: u64 = diffs
        .iter()
        .zip(&dranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, &r)| r)
        .sum();
    let w2_total = (n * (n + 1)) as u64;
    let w_plus = w2_plus as f64 / 2.0;
    let w_minus = (w2_total - w2_plus) as f64 / 2.0;

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_two_sided_p(&dranks, w2_plus), true)
    } else {
        match approx_two_sided_p(n, &tie_sizes, w_plus.min(w_minus)) {
            Some(p) => (p, false),
            None => (1.0, false), // zero variance: every assignment ties
        }
    };

    Ok(WilcoxonTest {
        n_used: n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        exact,
        degenerate: false,
    })
}

/// Exact two-sided p over all `2^n` sign assignments of the observed ranks:
/// `min(1, 2 * min(P(W+ <= w), P(W+ >= w)))`, computed by counting subsets
/// of the doubled ranks at each doubled sum.
fn exact_two_sided_p(dranks: &[u64], w2_plus: u64) -> f64 {
    let total: u64 = dranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    for &r in dranks {
        let r = r as usize;
        for s in (r..counts.len()).rev() {
            counts[s] += counts[s - r];
        }
    }
    let assignments = 2f64.powi(dranks.len() as i32);
    let le: u64 = counts[..=w2_plus as usize].iter().sum();
    let ge: u64 = counts[w2_plus as usize..].iter().sum();
    (2.0 * (le.min(ge) as f64) / assignments).min(1.0)
}

/// Normal approximation with tie-corrected variance and continuity
/// correction, applied to the smaller rank sum. `None` when the variance
/// degenerates to zero.
fn approx_two_sided_p(n: usize, tie_sizes: &[u64], w_min: f64) -> Option<f64> {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            (t * t * t - t) / 48.0
        })
        .sum();
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    if variance <= 0.0 {
        return None;
    }
    let z = (w_min - mean + 0.5) / variance.sqrt();
    Some((2.0 * normal_cdf(z)).min(1.0))
}

/// Standard normal CDF via the five-term Hastings polynomial (absolute error
/// below 7.5e-8).
pub fn normal_cdf(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - normal_cdf(-x);
    }
    let t = 1.0 / (1.0 + 0.2316419 * x);
    let poly = t
        * (0.319381530
            + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - pdf * poly
}

/// Labeled grid of pre-formatted cells, for result matrices (one row per
/// weighting scheme, one column per learner).
#[derive(Debug, Clone)]
pub struct Grid {
    corner: String,
    col_labels: Vec<String>,
    rows: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn new(corner: impl Into<String>, col_labels: Vec<String>) -> Self {
        Grid {
            corner: corner.into(),
            col_labels,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, label: impl Into<String>, cells: Vec<String>) {
        assert_eq!(
            cells.len(),
            self.col_labels.len(),
            "grid row width must match the header"
        );
        self.rows.push((label.into(), cells));
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.corner);
        for c in &self.col_labels {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (label, cells) in &self.rows {
            out.push_str(label);
            for c in cells {
                out.push('\t');
                out.push_str(c);
            }
            out.push('\n');
        }
        out
    }

    /// Space-aligned rendering for terminals and logs.
    pub fn to_aligned(&self) -> String {
        let ncols = self.col_labels.len() + 1;
        let mut widths = vec![0usize; ncols];
        let consider = |widths: &mut Vec<usize>, col: usize, s: &str| {
            widths[col] = widths[col].max(s.chars().count());
        };
        consider(&mut widths, 0, &self.corner);
        for (i, c) in self.col_labels.iter().enumerate() {
            consider(&mut widths, i + 1, c);
        }
        for (label, cells) in &self.rows {
            consider(&mut widths, 0, label);
            for (i, c) in cells.iter().enumerate() {
                consider(&mut widths, i + 1, c);
            }
        }
        let mut out = String::new();
        let emit = |out: &mut String, cells: Vec<&str>| {
            for (i, s) in cells.iter().enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(s);
                let pad = widths[i].saturating_sub(s.chars().count());
                if i + 1 < ncols {
                    out.extend(std::iter::repeat(' ').take(pad));
                }
            }
            out.push('\n');
        };
        let mut header: Vec<&str> = vec![&self.corner];
        header.extend(self.col_labels.iter().map(|s| s.as_str()));
        emit(&mut out, header);
        for (label, cells) in &self.rows {
            let mut row: Vec<&str> = vec![label];
            row.extend(cells.iter().map(|s| s.as_str()));
            emit(&mut out, row);
        }
        out
    }
}
