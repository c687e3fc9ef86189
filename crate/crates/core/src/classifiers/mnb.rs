//! Multinomial naive Bayes over nonnegative, possibly fractional, feature
//! values.
//!
//! Weighted document vectors are treated as fractional term counts. Some
//! weighting schemes can emit negative entries; those are clamped to zero
//! both when accumulating class counts and when scoring, since multinomial
//! evidence below zero has no meaning. With zero smoothing a never-seen term
//! would have probability zero, so per-term probabilities are floored at
//! 1e-300 before taking logs; an empty class total falls back to the uniform
//! distribution. Score ties go to the negative class.

use crate::error::Error;
use crate::weighting::SparseMatrix;
use crate::Result;

const THETA_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub(crate) struct MnbModel {
    log_prior_pos: f64,
    log_prior_neg: f64,
    log_theta_pos: Vec<f64>,
    log_theta_neg: Vec<f64>,
}

pub(crate) fn train(x: &SparseMatrix, rows: &[usize], y: &[bool], alpha: f64) -> Result<MnbModel> {
    let f = x.n_cols();
    let n_pos = rows.iter().filter(|&&i| y[i]).count();
    let n_neg = rows.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass {
            observed: n_pos,
            total: rows.len(),
        });
    }
    let mut counts_pos = vec![0.0f64; f];
    let mut counts_neg = vec![0.0f64; f];
    let (mut total_pos, mut total_neg) = (0.0f64, 0.0f64);
    for &i in rows {
        let (counts, total) = if y[i] {
            (&mut counts_pos, &mut total_pos)
        } else {
            (&mut counts_neg, &mut total_neg)
        };
        for &(t, v) in x.row(i) {
            let v = v.max(0.0);
            counts[t as usize] += v;
            *total += v;
        }
    }
    let log_theta = |counts: &[f64], total: f64| -> Vec<f64> {
        let denom = total + alpha * f as f64;
        counts
            .iter()
            .map(|&c| {
                let theta = if denom > 0.0 {
                    (c + alpha) / denom
                } else {
                    1.0 / f as f64
                };
                theta.max(THETA_FLOOR).ln()
            })
            .collect()
    };
    Ok(MnbModel {
        log_prior_pos: (n_pos as f64 / rows.len() as f64).ln(),
        log_prior_neg: (n_neg as f64 / rows.len() as f64).ln(),
        log_theta_pos: log_theta(&counts_pos, total_pos),
        log_theta_neg: log_theta(&counts_neg, total_neg),
    })
}

impl MnbModel {
    pub fn predict(&self, row: &[(u32, f64)]) -> bool {
        let mut pos = self.log_prior_pos;
        let mut neg = self.log_prior_neg;
        for &(t, v) in row {
            let v = v.max(0.0);
            pos += v * self.log_theta_pos[t as usize];
            neg += v * self.log_theta_neg[t as usize];
        }
        pos > neg
    }
}
