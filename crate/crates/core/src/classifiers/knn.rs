//! k-nearest-neighbor classification with optional supervised feature
//! selection.
//!
//! Distances are Euclidean over the sparse weighted vectors (squared
//! distances are compared, which preserves the ordering). Neighbors are
//! ordered by distance with row index as the tie-breaker, and the majority
//! label of the k nearest wins; an exact vote tie goes to the negative
//! class. When a feature budget is set, features are ranked by the
//! chi-square association between a feature's presence (a stored nonzero
//! entry) and the label, computed on the training rows only, and both
//! training and query vectors are projected onto the winners.

use crate::error::Error;
use crate::stats::{chi_square, ContingencyTable};
use crate::weighting::SparseMatrix;
use crate::Result;

#[derive(Debug, Clone)]
pub(crate) struct KnnModel {
    k: usize,
    /// Ascending feature ids when selection is active.
    selected: Option<Vec<u32>>,
    rows: Vec<Vec<(u32, f64)>>,
    y: Vec<bool>,
}

pub(crate) fn build(
    x: &SparseMatrix,
    rows_idx: &[usize],
    y: &[bool],
    k: usize,
    features: Option<usize>,
) -> Result<KnnModel> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let f = x.n_cols();
    let selected = match features {
        Some(m) if m < f => Some(top_features(x, rows_idx, y, m)),
        _ => None,
    };
    let rows = rows_idx
        .iter()
        .map(|&i| project(x.row(i), selected.as_deref()))
        .collect();
    let labels = rows_idx.iter().map(|&i| y[i]).collect();
    Ok(KnnModel {
        k,
        selected,
        rows,
        y: labels,
    })
}

/// Top `m` features by presence/label chi-square; ties prefer the lower
/// feature id. Returned ascending.
fn top_features(x: &SparseMatrix, rows_idx: &[usize], y: &[bool], m: usize) -> Vec<u32> {
    let f = x.n_cols();
    let positives = rows_idx.iter().filter(|&&i| y[i]).count() as u64;
    let negatives = rows_idx.len() as u64 - positives;
    let mut present_pos = vec![0u64; f];
    let mut present_neg = vec![0u64; f];
    for &i in rows_idx {
        let target = if y[i] {
            &mut present_pos
        } else {
            &mut present_neg
        };
        for &(t, v) in x.row(i) {
            if v != 0.0 {
                target[t as usize] += 1;
            }
        }
    }
    let mut scored: Vec<(f64, u32)> = (0..f)
        .map(|t| {
            let table = ContingencyTable::new(
                present_pos[t],
                present_neg[t],
                positives - present_pos[t],
                negatives - present_neg[t],
            );
            (chi_square(&table), t as u32)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut keep: Vec<u32> = scored[..m].iter().map(|&(_, t)| t).collect();
    keep.sort_unstable();
    keep
}

/// Restrict a sparse row to the selected (ascending) feature ids.
fn project(row: &[(u32, f64)], selected: Option<&[u32]>) -> Vec<(u32, f64)> {
    match selected {
        None => row.to_vec(),
        Some(sel) => {
            let mut out = Vec::new();
            let (mut i, mut j) = (0usize, 0usize);
            while i < row.len() && j < sel.len() {
                match row[i].0.cmp(&sel[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        out.push(row[i]);
                        i += 1;
                        j += 1;
                    }
                }
            }
            out
        }
    }
}

/// Squared Euclidean distance between two ascending sparse rows.
fn sq_dist(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j) = (0usize, 0usize);
    let mut acc = 0.0;
    while i < a.len() || j < b.len() {
        let d = match (a.get(i), b.get(j)) {
            (Some(&(ta, va)), Some(&(tb, vb))) => match ta.cmp(&tb) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    va
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    vb
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    va - vb
                }
            },
            (Some(&(_, va)), None) => {
                i += 1;
                va
            }
            (None, Some(&(_, vb))) => {
                j += 1;
                vb
            }
            (None, None) => unreachable!(),
        };
        acc += d * d;
    }
    acc
}

impl KnnModel {
    pub fn predict(&self, row: &[(u32, f64)]) -> bool {
        let query = project(row, self.selected.as_deref());
        let mut dists: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (sq_dist(&query, r), i))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let k_used = self.k.min(dists.len());
        let votes_pos = dists[..k_used].iter().filter(|&&(_, i)| self.y[i]).count();
        2 * votes_pos > k_used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<(u32, f64)>>, f: usize) -> SparseMatrix {
        SparseMatrix::new(f, rows).unwrap()
    }

    #[test]
    fn nearest_neighbor_wins_at_k1() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(0, 5.0)]], 1);
        let y = [false, true];
        let m = build(&x, &[0, 1], &y, 1, None).unwrap();
        assert!(!m.predict(&[(0, 1.5)]));
        assert!(m.predict(&[(0, 4.0)]));
    }

    #[test]
    fn equidistant_neighbors_prefer_lower_row_index() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(0, 3.0)]], 1);
        let m_neg_first = build(&x, &[0, 1], &[false, true], 1, None).unwrap();
        assert!(!m_neg_first.predict(&[(0, 2.0)]));
        let m_pos_first = build(&x, &[0, 1], &[true, false], 1, None).unwrap();
        assert!(m_pos_first.predict(&[(0, 2.0)]));
    }

    #[test]
    fn vote_tie_goes_negative() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(0, 3.0)]], 1);
        let y = [true, false];
        let m = build(&x, &[0, 1], &y, 2, None).unwrap();
        // Both neighbors are used; one vote each.
        assert!(!m.predict(&[(0, 2.0)]));
    }

    #[test]
    fn supervised_selection_discards_a_misleading_feature() {
        // Feature 0 carries the class perfectly; feature 1 is everywhere and
        // dominates raw distances.
        let x = matrix(
            vec![
                vec![(0, 1.0), (1, 14.0)],
                vec![(0, 1.0), (1, -6.0)],
                vec![(1, 9.2)],
                vec![(1, -2.0)],
            ],
            2,
        );
        let y = [true, true, false, false];
        let rows: Vec<usize> = (0..4).collect();
        let query = [(0u32, 1.0), (1u32, 9.0)];

        let plain = build(&x, &rows, &y, 1, None).unwrap();
        assert!(!plain.predict(&query), "raw distance should mislead here");

        let selected = build(&x, &rows, &y, 1, Some(1)).unwrap();
        assert_eq!(selected.selected.as_deref(), Some(&[0u32][..]));
        assert!(selected.predict(&query));
    }

    #[test]
    fn budget_at_or_above_width_means_no_selection() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(1, 1.0)]], 2);
        let y = [true, false];
        let m = build(&x, &[0, 1], &y, 1, Some(2)).unwrap();
        assert!(m.selected.is_none());
        let m = build(&x, &[0, 1], &y, 1, Some(50)).unwrap();
        assert!(m.selected.is_none());
    }

    #[test]
    fn zero_k_is_rejected() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(1, 1.0)]], 2);
        assert!(build(&x, &[0, 1], &[true, false], 0, None).is_err());
    }
}
