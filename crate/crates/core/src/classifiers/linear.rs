//! Shared stochastic-gradient engine for the linear models.
//!
//! Logistic regression and the linear SVM differ only in their loss, so one
//! engine serves both: the loss is pluggable (log-loss, hinge, squared
//! hinge). L2 regularization uses the weight-scaling trick so each update
//! touches only a row's nonzeros; L1 uses the cumulative-penalty method,
//! which applies each feature's owed penalty lazily at its next touch and
//! settles all remaining debt once training ends. The step size follows
//! `eta_t = eta0 / (1 + eta0*lambda*t)` with `lambda = 1/(C*n)` and `t`
//! starting at 1, which keeps `eta*lambda < 1` for every step. The bias is
//! never regularized.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::weighting::SparseMatrix;

use super::Penalty;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Loss {
    Logistic,
    Hinge,
    SquaredHinge,
}

#[derive(Debug, Clone)]
pub(crate) struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn score(&self, row: &[(u32, f64)]) -> f64 {
        let mut s = self.bias;
        for &(t, v) in row {
            s += self.weights[t as usize] * v;
        }
        s
    }

    /// Positive iff the margin is strictly positive (for logistic scores
    /// this is exactly "probability above one half").
    pub fn predict(&self, row: &[(u32, f64)]) -> bool {
        self.score(row) > 0.0
    }

    #[cfg(test)]
    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Train on the subset `rows` of `x`. `y` is indexed by row id, not by
/// position in `rows`. `c` is the inverse regularization strength.
pub(crate) fn train(
    x: &SparseMatrix,
    rows: &[usize],
    y: &[bool],
    loss: Loss,
    penalty: Penalty,
    c: f64,
    epochs: usize,
    seed: u64,
) -> LinearModel {
    let n = rows.len().max(1);
    let lambda = 1.0 / (c * n as f64);
    let eta0 = 1.0;
    let f = x.n_cols();
    let mut w = vec![0.0; f];
    let mut bias = 0.0;
    let mut scale = 1.0; // L2: true weights are scale * w
    let mut u = 0.0; // L1: total penalty owed per always-active unit weight
    let mut q = vec![0.0; f]; // L1: penalty already applied, signed
    let mut order = rows.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 1u64;

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = eta0 / (1.0 + eta0 * lambda * t as f64);
            let row = x.row(i);
            let yi = if y[i] { 1.0 } else { -1.0 };
            let mut dot = 0.0;
            for &(j, v) in row {
                dot += w[j as usize] * v;
            }
            let s = match penalty {
                Penalty::L2 => scale * dot,
                Penalty::L1 => dot,
            } + bias;
            let m = yi * s;
            // g is -dloss/dmargin, so the update direction is +y*g*x.
            let g = match loss {
                Loss::Logistic => sigmoid(-m),
                Loss::Hinge => {
                    if m < 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                Loss::SquaredHinge => {
                    if m < 1.0 {
                        2.0 * (1.0 - m)
                    } else {
                        0.0
                    }
                }
            };
            match penalty {
                Penalty::L2 => {
                    scale *= 1.0 - eta * lambda;
                    if g != 0.0 {
                        let step = eta * g * yi / scale;
                        for &(j, v) in row {
                            w[j as usize] += step * v;
                        }
                        bias += eta * g * yi;
                    }
                    if scale < 1e-9 {
                        for wj in &mut w {
                            *wj *= scale;
                        }
                        scale = 1.0;
                    }
                }
                Penalty::L1 => {
                    u += eta * lambda;
                    if g != 0.0 {
                        let step = eta * g * yi;
                        for &(j, v) in row {
                            w[j as usize] += step * v;
                        }
                        bias += eta * g * yi;
                    }
                    for &(j, _) in row {
                        apply_cumulative(&mut w[j as usize], &mut q[j as usize], u);
                    }
                }
            }
            t += 1;
        }
    }

    match penalty {
        Penalty::L2 => {
            for wj in &mut w {
                *wj *= scale;
            }
        }
        Penalty::L1 => {
            for j in 0..f {
                apply_cumulative(&mut w[j], &mut q[j], u);
            }
        }
    }
    LinearModel { weights: w, bias }
}

/// One lazy L1 application: clip the weight toward zero by the penalty it
/// still owes (`u` owed in total, `q` already applied, signed).
fn apply_cumulative(w: &mut f64, q: &mut f64, u: f64) {
    let z = *w;
    if z > 0.0 {
        *w = (z - (u + *q)).max(0.0);
    } else if z < 0.0 {
        *w = (z + (u - *q)).min(0.0);
    }
    *q += *w - z;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Rows whose class is carried by features 0 (positive) and 1
    /// (negative), plus a shared noise feature.
    fn separable() -> (SparseMatrix, Vec<bool>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..10 {
            let v = 1.0 + (i % 3) as f64 * 0.25;
            rows.push(vec![(0u32, v), (2u32, 0.5)]);
            y.push(true);
            rows.push(vec![(1u32, v), (2u32, 0.6)]);
            y.push(false);
        }
        (SparseMatrix::new(3, rows).unwrap(), y)
    }

    #[test]
    fn every_loss_separates_separable_data() {
        let (x, y) = separable();
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        for loss in [Loss::Logistic, Loss::Hinge, Loss::SquaredHinge] {
            let model = train(&x, &rows, &y, loss, Penalty::L2, 10.0, 20, 42);
            for (i, &truth) in y.iter().enumerate() {
                assert_eq!(model.predict(x.row(i)), truth, "{loss:?} row {i}");
            }
        }
    }

    #[test]
    fn l1_is_sparser_than_l2_with_noise_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = 40;
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..60 {
            let pos = i % 2 == 0;
            let mut row = vec![(0u32, if pos { 1.0 } else { -1.0 })];
            for j in 1..f {
                if rng.gen_bool(0.3) {
                    row.push((j as u32, rng.gen_range(-0.5..0.5)));
                }
            }
            rows.push(row);
            y.push(pos);
        }
        let x = SparseMatrix::new(f, rows).unwrap();
        let all: Vec<usize> = (0..x.n_rows()).collect();
        let l2 = train(&x, &all, &y, Loss::Logistic, Penalty::L2, 0.1, 15, 7);
        let l1 = train(&x, &all, &y, Loss::Logistic, Penalty::L1, 0.1, 15, 7);
        assert!(
            l1.nonzero_weights() < l2.nonzero_weights(),
            "L1 kept {} nonzeros, L2 {}",
            l1.nonzero_weights(),
            l2.nonzero_weights()
        );
        // Both must still find the signal feature.
        assert!(l1.weights[0] > 0.0);
        assert!(l2.weights[0] > 0.0);
    }

    /// Regularized log-loss objective the SGD routine is meant to minimize.
    fn logistic_objective(
        x: &SparseMatrix,
        y: &[bool],
        w: &[f64],
        bias: f64,
        lambda: f64,
    ) -> f64 {
        let mut total = 0.0;
        for i in 0..x.n_rows() {
            let yi = if y[i] { 1.0 } else { -1.0 };
            let mut s = bias;
            for &(j, v) in x.row(i) {
                s += w[j as usize] * v;
            }
            let a = -yi * s;
            total += a.max(0.0) + (-a.abs()).exp().ln_1p(); // ln(1 + e^a)
        }
        let norm_sq: f64 = w.iter().map(|v| v * v).sum();
        total / x.n_rows() as f64 + 0.5 * lambda * norm_sq
    }

    fn logistic_gradient(
        x: &SparseMatrix,
        y: &[bool],
        w: &[f64],
        bias: f64,
        lambda: f64,
    ) -> (Vec<f64>, f64) {
        let n = x.n_rows() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| lambda * v).collect();
        let mut gb = 0.0;
        for i in 0..x.n_rows() {
            let yi = if y[i] { 1.0 } else { -1.0 };
            let mut s = bias;
            for &(j, v) in x.row(i) {
                s += w[j as usize] * v;
            }
            let coeff = -yi * sigmoid(-yi * s) / n;
            for &(j, v) in x.row(i) {
                gw[j as usize] += coeff * v;
            }
            gb += coeff;
        }
        (gw, gb)
    }

    #[test]
    fn full_batch_descent_is_monotone_and_sgd_lands_nearby() {
        // The convexity of the shared objective gives an independent check
        // on the SGD route: exact gradient descent with a halving line
        // search must decrease the loss monotonically, and the SGD solution
        // must end up with a comparable objective value.
        let (x, y) = separable();
        let c = 1.0;
        let lambda = 1.0 / (c * x.n_rows() as f64);
        let mut w = vec![0.0; x.n_cols()];
        let mut bias = 0.0;
        let mut obj = logistic_objective(&x, &y, &w, bias, lambda);
        let initial = obj;
        for _ in 0..200 {
            let (gw, gb) = logistic_gradient(&x, &y, &w, bias, lambda);
            let mut step = 4.0;
            loop {
                let wt: Vec<f64> = w.iter().zip(&gw).map(|(a, g)| a - step * g).collect();
                let bt = bias - step * gb;
                let cand = logistic_objective(&x, &y, &wt, bt, lambda);
                if cand <= obj || step < 1e-12 {
                    assert!(cand <= obj + 1e-12, "line search failed to descend");
                    w = wt;
                    bias = bt;
                    obj = cand;
                    break;
                }
                step *= 0.5;
            }
        }
        assert!(obj < initial);

        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let sgd = train(&x, &rows, &y, Loss::Logistic, Penalty::L2, c, 60, 5);
        let sgd_obj = logistic_objective(&x, &y, &sgd.weights, sgd.bias, lambda);
        assert!(
            sgd_obj <= obj * 1.15 + 1e-6,
            "SGD objective {sgd_obj} vs full-batch {obj}"
        );
    }

    #[test]
    fn training_is_seed_deterministic() {
        let (x, y) = separable();
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let a = train(&x, &rows, &y, Loss::Hinge, Penalty::L2, 1.0, 10, 9);
        let b = train(&x, &rows, &y, Loss::Hinge, Penalty::L2, 1.0, 10, 9);
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
        for (wa, wb) in a.weights.iter().zip(&b.weights) {
            assert_eq!(wa.to_bits(), wb.to_bits());
        }
        let c = train(&x, &rows, &y, Loss::Hinge, Penalty::L2, 1.0, 10, 10);
        assert!(a.weights.iter().zip(&c.weights).any(|(p, q)| p != q));
    }

    #[test]
    fn extreme_regularization_stays_finite() {
        let (x, y) = separable();
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        for c in [1e-4, 1e4] {
            for penalty in [Penalty::L2, Penalty::L1] {
                let m = train(&x, &rows, &y, Loss::Logistic, penalty, c, 10, 1);
                assert!(m.bias.is_finite());
                assert!(m.weights.iter().all(|w| w.is_finite()));
            }
        }
    }
}
