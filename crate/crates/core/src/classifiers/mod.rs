//! Downstream learners and deterministic model selection.
//!
//! Four learner families consume weighted document matrices: logistic
//! regression and a linear SVM (one shared stochastic-gradient engine),
//! multinomial naive Bayes, and k-nearest neighbors. [`fit`] runs a
//! hyperparameter grid search: it holds out a stratified validation split,
//! scores every candidate on it by F1, picks the winner — on ties the
//! earliest candidate in grid order — and retrains that winner on all rows.
//! Every random choice (the split, SGD shuffles) derives from the policy
//! seed, so fitting is reproducible bit for bit.

mod knn;
mod linear;
mod mnb;

use crate::corpus::stratified_split_indices;
use crate::error::Error;
use crate::eval;
use crate::hash::Fnv1a;
use crate::weighting::SparseMatrix;
use crate::Result;

use linear::Loss;

/// The learner families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LearnerKind {
    Lr,
    Svm,
    Mnb,
    Knn,
}

impl LearnerKind {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::Lr => "LR",
            LearnerKind::Svm => "SVM",
            LearnerKind::Mnb => "MNB",
            LearnerKind::Knn => "KNN",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "lr" | "logistic" => Some(LearnerKind::Lr),
            "svm" => Some(LearnerKind::Svm),
            "mnb" | "nb" => Some(LearnerKind::Mnb),
            "knn" => Some(LearnerKind::Knn),
            _ => None,
        }
    }

    pub fn all() -> [LearnerKind; 4] {
        [
            LearnerKind::Lr,
            LearnerKind::Svm,
            LearnerKind::Mnb,
            LearnerKind::Knn,
        ]
    }
}

/// Regularization penalty for the linear models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Penalty {
    L2,
    L1,
}

impl Penalty {
    pub fn name(&self) -> &'static str {
        match self {
            Penalty::L2 => "l2",
            Penalty::L1 => "l1",
        }
    }
}

/// Hinge variant for the SVM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvmLoss {
    Hinge,
    SquaredHinge,
}

impl SvmLoss {
    pub fn name(&self) -> &'static str {
        match self {
            SvmLoss::Hinge => "hinge",
            SvmLoss::SquaredHinge => "squared_hinge",
        }
    }
}

/// A learner family plus its hyperparameter grid. [`LearnerSpec::new`] fills
/// in the default grids; fields are public so callers can narrow them.
#[derive(Debug, Clone)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    /// Inverse regularization strengths for LR and SVM.
    pub c_grid: Vec<f64>,
    pub lr_penalties: Vec<Penalty>,
    pub svm_losses: Vec<SvmLoss>,
    /// Smoothing values for naive Bayes.
    pub alpha_grid: Vec<f64>,
    /// Neighbor counts for KNN.
    pub k_grid: Vec<usize>,
    /// Feature budgets for KNN's supervised selection; "no selection" is
    /// always tried first, and budgets at or above the matrix width are
    /// skipped as equivalent to it.
    pub knn_feature_grid: Vec<usize>,
    /// SGD epochs for the linear models.
    pub epochs: usize,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        LearnerSpec {
            kind,
            c_grid: (-4..=4).map(|e| 10f64.powi(e)).collect(),
            lr_penalties: vec![Penalty::L2, Penalty::L1],
            svm_losses: vec![SvmLoss::Hinge, SvmLoss::SquaredHinge],
            alpha_grid: vec![0.0, 0.001, 0.01, 0.05, 0.1, 1.0],
            k_grid: vec![1, 3, 5, 15, 30],
            knn_feature_grid: vec![25, 50, 100, 250, 500],
            epochs: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Error::InvalidConfig(msg);
        match self.kind {
            LearnerKind::Lr | LearnerKind::Svm => {
                if self.c_grid.is_empty() {
                    return Err(bad("empty C grid".into()));
                }
                if self.c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
                    return Err(bad("C values must be positive and finite".into()));
                }
                if self.epochs == 0 {
                    return Err(bad("epochs must be at least 1".into()));
                }
                if self.kind == LearnerKind::Lr && self.lr_penalties.is_empty() {
                    return Err(bad("empty penalty grid".into()));
                }
                if self.kind == LearnerKind::Svm && self.svm_losses.is_empty() {
                    return Err(bad("empty SVM loss grid".into()));
                }
            }
            LearnerKind::Mnb => {
                if self.alpha_grid.is_empty() {
                    return Err(bad("empty alpha grid".into()));
                }
                if self.alpha_grid.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
                    return Err(bad("alpha values must be nonnegative and finite".into()));
                }
            }
            LearnerKind::Knn => {
                if self.k_grid.is_empty() {
                    return Err(bad("empty k grid".into()));
                }
                if self.k_grid.iter().any(|&k| k == 0) {
                    return Err(bad("k must be at least 1".into()));
                }
                if self.knn_feature_grid.iter().any(|&m| m == 0) {
                    return Err(bad("feature budgets must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Grid candidates in their fixed search order.
    fn candidates(&self, n_features: usize) -> Vec<Candidate> {
        let mut out = Vec::new();
        match self.kind {
            LearnerKind::Lr => {
                for &penalty in &self.lr_penalties {
                    for &c in &self.c_grid {
                        out.push(Candidate::Linear {
                            loss: Loss::Logistic,
                            penalty,
                            c,
                        });
                    }
                }
            }
            LearnerKind::Svm => {
                for &loss in &self.svm_losses {
                    for &c in &self.c_grid {
                        out.push(Candidate::Linear {
                            loss: match loss {
                                SvmLoss::Hinge => Loss::Hinge,
                                SvmLoss::SquaredHinge => Loss::SquaredHinge,
                            },
                            penalty: Penalty::L2,
                            c,
                        });
                    }
                }
            }
            LearnerKind::Mnb => {
                for &alpha in &self.alpha_grid {
                    out.push(Candidate::Mnb { alpha });
                }
            }
            LearnerKind::Knn => {
                for &k in &self.k_grid {
                    out.push(Candidate::Knn { k, features: None });
                    let mut seen = Vec::new();
                    for &m in &self.knn_feature_grid {
                        if m < n_features && !seen.contains(&m) {
                            seen.push(m);
                            out.push(Candidate::Knn {
                                k,
                                features: Some(m),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// How the grid search holds out validation data.
#[derive(Debug, Clone, Copy)]
pub struct ValidationPolicy {
    pub fraction: f64,
    pub seed: u64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        ValidationPolicy {
            fraction: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
enum Candidate {
    Linear { loss: Loss, penalty: Penalty, c: f64 },
    Mnb { alpha: f64 },
    Knn { k: usize, features: Option<usize> },
}

impl Candidate {
    fn describe(&self) -> String {
        match self {
            Candidate::Linear {
                loss: Loss::Logistic,
                penalty,
                c,
            } => format!("C={c:e},penalty={}", penalty.name()),
            Candidate::Linear { loss, c, .. } => {
                let name = match loss {
                    Loss::Hinge => "hinge",
                    Loss::SquaredHinge => "squared_hinge",
                    Loss::Logistic => unreachable!(),
                };
                format!("C={c:e},loss={name}")
            }
            Candidate::Mnb { alpha } => format!("alpha={alpha}"),
            Candidate::Knn { k, features: None } => format!("k={k},features=all"),
            Candidate::Knn {
                k,
                features: Some(m),
            } => format!("k={k},features={m}"),
        }
    }
}

#[derive(Debug, Clone)]
enum FittedModel {
    Linear(linear::LinearModel),
    Mnb(mnb::MnbModel),
    Knn(knn::KnnModel),
}

impl FittedModel {
    fn predict_row(&self, row: &[(u32, f64)]) -> bool {
        match self {
            FittedModel::Linear(m) => m.predict(row),
            FittedModel::Mnb(m) => m.predict(row),
            FittedModel::Knn(m) => m.predict(row),
        }
    }
}

/// A grid-search winner retrained on the full training matrix.
#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    kind: LearnerKind,
    chosen: String,
    validation_f1: f64,
    n_features: usize,
    model: FittedModel,
}

impl TrainedClassifier {
    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    /// Human-readable description of the winning hyperparameters.
    pub fn chosen(&self) -> &str {
        &self.chosen
    }

    /// F1 the winner scored on the held-out validation split.
    pub fn validation_f1(&self) -> f64 {
        self.validation_f1
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: &SparseMatrix) -> Result<Vec<bool>> {
        if x.n_cols() != self.n_features {
            return Err(Error::ArityMismatch {
                expected: self.n_features,
                got: x.n_cols(),
                context: "prediction matrix width",
            });
        }
        Ok((0..x.n_rows())
            .map(|i| self.model.predict_row(x.row(i)))
            .collect())
    }

    pub fn predict_row(&self, row: &[(u32, f64)]) -> Result<bool> {
        if let Some(&(t, _)) = row.iter().find(|&&(t, _)| t as usize >= self.n_features) {
            return Err(Error::ArityMismatch {
                expected: self.n_features,
                got: t as usize,
                context: "row feature index",
            });
        }
        Ok(self.model.predict_row(row))
    }

    /// Bias and nonzero weights of a linear model as text, one `feature
    /// weight` pair per line. `None` for the nonlinear learners.
    pub fn linear_export(&self) -> Option<String> {
        let FittedModel::Linear(m) = &self.model else {
            return None;
        };
        let mut out = format!("bias {:.8e}\n", m.bias);
        for (t, &w) in m.weights.iter().enumerate() {
            if w != 0.0 {
                out.push_str(&format!("{t} {w:.8e}\n"));
            }
        }
        Some(out)
    }
}

fn derive_seed(seed: u64, candidate: usize, phase: u64) -> u64 {
    Fnv1a::new()
        .write_u64(seed)
        .write_u64(candidate as u64)
        .write_u64(phase)
        .finish()
}

fn train_candidate(
    cand: &Candidate,
    x: &SparseMatrix,
    rows: &[usize],
    y: &[bool],
    seed: u64,
    spec: &LearnerSpec,
) -> Result<FittedModel> {
    Ok(match cand {
        Candidate::Linear { loss, penalty, c } => FittedModel::Linear(linear::train(
            x,
            rows,
            y,
            *loss,
            *penalty,
            *c,
            spec.epochs,
            seed,
        )),
        Candidate::Mnb { alpha } => FittedModel::Mnb(mnb::train(x, rows, y, *alpha)?),
        Candidate::Knn { k, features } => FittedModel::Knn(knn::build(x, rows, y, *k, *features)?),
    })
}

/// Grid-search, select, and retrain one learner on a weighted matrix.
///
/// Requires at least two rows of each class so the stratified split can put
/// both classes on both sides.
pub fn fit(
    spec: &LearnerSpec,
    x: &SparseMatrix,
    y: &[bool],
    policy: &ValidationPolicy,
) -> Result<TrainedClassifier> {
    spec.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            a: x.n_rows(),
            b: y.len(),
        });
    }
    let n = y.len();
    let positives = y.iter().filter(|&&b| b).count();
    let negatives = n - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass {
            observed: positives,
            total: n,
        });
    }
    if positives < 2 || negatives < 2 {
        return Err(Error::DegenerateTask {
            class: "<binary>".into(),
            positives,
            total: n,
        });
    }
    if !(policy.fraction > 0.0 && policy.fraction < 1.0) {
        return Err(Error::InvalidFraction {
            value: policy.fraction,
            range: "(0, 1)",
        });
    }

    let (train_idx, val_idx) = stratified_split_indices(n, Some(y), policy.fraction, policy.seed)?;
    let val_truth: Vec<bool> = val_idx.iter().map(|&i| y[i]).collect();
    let candidates = spec.candidates(x.n_cols());

    let mut best: Option<(f64, usize)> = None;
    for (ci, cand) in candidates.iter().enumerate() {
        let model = train_candidate(cand, x, &train_idx, y, derive_seed(policy.seed, ci, 0), spec)?;
        let pred: Vec<bool> = val_idx.iter().map(|&i| model.predict_row(x.row(i))).collect();
        let (tp, fp, fn_) = eval::confusion(&pred, &val_truth)?;
        let score = eval::f1(tp, fp, fn_);
        if best.map_or(true, |(b, _)| score > b) {
            best = Some((score, ci));
        }
    }
    let (validation_f1, ci) = best.expect("grids are validated non-empty");

    let all: Vec<usize> = (0..n).collect();
    let model = train_candidate(&candidates[ci], x, &all, y, derive_seed(policy.seed, ci, 1), spec)?;
    Ok(TrainedClassifier {
        kind: spec.kind,
        chosen: candidates[ci].describe(),
        validation_f1,
        n_features: x.n_cols(),
        model,
    })
}
