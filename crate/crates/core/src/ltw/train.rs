//! Mini-batch training of the learned weighting model.
//!
//! The optimizer is Adam in its classic bias-corrected form. Each step draws
//! one shuffled mini-batch (epochs reshuffle; the last batch of an epoch may
//! be short), applies inverted dropout inside the networks, and updates every
//! parameter. A held-out stratified validation split is scored at a fixed
//! step cadence; training stops when the validation loss has not improved by
//! at least `min_delta` for `patience` consecutive validations, or at
//! `max_steps`. The parameters snapshotted at the best validation loss are
//! restored before returning.
//!
//! All randomness — the validation split, epoch shuffles, and dropout masks —
//! comes from one counter-based stream derived from the config seed, so a
//! given (config, corpus, task) triple trains to bitwise-identical
//! parameters every time.

use std::fmt;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{stratified_split_indices, BinaryTask, SparseCorpus};
use crate::error::Error;
use crate::stats::TermStats;
use crate::Result;

use super::net;
use super::{LtwConfig, LtwModel};

/// Why training terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Validation loss failed to improve for the configured patience window.
    EarlyStopped,
    /// The step budget ran out first.
    MaxSteps,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::EarlyStopped => write!(f, "early_stopped"),
            StopReason::MaxSteps => write!(f, "max_steps"),
        }
    }
}

/// One validation checkpoint: mean training loss since the previous
/// checkpoint, and loss/F1 on the held-out split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_f1: f64,
}

/// Validation history of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub rows: Vec<TraceRow>,
    pub stop: StopReason,
    /// Step whose parameters were restored (best validation loss), if any
    /// validation ran.
    pub best_step: Option<usize>,
    pub steps_run: usize,
}

impl TrainingTrace {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let best = match self.best_step {
            Some(s) => s.to_string(),
            None => "-".into(),
        };
        writeln!(
            w,
            "# stop={} best_step={} steps={}",
            self.stop, best, self.steps_run
        )?;
        writeln!(w, "step\ttrain_loss\tval_loss\tval_f1")?;
        for r in &self.rows {
            writeln!(
                w,
                "{}\t{:.8e}\t{:.8e}\t{:.8e}",
                r.step, r.train_loss, r.val_loss, r.val_f1
            )?;
        }
        Ok(())
    }
}

/// Train a weighting model for `task` on `corpus`.
///
/// The supervised input table (per-term true/false positive rates) is
/// computed once from the full corpus and stays fixed; only network
/// parameters move. Returns the trained model and its validation trace.
pub fn train(
    config: LtwConfig,
    corpus: &SparseCorpus,
    task: &BinaryTask,
) -> Result<(LtwModel, TrainingTrace)> {
    config.validate()?;
    if task.len() != corpus.n_docs() {
        return Err(Error::LengthMismatch {
            a: corpus.n_docs(),
            b: task.len(),
        });
    }
    if corpus.n_terms() == 0 {
        return Err(Error::EmptyCorpus);
    }
    task.require_both_classes()?;

    let stats = TermStats::compute(corpus, task)?;
    let mut model = LtwModel::new(config.clone(), &stats, corpus.vocab().fingerprint())?;
    let table_fp = model.table_fingerprint();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1); // stream 0 initialized the parameters
    let split_seed = rng.gen::<u64>();
    let (kept, held) =
        stratified_split_indices(corpus.n_docs(), Some(&task.y), config.validation_fraction, split_seed)?;
    let val_y: Vec<bool> = held.iter().map(|&r| task.y[r]).collect();

    let mut adam_m = model.params.zeros_like();
    let mut adam_v = model.params.zeros_like();
    let mut step = 0usize;
    let mut order = kept.clone();

    let mut best_val = f64::INFINITY;
    let mut best_step = None;
    let mut best_params: Option<net::ParamSet> = None;
    let mut bad_validations = 0usize;
    let mut recent_sum = 0.0;
    let mut recent_n = 0usize;
    let mut rows = Vec::new();
    let stop;

    'training: loop {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let batch_y: Vec<bool> = batch.iter().map(|&r| task.y[r]).collect();
            let out =
                net::evaluate_batch(&model, corpus, batch, &batch_y, Some(&mut rng), true)?;
            let grads = out.grads.expect("training step requested gradients");
            step += 1;
            adam_update(&mut model, &grads, &mut adam_m, &mut adam_v, &config, step);
            recent_sum += out.loss;
            recent_n += 1;

            if step % config.validation_every == 0 {
                let val = net::evaluate_batch(&model, corpus, &held, &val_y, None, false)?;
                let pred: Vec<bool> = val.predictions.iter().map(|&p| p > 0.5).collect();
                let (tp, fp, fn_) = crate::eval::confusion(&pred, &val_y)?;
                rows.push(TraceRow {
                    step,
                    train_loss: recent_sum / recent_n as f64,
                    val_loss: val.loss,
                    val_f1: crate::eval::f1(tp, fp, fn_),
                });
                recent_sum = 0.0;
                recent_n = 0;

                if val.loss < best_val - config.min_delta {
                    best_val = val.loss;
                    best_step = Some(step);
                    best_params = Some(model.params.clone());
                    bad_validations = 0;
                } else {
                    bad_validations += 1;
                    if bad_validations >= config.patience {
                        stop = StopReason::EarlyStopped;
                        break 'training;
                    }
                }
            }
            if step >= config.max_steps {
                stop = StopReason::MaxSteps;
                break 'training;
            }
        }
    }

    if let Some(p) = best_params {
        model.params = p;
    }
    assert_eq!(
        table_fp,
        model.table_fingerprint(),
        "the supervised input table must stay fixed across training"
    );

    let trace = TrainingTrace {
        rows,
        stop,
        best_step,
        steps_run: step,
    };
    Ok((model, trace))
}

fn adam_update(
    model: &mut LtwModel,
    grads: &net::ParamSet,
    m: &mut net::ParamSet,
    v: &mut net::ParamSet,
    config: &LtwConfig,
    step: usize,
) {
    let (b1, b2) = (config.beta1, config.beta2);
    let lr = config.learning_rate;
    let eps = config.epsilon;
    let bias1 = 1.0 - b1.powi(step as i32);
    let bias2 = 1.0 - b2.powi(step as i32);
    for (ti, gt) in grads.tensors.iter().enumerate() {
        let pt = &mut model.params.tensors[ti].data;
        let mt = &mut m.tensors[ti].data;
        let vt = &mut v.tensors[ti].data;
        for k in 0..gt.data.len() {
            let g = gt.data[k];
            mt[k] = b1 * mt[k] + (1.0 - b1) * g;
            vt[k] = b2 * vt[k] + (1.0 - b2) * g * g;
            let m_hat = mt[k] / bias1;
            let v_hat = vt[k] / bias2;
            pt[k] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
