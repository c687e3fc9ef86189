//! Tensors, initialization, and the exact forward/backward passes.
//!
//! Gradients here are analytic and complete: they flow through the auxiliary
//! logistic unit, the L2 normalization (full Jacobian, not a stop-gradient),
//! the collection branch, and — when enabled — the learned document-term
//! branch. ReLU uses subgradient 0 at exactly 0. Dropout is inverted (kept
//! activations scaled by 1/keep at training time); the backward pass recovers
//! each unit's mask-and-scale factor as `dropped/pre` so masks never need to
//! be stored.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SparseCorpus;
use crate::error::Error;
use crate::Result;

use super::{LtwConfig, LtwModel, LtwVariant};

/// Row-major dense tensor. Vectors are stored as a single row, scalars as
/// 1 x 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn uniform(rows: usize, cols: usize, limit: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-limit..limit))
            .collect();
        Tensor { rows, cols, data }
    }
}

// Tensor order inside a parameter set. The collection branch comes first,
// then the auxiliary unit, then the optional document-term branch.
pub(crate) const W1: usize = 0;
pub(crate) const B1: usize = 1;
pub(crate) const W2: usize = 2;
pub(crate) const B2: usize = 3;
pub(crate) const W3: usize = 4;
pub(crate) const B3: usize = 5;
pub(crate) const W4: usize = 6;
pub(crate) const B4: usize = 7;
pub(crate) const W5: usize = 8;
pub(crate) const B5: usize = 9;

/// Tensor shapes implied by a config and vocabulary size. Weight matrices are
/// stored input-dim x output-dim, so fan-in is always the row count.
pub(crate) fn expected_shapes(config: &LtwConfig, n_terms: usize) -> Vec<(usize, usize)> {
    let f = n_terms;
    let h = config.hidden_units(f);
    let mut shapes = match config.variant {
        LtwVariant::Local => vec![(2, h), (1, h), (h, 1), (1, 1)],
        LtwVariant::Global => vec![(2 * f, h), (1, h), (h, f), (1, f)],
    };
    shapes.push((f, 1)); // auxiliary weights
    shapes.push((1, 1)); // auxiliary bias
    if config.learn_dd {
        let hd = config.hidden_dd;
        shapes.extend([(1, hd), (1, hd), (hd, 1), (1, 1)]);
    }
    shapes
}

/// All parameters of a model, in the fixed tensor order above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct ParamSet {
    pub tensors: Vec<Tensor>,
}

impl ParamSet {
    /// Fan-in-scaled symmetric uniform weights (limit `1/sqrt(rows)`), zero
    /// biases. Draw order is tensor order, row-major within each tensor.
    pub fn init(config: &LtwConfig, n_terms: usize, rng: &mut impl Rng) -> Self {
        let shapes = expected_shapes(config, n_terms);
        let tensors = shapes
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| {
                if matches!(i, W1 | W2 | W3 | W4 | W5) {
                    Tensor::uniform(r, c, 1.0 / (r as f64).sqrt(), rng)
                } else {
                    Tensor::zeros(r, c)
                }
            })
            .collect();
        ParamSet { tensors }
    }

    pub fn zeros_like(&self) -> Self {
        ParamSet {
            tensors: self
                .tensors
                .iter()
                .map(|t| Tensor::zeros(t.rows, t.cols))
                .collect(),
        }
    }

    pub fn flat_len(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn flat_get(&self, mut i: usize) -> f64 {
        for t in &self.tensors {
            if i < t.data.len() {
                return t.data[i];
            }
            i -= t.data.len();
        }
        panic!("flat parameter index out of range");
    }

    pub fn flat_set(&mut self, mut i: usize, v: f64) {
        for t in &mut self.tensors {
            if i < t.data.len() {
                t.data[i] = v;
                return;
            }
            i -= t.data.len();
        }
        panic!("flat parameter index out of range");
    }
}

/// Gradients of the mean batch loss, one entry per parameter, in the same
/// flat order as [`LtwModel::param_get`].
#[derive(Debug, Clone)]
pub struct Gradients(pub(crate) ParamSet);

impl Gradients {
    pub fn flat_len(&self) -> usize {
        self.0.flat_len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0.flat_get(i)
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Numerically stable binary cross-entropy of a logit against a 0/1 target.
#[inline]
fn cross_entropy(z: f64, y: f64) -> f64 {
    z.max(0.0) - z * y + (-z.abs()).exp().ln_1p()
}

/// Inverted-dropout scaling of one activation. Draws exactly one Bernoulli
/// per unit so the RNG stream advances deterministically.
#[inline]
fn drop_scale(a: f64, keep: f64, rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(keep) {
        a / keep
    } else {
        0.0
    }
}

/// Activations of the collection branch kept for the backward pass: `a` holds
/// post-ReLU values, `hd` the same after dropout (equal outside training).
/// For the local variant, activations cover only the terms in `terms`
/// (ascending), block `i` belonging to `terms[i]`; scores of uncovered terms
/// stay zero and must not be read. The global variant always covers
/// everything and leaves `terms` empty.
struct CdBuffers {
    terms: Vec<u32>,
    a: Vec<f64>,
    hd: Vec<f64>,
    cd: Vec<f64>,
}

/// `needed`: ascending term ids whose scores the caller will use, or `None`
/// for all terms. Restricting the set keeps a training step proportional to
/// the batch's vocabulary rather than the whole table's.
fn forward_cd(
    model: &LtwModel,
    needed: Option<&[u32]>,
    mut rng: Option<&mut dyn FnMut(f64) -> f64>,
) -> CdBuffers {
    let f = model.n_terms();
    let h = model.config.hidden_units(f);
    let p = &model.params.tensors;
    let (w1, b1, w2, b2) = (&p[W1], &p[B1], &p[W2], &p[B2]);
    match model.config.variant {
        LtwVariant::Local => {
            let terms: Vec<u32> = match needed {
                Some(list) => list.to_vec(),
                None => (0..f as u32).collect(),
            };
            let mut a = vec![0.0; terms.len() * h];
            let mut hd = vec![0.0; terms.len() * h];
            let mut cd = vec![0.0; f];
            for (bi, &tu) in terms.iter().enumerate() {
                let t = tu as usize;
                let (tpr, fpr) = (model.table_tpr[t], model.table_fpr[t]);
                let base = bi * h;
                for j in 0..h {
                    let q = tpr * w1.data[j] + fpr * w1.data[h + j] + b1.data[j];
                    let av = q.max(0.0);
                    a[base + j] = av;
                    hd[base + j] = match rng.as_mut() {
                        Some(draw) => draw(av),
                        None => av,
                    };
                }
                let mut s = b2.data[0];
                for j in 0..h {
                    s += hd[base + j] * w2.data[j];
                }
                cd[t] = model.config.head.apply(s);
            }
            CdBuffers { terms, a, hd, cd }
        }
        LtwVariant::Global => {
            let mut q = b1.data.clone();
            for t in 0..f {
                for (xi, row) in [(model.table_tpr[t], 2 * t), (model.table_fpr[t], 2 * t + 1)] {
                    if xi != 0.0 {
                        let base = row * h;
                        for j in 0..h {
                            q[j] += xi * w1.data[base + j];
                        }
                    }
                }
            }
            let a: Vec<f64> = q.iter().map(|&v| v.max(0.0)).collect();
            let hd: Vec<f64> = a
                .iter()
                .map(|&av| match rng.as_mut() {
                    Some(draw) => draw(av),
                    None => av,
                })
                .collect();
            let mut pre2 = b2.data.clone();
            for j in 0..h {
                let hv = hd[j];
                if hv != 0.0 {
                    let base = j * f;
                    for t in 0..f {
                        pre2[t] += hv * w2.data[base + t];
                    }
                }
            }
            let cd = pre2.iter().map(|&s| model.config.head.apply(s)).collect();
            CdBuffers {
                terms: Vec::new(),
                a,
                hd,
                cd,
            }
        }
    }
}

/// Collection scores in inference mode (no dropout).
pub(crate) fn cd_forward_inference(model: &LtwModel) -> Vec<f64> {
    forward_cd(model, None, None).cd
}

/// Local-variant score at an arbitrary rate pair.
pub(crate) fn local_cd_at(model: &LtwModel, tpr: f64, fpr: f64) -> f64 {
    let f = model.n_terms();
    let h = model.config.hidden_units(f);
    let p = &model.params.tensors;
    let (w1, b1, w2, b2) = (&p[W1], &p[B1], &p[W2], &p[B2]);
    let mut s = b2.data[0];
    for j in 0..h {
        let q = tpr * w1.data[j] + fpr * w1.data[h + j] + b1.data[j];
        if q > 0.0 {
            s += q * w2.data[j];
        }
    }
    model.config.head.apply(s)
}

/// Activations of the learned document-term branch for one (frequency) input.
struct PairBuffers {
    u: f64,
    a4: Vec<f64>,
    hd4: Vec<f64>,
    pre5: f64,
    dd: f64,
}

fn forward_dd_pair(
    model: &LtwModel,
    f_td: u32,
    mut rng: Option<&mut dyn FnMut(f64) -> f64>,
) -> PairBuffers {
    let hd_units = model.config.hidden_dd;
    let p = &model.params.tensors;
    let (w4, b4, w5, b5) = (&p[W4], &p[B4], &p[W5], &p[B5]);
    let u = f_td as f64;
    let mut a4 = vec![0.0; hd_units];
    let mut hd4 = vec![0.0; hd_units];
    for j in 0..hd_units {
        let q = u * w4.data[j] + b4.data[j];
        let av = q.max(0.0);
        a4[j] = av;
        hd4[j] = match rng.as_mut() {
            Some(draw) => draw(av),
            None => av,
        };
    }
    let mut pre5 = b5.data[0];
    for j in 0..hd_units {
        pre5 += hd4[j] * w5.data[j];
    }
    PairBuffers {
        u,
        a4,
        hd4,
        pre5,
        dd: pre5.max(0.0),
    }
}

/// Learned document-term factor in inference mode. Zero frequency is forced
/// to zero so sparsity survives regardless of the net's bias terms.
pub(crate) fn dd_forward_inference(model: &LtwModel, f_td: u32) -> f64 {
    if f_td == 0 {
        return 0.0;
    }
    forward_dd_pair(model, f_td, None).dd
}

/// Weight one count row and run the auxiliary unit (inference mode).
pub(crate) fn lw_forward(
    model: &LtwModel,
    row: &[(u32, u32)],
    dl: u32,
) -> Result<(Vec<(u32, f64)>, f64)> {
    let cd = cd_forward_inference(model);
    for &(t, _) in row {
        if t as usize >= cd.len() {
            return Err(Error::ArityMismatch {
                expected: cd.len(),
                got: t as usize,
                context: "row term index vs model arity",
            });
        }
    }
    let dd_vals = fixed_or_learned_dd(model, row, dl, 0)?;
    let mut entries: Vec<(u32, f64)> = row
        .iter()
        .zip(&dd_vals)
        .map(|(&(t, _), &ddv)| (t, ddv * cd[t as usize]))
        .collect();
    let norm_sq: f64 = entries.iter().map(|&(_, w)| w * w).sum();
    if norm_sq > 0.0 {
        let inv = 1.0 / norm_sq.sqrt();
        for e in &mut entries {
            e.1 *= inv;
        }
    }
    let p = &model.params.tensors;
    let mut z = p[B3].data[0];
    for &(t, w) in &entries {
        z += w * p[W3].data[t as usize];
    }
    Ok((entries, sigmoid(z)))
}

fn fixed_or_learned_dd(
    model: &LtwModel,
    row: &[(u32, u32)],
    dl: u32,
    doc: usize,
) -> Result<Vec<f64>> {
    if model.config.learn_dd {
        return Ok(row
            .iter()
            .map(|&(_, f)| forward_dd_pair(model, f, None).dd)
            .collect());
    }
    row.iter()
        .map(|&(_, f)| {
            if f > 0 && dl == 0 {
                return Err(Error::ZeroLengthDocument { doc });
            }
            Ok(if f == 0 {
                0.0
            } else {
                (1.0 + f as f64 / dl as f64).ln()
            })
        })
        .collect()
}

pub(crate) struct EvalOutput {
    pub loss: f64,
    pub predictions: Vec<f64>,
    pub grads: Option<ParamSet>,
}

/// Mean cross-entropy of a batch of corpus rows, optionally with dropout (by
/// passing a training RNG) and/or analytic gradients of the mean loss.
pub(crate) fn evaluate_batch(
    model: &LtwModel,
    corpus: &SparseCorpus,
    rows: &[usize],
    y: &[bool],
    dropout_rng: Option<&mut rand_chacha::ChaCha8Rng>,
    want_grads: bool,
) -> Result<EvalOutput> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("empty batch".into()));
    }
    if rows.len() != y.len() {
        return Err(Error::ArityMismatch {
            expected: rows.len(),
            got: y.len(),
            context: "batch rows vs labels",
        });
    }
    if corpus.n_terms() != model.n_terms() {
        return Err(Error::ArityMismatch {
            expected: model.n_terms(),
            got: corpus.n_terms(),
            context: "corpus vs model vocabulary",
        });
    }
    if let Some(&bad) = rows.iter().find(|&&r| r >= corpus.n_docs()) {
        return Err(Error::ArityMismatch {
            expected: corpus.n_docs(),
            got: bad,
            context: "batch row index",
        });
    }

    let f = model.n_terms();
    let keep = 1.0 - model.config.dropout;
    // One closure owns the RNG; passing it down keeps the draw order fixed:
    // collection branch first, then document-term pairs in batch order.
    let active = dropout_rng.is_some() && keep < 1.0;
    let mut rng = dropout_rng;
    let mut draw = |a: f64| -> f64 {
        match rng.as_mut() {
            Some(r) => drop_scale(a, keep, &mut **r),
            None => a,
        }
    };

    let needed: Vec<u32> = {
        let mut v: Vec<u32> = rows
            .iter()
            .flat_map(|&r| corpus.row(r).iter().map(|&(t, _)| t))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let cdbuf = forward_cd(model, Some(&needed), active.then_some(&mut draw as _));

    let p = &model.params.tensors;
    let w3 = &p[W3];
    let b3v = p[B3].data[0];
    let inv_b = 1.0 / rows.len() as f64;

    let mut grads = want_grads.then(|| model.params.zeros_like());
    let mut dcd = vec![0.0; f];
    let mut loss = 0.0;
    let mut predictions = Vec::with_capacity(rows.len());

    for (bi, &r) in rows.iter().enumerate() {
        let row = corpus.row(r);
        let dl = corpus.doc_len(r);

        // Document-term factors, keeping branch activations when learned.
        let mut pair_bufs: Vec<PairBuffers> = Vec::new();
        let dd_vals: Vec<f64> = if model.config.learn_dd {
            pair_bufs = row
                .iter()
                .map(|&(_, fc)| forward_dd_pair(model, fc, active.then_some(&mut draw as _)))
                .collect();
            pair_bufs.iter().map(|b| b.dd).collect()
        } else {
            fixed_or_learned_dd(model, row, dl, r)?
        };

        let u: Vec<f64> = row
            .iter()
            .zip(&dd_vals)
            .map(|(&(t, _), &ddv)| ddv * cdbuf.cd[t as usize])
            .collect();
        let s_sq: f64 = u.iter().map(|v| v * v).sum();
        let inv_norm = if s_sq > 0.0 { 1.0 / s_sq.sqrt() } else { 0.0 };
        let l: Vec<f64> = u.iter().map(|v| v * inv_norm).collect();

        let mut z = b3v;
        for (k, &(t, _)) in row.iter().enumerate() {
            z += l[k] * w3.data[t as usize];
        }
        let yv = if y[bi] { 1.0 } else { 0.0 };
        loss += cross_entropy(z, yv);
        let yhat = sigmoid(z);
        predictions.push(yhat);

        let Some(g) = grads.as_mut() else { continue };
        let dz = (yhat - yv) * inv_b;
        g.tensors[B3].data[0] += dz;
        let mut g_l = vec![0.0; row.len()];
        for (k, &(t, _)) in row.iter().enumerate() {
            g.tensors[W3].data[t as usize] += dz * l[k];
            g_l[k] = dz * w3.data[t as usize];
        }
        // Through the L2 normalization: d l_k / d u_j = (δ_kj - l_k l_j)/|u|.
        let mut du = vec![0.0; row.len()];
        if s_sq > 0.0 {
            let dot: f64 = g_l.iter().zip(&l).map(|(a, b)| a * b).sum();
            for k in 0..row.len() {
                du[k] = (g_l[k] - dot * l[k]) * inv_norm;
            }
        }
        for (k, &(t, _)) in row.iter().enumerate() {
            dcd[t as usize] += du[k] * dd_vals[k];
        }
        if model.config.learn_dd {
            for (k, &(t, _)) in row.iter().enumerate() {
                let dda = du[k] * cdbuf.cd[t as usize];
                backward_dd_pair(model, &pair_bufs[k], dda, g);
            }
        }
    }
    loss *= inv_b;

    if let Some(g) = grads.as_mut() {
        backward_cd(model, &cdbuf, &dcd, g);
    }

    Ok(EvalOutput {
        loss,
        predictions,
        grads,
    })
}

fn backward_dd_pair(model: &LtwModel, buf: &PairBuffers, dda: f64, g: &mut ParamSet) {
    if buf.pre5 <= 0.0 || dda == 0.0 {
        return;
    }
    let hd_units = model.config.hidden_dd;
    let p = &model.params.tensors;
    let dpre5 = dda;
    g.tensors[B5].data[0] += dpre5;
    for j in 0..hd_units {
        g.tensors[W5].data[j] += buf.hd4[j] * dpre5;
        let av = buf.a4[j];
        if av > 0.0 {
            // hd4/a4 recovers the dropout mask-and-scale for this unit.
            let dq = p[W5].data[j] * dpre5 * (buf.hd4[j] / av);
            g.tensors[W4].data[j] += buf.u * dq;
            g.tensors[B4].data[j] += dq;
        }
    }
}

fn backward_cd(model: &LtwModel, cdbuf: &CdBuffers, dcd: &[f64], g: &mut ParamSet) {
    let f = model.n_terms();
    let h = model.config.hidden_units(f);
    let p = &model.params.tensors;
    let w2 = &p[W2];
    match model.config.variant {
        LtwVariant::Local => {
            for (bi, &tu) in cdbuf.terms.iter().enumerate() {
                let t = tu as usize;
                let g_cd = dcd[t];
                if g_cd == 0.0 {
                    continue;
                }
                let ds = g_cd * model.config.head.derivative_from_output(cdbuf.cd[t]);
                g.tensors[B2].data[0] += ds;
                let (tpr, fpr) = (model.table_tpr[t], model.table_fpr[t]);
                let base = bi * h;
                for j in 0..h {
                    let hdv = cdbuf.hd[base + j];
                    g.tensors[W2].data[j] += hdv * ds;
                    let av = cdbuf.a[base + j];
                    if av > 0.0 {
                        let dq = w2.data[j] * ds * (hdv / av);
                        g.tensors[W1].data[j] += tpr * dq;
                        g.tensors[W1].data[h + j] += fpr * dq;
                        g.tensors[B1].data[j] += dq;
                    }
                }
            }
        }
        LtwVariant::Global => {
            let nz: Vec<usize> = (0..f).filter(|&t| dcd[t] != 0.0).collect();
            if nz.is_empty() {
                return;
            }
            let mut dpre2 = vec![0.0; f];
            for &t in &nz {
                let v = dcd[t] * model.config.head.derivative_from_output(cdbuf.cd[t]);
                dpre2[t] = v;
                g.tensors[B2].data[t] += v;
            }
            let mut dq = vec![0.0; h];
            for j in 0..h {
                let hv = cdbuf.hd[j];
                let base = j * f;
                let mut acc = 0.0;
                for &t in &nz {
                    g.tensors[W2].data[base + t] += hv * dpre2[t];
                    acc += w2.data[base + t] * dpre2[t];
                }
                let av = cdbuf.a[j];
                if av > 0.0 {
                    let v = acc * (hv / av);
                    dq[j] = v;
                    g.tensors[B1].data[j] += v;
                }
            }
            for t in 0..f {
                for (xi, rowi) in [(model.table_tpr[t], 2 * t), (model.table_fpr[t], 2 * t + 1)] {
                    if xi != 0.0 {
                        let base = rowi * h;
                        for j in 0..h {
                            g.tensors[W1].data[base + j] += xi * dq[j];
                        }
                    }
                }
            }
        }
    }
}

/// Mean batch cross-entropy without dropout (the deterministic objective used
/// by finite-difference checks and validation).
pub fn batch_loss(
    model: &LtwModel,
    corpus: &SparseCorpus,
    rows: &[usize],
    y: &[bool],
) -> Result<f64> {
    Ok(evaluate_batch(model, corpus, rows, y, None, false)?.loss)
}

/// Mean batch cross-entropy and its exact gradients, without dropout.
pub fn batch_gradients(
    model: &LtwModel,
    corpus: &SparseCorpus,
    rows: &[usize],
    y: &[bool],
) -> Result<(f64, Gradients)> {
    let out = evaluate_batch(model, corpus, rows, y, None, true)?;
    Ok((out.loss, Gradients(out.grads.expect("gradients requested"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Document, Stopwords};
    use crate::ltw::{LtwConfig, LtwVariant, OutputHead};
    use crate::stats::TermStats;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (crate::corpus::SparseCorpus, crate::corpus::BinaryTask) {
        let docs = vec![
            Document::new("p0", ["c"], "m m x y"),
            Document::new("p1", ["c"], "m x"),
            Document::new("n0", Vec::<String>::new(), "x y y"),
            Document::new("n1", Vec::<String>::new(), "y"),
            Document::new("n2", Vec::<String>::new(), "x x z"),
        ];
        let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
        let task = corpus.binary_task("c");
        (corpus, task)
    }

    fn model(variant: LtwVariant, head: OutputHead, learn_dd: bool, seed: u64) -> LtwModel {
        let (corpus, task) = toy();
        let stats = TermStats::compute(&corpus, &task).unwrap();
        let mut cfg = LtwConfig::new(variant, head);
        cfg.hidden_local = 6;
        cfg.hidden_global_cap = 3;
        cfg.hidden_dd = 4;
        cfg.learn_dd = learn_dd;
        cfg.seed = seed;
        LtwModel::new(cfg, &stats, 0).unwrap()
    }

    #[test]
    fn learned_dd_is_zero_at_zero_frequency() {
        let m = model(LtwVariant::Local, OutputHead::Identity, true, 3);
        assert_eq!(dd_forward_inference(&m, 0), 0.0);
        assert!(dd_forward_inference(&m, 2) >= 0.0); // final ReLU
    }

    #[test]
    fn gradients_deterministic_without_dropout() {
        let (corpus, task) = toy();
        let m = model(LtwVariant::Local, OutputHead::Sigmoid, false, 1);
        let rows = [0usize, 2, 3];
        let y: Vec<bool> = rows.iter().map(|&r| task.y[r]).collect();
        let (l1, g1) = batch_gradients(&m, &corpus, &rows, &y).unwrap();
        let (l2, g2) = batch_gradients(&m, &corpus, &rows, &y).unwrap();
        assert_eq!(l1.to_bits(), l2.to_bits());
        for i in 0..g1.flat_len() {
            assert_eq!(g1.get(i).to_bits(), g2.get(i).to_bits());
        }
    }

    #[test]
    fn dropout_draws_are_seed_deterministic() {
        let (corpus, task) = toy();
        let m = model(LtwVariant::Local, OutputHead::Sigmoid, true, 1);
        let rows = [0usize, 1, 2];
        let y: Vec<bool> = rows.iter().map(|&r| task.y[r]).collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let o1 = evaluate_batch(&m, &corpus, &rows, &y, Some(&mut r1), true).unwrap();
        let o2 = evaluate_batch(&m, &corpus, &rows, &y, Some(&mut r2), true).unwrap();
        assert_eq!(o1.loss.to_bits(), o2.loss.to_bits());
        let (g1, g2) = (o1.grads.unwrap(), o2.grads.unwrap());
        for (t1, t2) in g1.tensors.iter().zip(&g2.tensors) {
            assert_eq!(t1, t2);
        }
    }

    #[test]
    fn quick_finite_difference_spot_check() {
        // The exhaustive sweep lives in the acceptance suite; this guards the
        // backward pass during development. Central differences at 1e-5.
        let (corpus, task) = toy();
        let rows = [0usize, 1, 2, 3, 4];
        let y: Vec<bool> = rows.iter().map(|&r| task.y[r]).collect();
        for (variant, head, learn_dd) in [
            (LtwVariant::Local, OutputHead::Sigmoid, false),
            (LtwVariant::Global, OutputHead::Identity, false),
            (LtwVariant::Local, OutputHead::Identity, true),
        ] {
            let mut m = model(variant, head, learn_dd, 17);
            let (_, g) = batch_gradients(&m, &corpus, &rows, &y).unwrap();
            let step = 1e-5;
            for i in (0..m.param_len()).step_by(3) {
                let orig = m.param_get(i);
                m.param_set(i, orig + step);
                let lp = batch_loss(&m, &corpus, &rows, &y).unwrap();
                m.param_set(i, orig - step);
                let lm = batch_loss(&m, &corpus, &rows, &y).unwrap();
                m.param_set(i, orig);
                let numeric = (lp - lm) / (2.0 * step);
                let analytic = g.get(i);
                let denom = numeric.abs().max(analytic.abs()).max(1e-8);
                assert!(
                    (numeric - analytic).abs() / denom < 1e-4,
                    "{variant:?}/{head:?} learn_dd={learn_dd} param {i}: \
                     numeric {numeric} vs analytic {analytic}"
                );
            }
        }
    }
}
