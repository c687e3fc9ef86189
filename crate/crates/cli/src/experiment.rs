//! Experiment orchestration: enumerate (class, scheme, learner, repetition)
//! cells, run them on a worker pool with per-cell isolation, and aggregate
//! the surviving cells into result files, summary tables, and significance
//! tests.
//!
//! Every cell writes its outcome atomically under `cells/`; a rerun with the
//! same output directory skips cells whose marker already exists, so an
//! interrupted sweep resumes where it stopped. The whole result tree is a
//! deterministic function of the configuration and the corpus bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use termweight::corpus::{
    build_corpus, corpus_with_vocabulary, stratified_split_indices, Document, Stopwords,
};
use termweight::eval::{confusion, wilcoxon_signed_rank, ClassOutcome, EvalReport, Grid};
use termweight::hash::Fnv1a;
use termweight::ltw::{self, parse_scheme_name, LtwModel};
use termweight::stats::{chi_square, contingency, select_features};
use termweight::weighting::{CorpusStats, WeightingScheme};
use termweight::{classifiers, BinaryTask, LearnerKind, LearnerSpec, SparseCorpus, ValidationPolicy};

use crate::config::{CorpusFormat, ExperimentConfig, SignificancePairing, SplitPolicy};

const ALPHA_LOOSE: f64 = 0.05;
const ALPHA_STRICT: f64 = 0.005;

/// Outcome summary returned to `main` for exit-code selection.
#[derive(Debug)]
pub struct ExperimentReport {
    pub classes: usize,
    pub cells_total: usize,
    pub cells_reused: usize,
    pub cells_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    class: String,
    scheme: String,
    learner: LearnerKind,
    rep: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ModelKey {
    class: String,
    scheme: String,
    rep: u64,
}

#[derive(Debug, Clone)]
struct CellResult {
    tp: u64,
    fp: u64,
    fn_: u64,
    f1: f64,
    validation_f1: f64,
    chosen: String,
}

#[derive(Debug, Clone)]
enum CellState {
    Done(CellResult),
    Failed(String),
}

/// Replace anything outside `[A-Za-z0-9._-]` so class names are safe as
/// file-name components.
fn safe_name(raw: &str) -> String {
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Write via a sibling temp file and rename, so a crash never leaves a
/// half-written marker behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

struct Runner {
    config: ExperimentConfig,
    train: SparseCorpus,
    test: SparseCorpus,
    classes: Vec<String>,
}

/// Per-class working set after feature selection.
struct Prepared {
    train: SparseCorpus,
    test: SparseCorpus,
    task_train: BinaryTask,
    task_test: BinaryTask,
}

impl Runner {
    fn cell_path(&self, key: &CellKey) -> PathBuf {
        self.config.output.join("cells").join(format!(
            "{}.{}.{}.r{}.tsv",
            safe_name(&key.class),
            safe_name(&key.scheme),
            key.learner.name(),
            key.rep
        ))
    }

    fn checkpoint_path(&self, key: &ModelKey) -> PathBuf {
        self.config.output.join("checkpoints").join(format!(
            "{}.{}.r{}.json",
            safe_name(&key.class),
            safe_name(&key.scheme),
            key.rep
        ))
    }

    fn trace_path(&self, class: &str, scheme: &str) -> PathBuf {
        self.config
            .output
            .join("traces")
            .join(format!("{}.{}.tsv", safe_name(class), safe_name(scheme)))
    }

    fn model_seed(&self, key: &ModelKey) -> u64 {
        Fnv1a::new()
            .write_u64(self.config.seed)
            .write_str("model")
            .write_str(&key.class)
            .write_str(&key.scheme)
            .write_u64(key.rep)
            .finish()
    }

    fn cell_seed(&self, key: &CellKey) -> u64 {
        Fnv1a::new()
            .write_u64(self.config.seed)
            .write_str("cell")
            .write_str(&key.class)
            .write_str(&key.scheme)
            .write_str(key.learner.name())
            .write_u64(key.rep)
            .finish()
    }

    /// Build the per-class corpora: chi-square feature selection on the
    /// training split at the configured ratio, applied to both splits.
    fn prepare(&self, class: &str) -> Result<Prepared> {
        let task = self.train.binary_task(class);
        let (train, test) = if self.config.select_ratio >= 1.0 {
            (self.train.clone(), self.test.clone())
        } else {
            let tables = contingency(&self.train, &task)?;
            let scores: Vec<f64> = tables.iter().map(chi_square).collect();
            let keep = select_features(&scores, self.config.select_ratio)?;
            (self.train.project(&keep)?, self.test.project(&keep)?)
        };
        let task_train = train.binary_task(class);
        let task_test = test.binary_task(class);
        Ok(Prepared {
            train,
            test,
            task_train,
            task_test,
        })
    }

    /// Train one repetition of a learned scheme and persist its checkpoint
    /// (plus, for the first repetition, the training trace).
    fn run_model_task(&self, key: &ModelKey) -> Result<()> {
        let spec = parse_scheme_name(&key.scheme)
            .ok_or_else(|| anyhow!("{} is not a learnable scheme", key.scheme))?;
        let prepared = self.prepare(&key.class)?;
        let mut cfg = self
            .config
            .ltw
            .apply(spec.configure(ltw::LtwConfig::new(spec.variant, spec.head)));
        cfg.seed = self.model_seed(key);
        let (model, trace) = ltw::train(cfg, &prepared.train, &prepared.task_train)?;

        if key.rep == 0 {
            let mut buf = Vec::new();
            trace.write_tsv(&mut buf)?;
            write_atomic(&self.trace_path(&key.class, &key.scheme), &buf)?;
        }
        let path = self.checkpoint_path(key);
        let tmp = path.with_extension("json.tmp");
        model.save(&tmp)?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    fn run_cell(&self, key: &CellKey) -> Result<CellResult> {
        let prepared = self.prepare(&key.class)?;
        let scheme = match WeightingScheme::from_name(&key.scheme) {
            Some(s) => s,
            None => {
                let ckpt = self.checkpoint_path(&ModelKey {
                    class: key.class.clone(),
                    scheme: key.scheme.clone(),
                    rep: key.rep,
                });
                if let Some(msg) = read_failure_marker(&ckpt) {
                    bail!("model training failed: {msg}");
                }
                let model = LtwModel::load(&ckpt)
                    .with_context(|| format!("loading checkpoint {}", ckpt.display()))?;
                WeightingScheme::learned(key.scheme.clone(), Arc::new(model))
            }
        };
        let stats = if scheme.is_supervised() {
            CorpusStats::supervised(&prepared.train, &prepared.task_train)?
        } else {
            CorpusStats::unsupervised(&prepared.train)
        };
        let x_train = scheme.weigh_corpus(&prepared.train, &stats)?;
        let x_test = scheme.weigh_corpus(&prepared.test, &stats)?;

        let spec = LearnerSpec::new(key.learner);
        let policy = ValidationPolicy {
            fraction: 0.2,
            seed: self.cell_seed(key),
        };
        let clf = classifiers::fit(&spec, &x_train, &prepared.task_train.y, &policy)?;
        let pred = clf.predict(&x_test)?;
        let (tp, fp, fn_) = confusion(&pred, &prepared.task_test.y)?;
        Ok(CellResult {
            tp,
            fp,
            fn_,
            f1: termweight::eval::f1(tp, fp, fn_),
            validation_f1: clf.validation_f1(),
            chosen: clf.chosen().to_owned(),
        })
    }
}

fn read_failure_marker(final_path: &Path) -> Option<String> {
    let failed = failure_path(final_path);
    fs::read_to_string(failed).ok()
}

fn failure_path(final_path: &Path) -> PathBuf {
    let mut os = final_path.as_os_str().to_owned();
    os.push(".failed");
    PathBuf::from(os)
}

fn cell_marker(key: &CellKey, result: &CellResult) -> String {
    format!(
        "class\tscheme\tlearner\trep\ttp\tfp\tfn\tf1\tval_f1\tchosen\n\
         {}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.8e}\t{:.8e}\t{}\n",
        key.class,
        key.scheme,
        key.learner.name(),
        key.rep,
        result.tp,
        result.fp,
        result.fn_,
        result.f1,
        result.validation_f1,
        result.chosen
    )
}

fn parse_cell_marker(text: &str) -> Result<CellResult> {
    let line = text
        .lines()
        .nth(1)
        .ok_or_else(|| anyhow!("cell marker missing data row"))?;
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        bail!("cell marker has {} columns, expected 10", cols.len());
    }
    Ok(CellResult {
        tp: cols[4].parse()?,
        fp: cols[5].parse()?,
        fn_: cols[6].parse()?,
        f1: cols[7].parse()?,
        validation_f1: cols[8].parse()?,
        chosen: cols[9].to_owned(),
    })
}

/// Load the documents named by the config and produce the train/test pair.
/// The vocabulary is fitted on the training split only; test tokens outside
/// it are dropped.
fn load_corpora(
    config: &ExperimentConfig,
    stopwords: &Stopwords,
) -> Result<(SparseCorpus, SparseCorpus)> {
    let read_one = |path: &Path| -> Result<Vec<Document>> {
        let docs = match config.format {
            CorpusFormat::Tsv => termweight::io::read_documents_tsv(path)?,
            CorpusFormat::Dir => termweight::io::read_documents_dir(path)?,
        };
        Ok(docs)
    };
    let (train_docs, test_docs) = match config.split {
        SplitPolicy::Named => {
            let (train_path, test_path) = match config.format {
                CorpusFormat::Tsv => (
                    config.corpus.join("train.tsv"),
                    config.corpus.join("test.tsv"),
                ),
                CorpusFormat::Dir => (config.corpus.join("train"), config.corpus.join("test")),
            };
            (read_one(&train_path)?, read_one(&test_path)?)
        }
        SplitPolicy::Fraction => {
            let docs = read_one(&config.corpus)?;
            let split_seed = Fnv1a::new()
                .write_u64(config.seed)
                .write_str("split")
                .finish();
            let test_fraction = 1.0 - config.train_fraction;
            let (train_idx, test_idx) =
                stratified_split_indices(docs.len(), None, test_fraction, split_seed)?;
            let pick = |idx: &[usize]| idx.iter().map(|&i| docs[i].clone()).collect::<Vec<_>>();
            (pick(&train_idx), pick(&test_idx))
        }
    };
    let train = build_corpus(&train_docs, stopwords)?;
    let test = corpus_with_vocabulary(&test_docs, Arc::clone(train.vocab()), stopwords)?;
    Ok((train, test))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let stopwords = config.load_stopwords()?;
    let (train, test) = load_corpora(config, &stopwords)?;
    if train.n_docs() == 0 || test.n_docs() == 0 {
        bail!("both splits need at least one document");
    }
    // Binary tasks: one per class with at least one positive training
    // example. Degenerate classes (e.g. a single positive document) stay in
    // the sweep and fail per cell rather than aborting the run.
    let classes: Vec<String> = train.classes().into_iter().collect();
    if classes.is_empty() {
        bail!("the training split carries no class labels");
    }

    for sub in ["cells", "checkpoints", "traces", "tables"] {
        fs::create_dir_all(config.output.join(sub))?;
    }
    write_atomic(
        &config.output.join("config.txt"),
        config.describe().as_bytes(),
    )?;

    let runner = Runner {
        config: config.clone(),
        train,
        test,
        classes,
    };

    // Cell enumeration. Learned schemes repeat with fresh seeds; classical
    // schemes are deterministic given the cell seed, so they run once.
    let mut cells = Vec::new();
    let mut model_keys = Vec::new();
    for class in &runner.classes {
        for scheme in &config.schemes {
            let learned = parse_scheme_name(scheme).is_some();
            let reps = if learned { config.repetitions } else { 1 };
            for rep in 0..reps {
                if learned {
                    model_keys.push(ModelKey {
                        class: class.clone(),
                        scheme: scheme.clone(),
                        rep,
                    });
                }
                for &learner in &config.learners {
                    cells.push(CellKey {
                        class: class.clone(),
                        scheme: scheme.clone(),
                        learner,
                        rep,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("building worker pool")?;

    // Phase 1: train learned-scheme checkpoints (shared by every learner).
    let trained = AtomicU64::new(0);
    pool.install(|| {
        model_keys.par_iter().for_each(|key| {
            let ckpt = runner.checkpoint_path(key);
            if ckpt.exists() || read_failure_marker(&ckpt).is_some() {
                return;
            }
            match runner.run_model_task(key) {
                Ok(()) => {
                    let done = trained.fetch_add(1, Ordering::Relaxed) + 1;
                    eprintln!(
                        "trained {}/{}: {} {} rep {}",
                        done,
                        model_keys.len(),
                        key.class,
                        key.scheme,
                        key.rep
                    );
                }
                Err(e) => {
                    let _ = write_atomic(&failure_path(&ckpt), format!("{e:#}").as_bytes());
                    eprintln!(
                        "FAILED model {} {} rep {}: {e:#}",
                        key.class, key.scheme, key.rep
                    );
                }
            }
        });
    });

    // Phase 2: the scheme x learner matrix, cell by cell.
    let reused = AtomicU64::new(0);
    pool.install(|| {
        cells.par_iter().for_each(|key| {
            let marker = runner.cell_path(key);
            if marker.exists() || read_failure_marker(&marker).is_some() {
                reused.fetch_add(1, Ordering::Relaxed);
                return;
            }
            match runner.run_cell(key) {
                Ok(result) => {
                    let _ = write_atomic(&marker, cell_marker(key, &result).as_bytes());
                }
                Err(e) => {
                    let _ = write_atomic(&failure_path(&marker), format!("{e:#}").as_bytes());
                    eprintln!(
                        "FAILED cell {} {} {} rep {}: {e:#}",
                        key.class,
                        key.scheme,
                        key.learner.name(),
                        key.rep
                    );
                }
            }
        });
    });

    // Aggregation happens on the main thread from the on-disk markers, so a
    // resumed run and a fresh run produce identical bytes.
    let mut states: BTreeMap<CellKey, CellState> = BTreeMap::new();
    for key in &cells {
        let marker = runner.cell_path(key);
        let state = if let Some(msg) = read_failure_marker(&marker) {
            CellState::Failed(msg)
        } else {
            let text = fs::read_to_string(&marker)
                .with_context(|| format!("cell marker {} missing after run", marker.display()))?;
            CellState::Done(parse_cell_marker(&text)?)
        };
        states.insert(key.clone(), state);
    }

    write_results_files(&runner, &states)?;
    write_tables(&runner, &states)?;
    write_significance(&runner, &states)?;
    write_failures(&runner, &states)?;

    let cells_failed = states
        .values()
        .filter(|s| matches!(s, CellState::Failed(_)))
        .count();
    Ok(ExperimentReport {
        classes: runner.classes.len(),
        cells_total: cells.len(),
        cells_reused: reused.load(Ordering::Relaxed) as usize,
        cells_failed,
    })
}

/// `results/<dataset>/<scheme>/<learner>.tsv`: one row per completed
/// (class, repetition) cell.
fn write_results_files(runner: &Runner, states: &BTreeMap<CellKey, CellState>) -> Result<()> {
    let config = &runner.config;
    for scheme in &config.schemes {
        let dir = config
            .output
            .join("results")
            .join(safe_name(&config.dataset))
            .join(safe_name(scheme));
        fs::create_dir_all(&dir)?;
        for &learner in &config.learners {
            let mut out =
                String::from("class\trep\ttp\tfp\tfn\tf1\tval_f1\tchosen\n");
            for (key, state) in states {
                if &key.scheme != scheme || key.learner != learner {
                    continue;
                }
                if let CellState::Done(r) = state {
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{:.8e}\t{:.8e}\t{}\n",
                        key.class, key.rep, r.tp, r.fp, r.fn_, r.f1, r.validation_f1, r.chosen
                    ));
                }
            }
            write_atomic(&dir.join(format!("{}.tsv", learner.name())), out.as_bytes())?;
        }
    }
    Ok(())
}

/// Micro/macro F1 per (scheme, learner, repetition), aggregated over classes.
fn rep_reports(
    runner: &Runner,
    states: &BTreeMap<CellKey, CellState>,
    scheme: &str,
    learner: LearnerKind,
) -> Vec<EvalReport> {
    let reps = if parse_scheme_name(scheme).is_some() {
        runner.config.repetitions
    } else {
        1
    };
    let mut reports = Vec::new();
    for rep in 0..reps {
        let mut outcomes = Vec::new();
        for class in &runner.classes {
            let key = CellKey {
                class: class.clone(),
                scheme: scheme.to_owned(),
                learner,
                rep,
            };
            if let Some(CellState::Done(r)) = states.get(&key) {
                outcomes.push(ClassOutcome::from_counts(class.clone(), r.tp, r.fp, r.fn_));
            }
        }
        if let Ok(report) = EvalReport::aggregate(outcomes) {
            reports.push(report);
        }
    }
    reports
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `tables/{micro,macro}.tsv` (+`_sd`): scheme rows by learner columns, with
/// the machine-readable TSV mirrored by an aligned `.txt` rendering.
fn write_tables(runner: &Runner, states: &BTreeMap<CellKey, CellState>) -> Result<()> {
    let config = &runner.config;
    let col_labels: Vec<String> = config.learners.iter().map(|l| l.name().to_owned()).collect();
    let mut grids = [
        ("micro", Grid::new("scheme", col_labels.clone())),
        ("macro", Grid::new("scheme", col_labels.clone())),
        ("micro_sd", Grid::new("scheme", col_labels.clone())),
        ("macro_sd", Grid::new("scheme", col_labels)),
    ];
    for scheme in &config.schemes {
        let mut cells: [Vec<String>; 4] = Default::default();
        for &learner in &config.learners {
            let reports = rep_reports(runner, states, scheme, learner);
            if reports.is_empty() {
                for c in &mut cells {
                    c.push("-".to_owned());
                }
                continue;
            }
            let micro: Vec<f64> = reports.iter().map(|r| r.micro_f1).collect();
            let macro_: Vec<f64> = reports.iter().map(|r| r.macro_f1).collect();
            let (mi, mi_sd) = mean_sd(&micro);
            let (ma, ma_sd) = mean_sd(&macro_);
            cells[0].push(format!("{mi:.4}"));
            cells[1].push(format!("{ma:.4}"));
            cells[2].push(format!("{mi_sd:.4}"));
            cells[3].push(format!("{ma_sd:.4}"));
        }
        for (grid, row) in grids.iter_mut().zip(cells) {
            grid.1.push_row(scheme.clone(), row);
        }
    }
    for (name, grid) in &grids {
        let dir = config.output.join("tables");
        write_atomic(&dir.join(format!("{name}.tsv")), grid.to_tsv().as_bytes())?;
        write_atomic(&dir.join(format!("{name}.txt")), grid.to_aligned().as_bytes())?;
    }
    Ok(())
}

/// Mean-over-repetitions F1 per class for one (scheme, learner), for use as
/// a paired sample.
fn class_f1_map(
    runner: &Runner,
    states: &BTreeMap<CellKey, CellState>,
    scheme: &str,
    learner: LearnerKind,
) -> BTreeMap<String, f64> {
    let reps = if parse_scheme_name(scheme).is_some() {
        runner.config.repetitions
    } else {
        1
    };
    let mut map = BTreeMap::new();
    for class in &runner.classes {
        let mut values = Vec::new();
        for rep in 0..reps {
            let key = CellKey {
                class: class.clone(),
                scheme: scheme.to_owned(),
                learner,
                rep,
            };
            if let Some(CellState::Done(r)) = states.get(&key) {
                values.push(r.f1);
            }
        }
        if !values.is_empty() {
            map.insert(class.clone(), mean_sd(&values).0);
        }
    }
    map
}

/// `tables/significance.tsv`: two-sided signed-rank tests over paired F1
/// samples for every scheme pair, at the fixed 0.05 and 0.005 levels.
fn write_significance(runner: &Runner, states: &BTreeMap<CellKey, CellState>) -> Result<()> {
    let config = &runner.config;
    let mut out = String::from(
        "pairing\tlearner\tscheme_a\tscheme_b\tn_used\tw_plus\tw_minus\tstatistic\tp_value\texact\tsig_0.05\tsig_0.005\tnote\n",
    );
    let mut emit = |pairing: &str, learner: &str, a_name: &str, b_name: &str, a: &[f64], b: &[f64]| {
        let row = match wilcoxon_signed_rank(a, b) {
            Ok(t) => format!(
                "{pairing}\t{learner}\t{a_name}\t{b_name}\t{}\t{:.1}\t{:.1}\t{:.1}\t{:.6e}\t{}\t{}\t{}\t{}\n",
                t.n_used,
                t.w_plus,
                t.w_minus,
                t.statistic,
                t.p_value,
                t.exact,
                t.significant(ALPHA_LOOSE),
                t.significant(ALPHA_STRICT),
                if t.degenerate { "degenerate" } else { "-" }
            ),
            Err(e) => format!(
                "{pairing}\t{learner}\t{a_name}\t{b_name}\t{}\t-\t-\t-\t-\t-\t-\t-\t{e}\n",
                a.len()
            ),
        };
        out.push_str(&row);
    };

    let pairs: Vec<(&String, &String)> = config
        .schemes
        .iter()
        .enumerate()
        .flat_map(|(i, a)| config.schemes[i + 1..].iter().map(move |b| (a, b)))
        .collect();
    match config.significance_pairing {
        SignificancePairing::PerClass => {
            for &learner in &config.learners {
                for (sa, sb) in &pairs {
                    let ma = class_f1_map(runner, states, sa, learner);
                    let mb = class_f1_map(runner, states, sb, learner);
                    let mut a = Vec::new();
                    let mut b = Vec::new();
                    for (class, va) in &ma {
                        if let Some(vb) = mb.get(class) {
                            a.push(*va);
                            b.push(*vb);
                        }
                    }
                    emit("per-class", learner.name(), sa, sb, &a, &b);
                }
            }
        }
        SignificancePairing::Pooled => {
            for (sa, sb) in &pairs {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for &learner in &config.learners {
                    let ma = class_f1_map(runner, states, sa, learner);
                    let mb = class_f1_map(runner, states, sb, learner);
                    for (class, va) in &ma {
                        if let Some(vb) = mb.get(class) {
                            a.push(*va);
                            b.push(*vb);
                        }
                    }
                }
                emit("pooled", "all", sa, sb, &a, &b);
            }
        }
    }
    write_atomic(
        &config.output.join("tables").join("significance.tsv"),
        out.as_bytes(),
    )
}

/// `failures.tsv` at the output root: one row per failed cell (header only
/// when everything succeeded).
fn write_failures(runner: &Runner, states: &BTreeMap<CellKey, CellState>) -> Result<()> {
    let mut out = String::from("class\tscheme\tlearner\trep\terror\n");
    for (key, state) in states {
        if let CellState::Failed(msg) = state {
            let flat = msg.replace(['\t', '\n'], " ");
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                key.class,
                key.scheme,
                key.learner.name(),
                key.rep,
                flat
            ));
        }
    }
    write_atomic(&runner.config.output.join("failures.tsv"), out.as_bytes())
}
