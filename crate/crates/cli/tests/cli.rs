//! End-to-end tests of the `termweight` binary: determinism, resumability,
//! error isolation, exit codes, and the surface-data invariants.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_termweight"))
}

/// Fast LTW settings so tests stay quick on the toy corpus.
const QUICK_LTW: &[&str] = &[
    "--ltw-hidden-local",
    "8",
    "--ltw-batch-size",
    "16",
    "--ltw-learning-rate",
    "0.05",
    "--ltw-validation-every",
    "10",
    "--ltw-patience",
    "4",
    "--ltw-max-steps",
    "600",
];

fn gen_corpus(path: &Path, docs: usize, seed: u64) {
    let out = bin()
        .args([
            "gen-corpus",
            "--docs",
            &docs.to_string(),
            "--seed",
            &seed.to_string(),
            "--output",
        ])
        .arg(path)
        .output()
        .expect("spawn gen-corpus");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn run_sweep(corpus: &Path, output: &Path, workers: &str, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg("--corpus")
        .arg(corpus)
        .arg("--output")
        .arg(output)
        .args([
            "--stopwords",
            "none",
            "--schemes",
            "LogTFIDF,LTW-L-I",
            "--learners",
            "LR,MNB",
            "--repetitions",
            "2",
            "--select-ratio",
            "0.5",
            "--seed",
            "11",
            "--workers",
            workers,
        ])
        .args(QUICK_LTW)
        .args(extra)
        .output()
        .expect("spawn run")
}

/// Relative path -> file bytes for a whole tree.
fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, into: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).expect("read_dir") {
            let path = entry.expect("entry").path();
            if path.is_dir() {
                walk(root, &path, into);
            } else {
                let rel = path.strip_prefix(root).expect("prefix").to_path_buf();
                into.insert(rel, fs::read(&path).expect("read file"));
            }
        }
    }
    let mut map = BTreeMap::new();
    walk(root, root, &mut map);
    map
}

#[test]
fn sweep_is_deterministic_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    gen_corpus(&corpus, 120, 3);

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    // Different worker counts must not change a single byte.
    let run_a = run_sweep(&corpus, &out_a, "2", &[]);
    assert!(run_a.status.success(), "{}", String::from_utf8_lossy(&run_a.stderr));
    let run_b = run_sweep(&corpus, &out_b, "4", &[]);
    assert!(run_b.status.success());
    let snap_a = snapshot(&out_a);
    assert_eq!(snap_a, snapshot(&out_b), "independent runs diverged");

    // Resumption: delete one cell marker and a derived table; the rerun
    // recomputes only what is missing and restores identical bytes.
    fs::remove_file(out_a.join("cells/topica.LogTFIDF.LR.r0.tsv")).unwrap();
    fs::remove_file(out_a.join("tables/micro.tsv")).unwrap();
    let resumed = run_sweep(&corpus, &out_a, "2", &[]);
    assert!(resumed.status.success());
    let stdout = String::from_utf8_lossy(&resumed.stdout);
    assert!(stdout.contains("11 reused"), "unexpected summary: {stdout}");
    assert_eq!(snap_a, snapshot(&out_a), "resumed run diverged");
}

#[test]
fn result_tree_has_expected_structure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    gen_corpus(&corpus, 120, 3);
    let out = dir.path().join("out");
    let run = run_sweep(&corpus, &out, "2", &[]);
    assert!(run.status.success());

    let micro = fs::read_to_string(out.join("tables/micro.tsv")).unwrap();
    let lines: Vec<&str> = micro.lines().collect();
    assert_eq!(lines.len(), 3, "header + one row per scheme: {micro}");
    assert_eq!(lines[0], "scheme\tLR\tMNB");
    assert!(lines[1].starts_with("LogTFIDF\t"));
    assert!(lines[2].starts_with("LTW-L-I\t"));

    for path in [
        "config.txt",
        "failures.tsv",
        "tables/macro.tsv",
        "tables/micro_sd.tsv",
        "tables/macro_sd.tsv",
        "tables/micro.txt",
        "tables/significance.tsv",
        "results/corpus/LogTFIDF/LR.tsv",
        "results/corpus/LTW-L-I/MNB.tsv",
        "traces/topica.LTW-L-I.tsv",
        "checkpoints/topica.LTW-L-I.r1.json",
    ] {
        assert!(out.join(path).is_file(), "missing {path}");
    }

    // Per-cell result files carry one row per completed (class, repetition).
    let ltw_lr = fs::read_to_string(out.join("results/corpus/LTW-L-I/LR.tsv")).unwrap();
    assert_eq!(ltw_lr.lines().count(), 1 + 2 * 2, "2 classes x 2 reps: {ltw_lr}");
    let log_lr = fs::read_to_string(out.join("results/corpus/LogTFIDF/LR.tsv")).unwrap();
    assert_eq!(log_lr.lines().count(), 1 + 2, "classical schemes run once per class");

    // The training trace ends with its early-stopping banner intact.
    let trace = fs::read_to_string(out.join("traces/topica.LTW-L-I.tsv")).unwrap();
    assert!(trace.starts_with("# stop="), "trace banner missing: {trace}");
}

#[test]
fn unknown_scheme_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--corpus", "missing.tsv", "--output"])
        .arg(dir.path().join("out"))
        .args(["--schemes", "NoSuchScheme"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown weighting scheme"));
    assert!(!dir.path().join("out").exists(), "no output before validation passes");
}

#[test]
fn degenerate_class_fails_per_cell_with_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    gen_corpus(&corpus, 120, 3);
    // Append one document carrying a singleton class: its task has a lone
    // positive, which cannot survive a stratified validation split.
    let mut text = fs::read_to_string(&corpus).unwrap();
    text.push_str("extra0\trareclass\tocean river stone cloud amber\n");
    fs::write(&corpus, &text).unwrap();

    let out_dir = dir.path().join("out");
    let run = bin()
        .arg("run")
        .arg("--corpus")
        .arg(&corpus)
        .arg("--output")
        .arg(&out_dir)
        .args([
            "--stopwords",
            "none",
            "--schemes",
            "LogTFIDF",
            "--learners",
            "LR",
            "--select-ratio",
            "1.0",
            "--train-fraction",
            "0.9",
            "--seed",
            "5",
        ])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2), "{}", String::from_utf8_lossy(&run.stderr));

    let failures = fs::read_to_string(out_dir.join("failures.tsv")).unwrap();
    assert!(failures.lines().any(|l| l.starts_with("rareclass\t")), "{failures}");
    // The healthy classes still completed and were aggregated.
    let results = fs::read_to_string(out_dir.join("results/corpus/LogTFIDF/LR.tsv")).unwrap();
    assert!(results.lines().any(|l| l.starts_with("topica\t")), "{results}");
}

#[test]
fn aggregation_settings_rework_tables_from_cached_cells() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    gen_corpus(&corpus, 120, 3);
    let out = dir.path().join("out");
    assert!(run_sweep(&corpus, &out, "2", &[]).status.success());
    let sig = fs::read_to_string(out.join("tables/significance.tsv")).unwrap();
    assert!(sig.lines().nth(1).unwrap().starts_with("per-class\t"), "{sig}");

    let rerun = run_sweep(&corpus, &out, "2", &["--significance-pairing", "pooled"]);
    assert!(rerun.status.success());
    assert!(String::from_utf8_lossy(&rerun.stdout).contains("12 reused"));
    let sig = fs::read_to_string(out.join("tables/significance.tsv")).unwrap();
    let row = sig.lines().nth(1).unwrap();
    assert!(row.starts_with("pooled\tall\t"), "{sig}");
}

#[test]
fn named_split_reads_pre_split_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("data");
    fs::create_dir_all(&corpus_dir).unwrap();
    gen_corpus(&corpus_dir.join("train.tsv"), 120, 3);
    gen_corpus(&corpus_dir.join("test.tsv"), 60, 4);

    let out = dir.path().join("out");
    let run = bin()
        .arg("run")
        .arg("--corpus")
        .arg(&corpus_dir)
        .arg("--output")
        .arg(&out)
        .args([
            "--split",
            "named",
            "--stopwords",
            "none",
            "--schemes",
            "LogTFIDF",
            "--learners",
            "LR",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let results = fs::read_to_string(out.join("results/data/LogTFIDF/LR.tsv")).unwrap();
    assert_eq!(results.lines().count(), 3, "two classes, one rep each: {results}");
}

fn read_surface(path: &Path) -> Vec<(f64, f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<f64> = l.split('\t').map(|c| c.parse().unwrap()).collect();
            (cols[0], cols[1], cols[2])
        })
        .collect()
}

#[test]
fn surfaces_satisfy_closed_form_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    gen_corpus(&corpus, 120, 3);
    let out = dir.path().join("out");
    assert!(run_sweep(&corpus, &out, "2", &[]).status.success());

    let surf = bin()
        .arg("surfaces")
        .arg("--corpus")
        .arg(&corpus)
        .arg("--output")
        .arg(&out)
        .args(["--surface-resolution", "21"])
        .output()
        .unwrap();
    assert!(surf.status.success(), "{}", String::from_utf8_lossy(&surf.stderr));

    let res = 21;
    // Chi-square: the perfect-positive-correlation corner (tpr=1, fpr=0)
    // attains the grid maximum (tied with the mirrored corner by symmetry),
    // and in particular dominates its whole fpr=0 boundary row.
    let chi = read_surface(&out.join("surfaces/reference.chi2.tsv"));
    assert_eq!(chi.len(), res * res);
    let global_max = chi.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let corner = chi
        .iter()
        .find(|r| r.0 == 1.0 && r.1 == 0.0)
        .expect("corner present")
        .2;
    assert!((corner - global_max).abs() <= 1e-9 * global_max);
    for row in chi.iter().filter(|r| r.1 == 0.0) {
        assert!(row.2 <= corner + 1e-12);
    }

    // Relevance frequency never increases as fpr grows at fixed tpr.
    let rf = read_surface(&out.join("surfaces/reference.rf.tsv"));
    for window in rf.chunks(res) {
        for pair in window.windows(2) {
            assert!(
                pair[1].2 <= pair[0].2 + 1e-12,
                "rf increased along fpr at tpr={}",
                pair[0].0
            );
        }
    }

    // Learned local models export a full grid plus one scatter point per
    // vocabulary term.
    let grid = read_surface(&out.join("surfaces/topica.LTW-L-I.tsv"));
    assert_eq!(grid.len(), res * res);
    let scatter = read_surface(&out.join("surfaces/topica.LTW-L-I.scatter.tsv"));
    assert!(!scatter.is_empty());
    for (tpr, fpr, _) in scatter {
        assert!((0.0..=1.0).contains(&tpr) && (0.0..=1.0).contains(&fpr));
    }
}

#[test]
fn surface_resolution_below_two_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["surfaces", "--corpus", "x.tsv", "--output"])
        .arg(dir.path().join("out"))
        .args(["--surface-resolution", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("surface_resolution"));
}

#[test]
fn gen_corpus_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    let c = dir.path().join("c.tsv");
    gen_corpus(&a, 60, 9);
    gen_corpus(&b, 60, 9);
    gen_corpus(&c, 60, 10);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());

    let too_small = bin()
        .args(["gen-corpus", "--docs", "5", "--output"])
        .arg(dir.path().join("tiny.tsv"))
        .output()
        .unwrap();
    assert_eq!(too_small.status.code(), Some(1));
}
