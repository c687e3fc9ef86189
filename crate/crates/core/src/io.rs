//! File formats: delimited document files, class-directory trees, stopword
//! lists, and svmlight-style sparse matrices.
//!
//! The sparse interchange format is one row per document:
//!
//! ```text
//! label1,label2 0:3 7:1 # doc-id
//! ```
//!
//! The leading field is a comma-separated label list (empty for unlabelled
//! rows), entries are `index:value` pairs in ascending index order, and an
//! optional ` # ` suffix carries the document id. Count matrices store
//! bit-exact integers; weighted matrices store reals at nine significant
//! digits. The vocabulary travels in a sidecar file, one term per line, so a
//! matrix plus its sidecar round-trips counts, lengths, labels and ids.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::corpus::{Document, SparseCorpus, Stopwords, Vocabulary};
use crate::error::Error;
use crate::weighting::SparseMatrix;
use crate::Result;

fn parse_err(file: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Read documents from a tab-delimited file: `id <TAB> label1,label2 <TAB>
/// text`, one document per line, UTF-8. The label field may be empty.
pub fn read_documents_tsv(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)?;
    let mut docs = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let id = parts
            .next()
            .ok_or_else(|| parse_err(path, lineno + 1, "missing id field"))?;
        let labels = parts
            .next()
            .ok_or_else(|| parse_err(path, lineno + 1, "missing label field"))?;
        let text = parts
            .next()
            .ok_or_else(|| parse_err(path, lineno + 1, "missing text field"))?;
        let labels = labels
            .split(',')
            .filter(|l| !l.is_empty())
            .map(str::to_owned);
        docs.push(Document::new(id, labels, text));
    }
    Ok(docs)
}

/// Write documents in the same tab-delimited layout. Tabs and newlines inside
/// the text are flattened to spaces so the format stays line-oriented.
pub fn write_documents_tsv(path: impl AsRef<Path>, docs: &[Document]) -> Result<()> {
    let mut out = String::new();
    for d in docs {
        let labels: Vec<&str> = d.labels.iter().map(String::as_str).collect();
        let text: String = d
            .text
            .chars()
            .map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c })
            .collect();
        writeln!(out, "{}\t{}\t{}", d.id, labels.join(","), text).expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a directory tree where each immediate subdirectory names a class and
/// each regular file inside it is one document (id = `class/filename`).
pub fn read_documents_dir(root: impl AsRef<Path>) -> Result<Vec<Document>> {
    let root = root.as_ref();
    let mut docs = Vec::new();
    let mut class_dirs: Vec<_> = fs::read_dir(root)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .collect();
    class_dirs.sort_by_key(|e| e.file_name());
    for class_dir in class_dirs {
        let class = class_dir.file_name().to_string_lossy().into_owned();
        let mut files: Vec<_> = fs::read_dir(class_dir.path())?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().is_file())
            .collect();
        files.sort_by_key(|e| e.file_name());
        for f in files {
            let name = f.file_name().to_string_lossy().into_owned();
            let text = fs::read_to_string(f.path())?;
            docs.push(Document::new(
                format!("{class}/{name}"),
                [class.clone()],
                text,
            ));
        }
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(docs)
}

/// Load a stopword list: one word per line, blank lines ignored.
pub fn read_stopwords(path: impl AsRef<Path>) -> Result<Stopwords> {
    let content = fs::read_to_string(path)?;
    Ok(Stopwords::from_words(content.lines()))
}

/// Write a vocabulary sidecar, one term per line in index order.
pub fn write_vocabulary(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<()> {
    let mut out = String::new();
    for t in vocab.terms() {
        out.push_str(t);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a vocabulary sidecar written by [`write_vocabulary`].
pub fn read_vocabulary(path: impl AsRef<Path>) -> Result<Vocabulary> {
    let content = fs::read_to_string(path)?;
    Vocabulary::from_terms(content.lines().map(str::to_owned))
}

fn format_labels(labels: &BTreeSet<String>) -> String {
    let parts: Vec<&str> = labels.iter().map(String::as_str).collect();
    parts.join(",")
}

/// Write a count corpus in the sparse interchange format (bit-exact integer
/// counts). The vocabulary is not included; see [`write_vocabulary`].
pub fn write_sparse_counts(path: impl AsRef<Path>, corpus: &SparseCorpus) -> Result<()> {
    let mut out = String::new();
    for d in 0..corpus.n_docs() {
        out.push_str(&format_labels(corpus.labels(d)));
        for &(t, c) in corpus.row(d) {
            write!(out, " {t}:{c}").expect("string write");
        }
        write!(out, " # {}", corpus.id(d)).expect("string write");
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a sparse count matrix back into a corpus over the given vocabulary.
pub fn read_sparse_counts(
    path: impl AsRef<Path>,
    vocab: Arc<Vocabulary>,
) -> Result<SparseCorpus> {
    let path_ref = path.as_ref();
    let content = fs::read_to_string(path_ref)?;
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (lineno, raw) in content.lines().enumerate() {
        let (body, id) = match raw.rsplit_once(" # ") {
            Some((b, id)) => (b, id.to_owned()),
            None => (raw, format!("d{lineno}")),
        };
        let (label_field, entries) = match body.split_once(' ') {
            Some((l, rest)) => (l, rest),
            None => (body, ""),
        };
        let label_set: BTreeSet<String> = label_field
            .split(',')
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect();
        let mut row: Vec<(u32, u32)> = Vec::new();
        for tok in entries.split_whitespace() {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(path_ref, lineno + 1, format!("bad entry {tok:?}")))?;
            let i: u32 = i
                .parse()
                .map_err(|_| parse_err(path_ref, lineno + 1, format!("bad index {i:?}")))?;
            let v: u32 = v
                .parse()
                .map_err(|_| parse_err(path_ref, lineno + 1, format!("bad count {v:?}")))?;
            row.push((i, v));
        }
        ids.push(id);
        labels.push(label_set);
        rows.push(row);
    }
    SparseCorpus::from_parts(vocab, ids, labels, rows)
}

/// Write a weighted matrix in the same layout, printing values at nine
/// significant digits. `labels` (parallel to rows) is optional.
pub fn write_sparse_weights(
    path: impl AsRef<Path>,
    matrix: &SparseMatrix,
    labels: Option<&[BTreeSet<String>]>,
) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != matrix.n_rows() {
            return Err(Error::ArityMismatch {
                expected: matrix.n_rows(),
                got: l.len(),
                context: "labels vs matrix rows",
            });
        }
    }
    let mut out = String::new();
    for (d, row) in matrix.rows().iter().enumerate() {
        if let Some(l) = labels {
            out.push_str(&format_labels(&l[d]));
        }
        for &(t, w) in row {
            write!(out, " {t}:{w:.8e}").expect("string write");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
