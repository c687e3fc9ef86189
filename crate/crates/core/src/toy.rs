//! Seeded synthetic corpus for demos, smoke tests, and benchmarks.
//!
//! Documents draw background words at random; documents labeled `topica`
//! additionally contain the marker word `signalalpha`, and `topicb`
//! documents the marker `signalbeta`. The two classes are disjoint and
//! strictly separable by their markers, so any sound weighting/learner
//! pipeline should reach perfect F1 here — which makes the corpus a good
//! end-to-end canary. Generation is a pure function of `(n_docs, seed)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::error::Error;
use crate::Result;

const BACKGROUND: [&str; 12] = [
    "ocean", "river", "stone", "cloud", "amber", "birch", "cedar", "delta", "ember", "fjord",
    "grove", "heath",
];

const MARKERS: [(&str, &str); 2] = [("topica", "signalalpha"), ("topicb", "signalbeta")];

/// Class labels the generator emits, in a fixed order.
pub fn classes() -> [&'static str; 2] {
    [MARKERS[0].0, MARKERS[1].0]
}

/// Generate `n_docs` documents (at least 10, so every class and the
/// unlabeled remainder keep a few members).
pub fn generate(n_docs: usize, seed: u64) -> Result<Vec<Document>> {
    if n_docs < 10 {
        return Err(Error::InvalidConfig(format!(
            "toy corpus needs at least 10 documents, got {n_docs}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // 35% topica, 25% topicb, the rest unlabeled; shuffled over positions.
    let n_a = ((n_docs as f64 * 0.35).round() as usize).max(2);
    let n_b = ((n_docs as f64 * 0.25).round() as usize).max(2);
    let mut assignment: Vec<Option<usize>> = Vec::with_capacity(n_docs);
    assignment.extend(std::iter::repeat(Some(0)).take(n_a));
    assignment.extend(std::iter::repeat(Some(1)).take(n_b));
    assignment.extend(std::iter::repeat(None).take(n_docs - n_a - n_b));
    assignment.shuffle(&mut rng);

    let width = (n_docs as f64).log10().ceil().max(1.0) as usize;
    let mut docs = Vec::with_capacity(n_docs);
    for (i, class) in assignment.iter().enumerate() {
        let len = rng.gen_range(6..=14);
        let mut tokens: Vec<&str> = (0..len)
            .map(|_| BACKGROUND[rng.gen_range(0..BACKGROUND.len())])
            .collect();
        if let Some(c) = class {
            let marker_count = rng.gen_range(1..=3);
            tokens.extend(std::iter::repeat(MARKERS[*c].1).take(marker_count));
        }
        tokens.shuffle(&mut rng);
        let labels: Vec<&str> = class.iter().map(|&c| MARKERS[c].0).collect();
        docs.push(Document::new(
            format!("doc{i:0width$}"),
            labels,
            tokens.join(" "),
        ));
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Stopwords};

    #[test]
    fn generation_is_deterministic() {
        let a = generate(40, 7).unwrap();
        let b = generate(40, 7).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.labels, y.labels);
            assert_eq!(x.text, y.text);
        }
        let c = generate(40, 8).unwrap();
        assert!(a.iter().zip(&c).any(|(x, y)| x.text != y.text));
    }

    #[test]
    fn markers_appear_exactly_in_their_class() {
        let docs = generate(60, 1).unwrap();
        for (class, marker) in MARKERS {
            let members = docs.iter().filter(|d| d.labels.contains(class)).count();
            assert!(members >= 2, "{class} has too few members");
            for d in &docs {
                let has_marker = d.text.split(' ').any(|t| t == marker);
                assert_eq!(has_marker, d.labels.contains(class), "doc {}", d.id);
            }
        }
        let unlabeled = docs.iter().filter(|d| d.labels.is_empty()).count();
        assert!(unlabeled >= 2);
    }

    #[test]
    fn corpus_builds_and_tasks_are_sound() {
        let docs = generate(30, 3).unwrap();
        let corpus = build_corpus(&docs, &Stopwords::none()).unwrap();
        for class in classes() {
            let task = corpus.binary_task(class);
            assert!(task.positives() >= 2);
            assert!(task.positives() < corpus.n_docs());
        }
    }

    #[test]
    fn tiny_sizes_are_rejected() {
        assert!(generate(9, 0).is_err());
        assert!(generate(10, 0).is_ok());
    }
}
