//! Word-vector loading, sentence vectors by word averaging, and the
//! precomputed-sentence-vector path.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::preprocess::{Document, Sentence};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("format error at line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// What to do with words missing from the vocabulary when averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovPolicy {
    /// Drop the word from the average.
    Skip,
    /// Substitute a deterministic unit-norm vector keyed by (seed, lemma).
    Random { seed: u64 },
}

/// Word to dense-vector table with a fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    pub dimension: usize,
    table: HashMap<String, Vec<f64>>,
    pub oov_policy: OovPolicy,
    /// Number of duplicate words seen at load time (last entry won).
    pub duplicate_count: usize,
}

impl EmbeddingStore {
    pub fn new(dimension: usize, oov_policy: OovPolicy) -> Self {
        Self {
            dimension,
            table: HashMap::new(),
            oov_policy,
            duplicate_count: 0,
        }
    }

    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<(), EmbeddingError> {
        if vector.len() != self.dimension {
            return Err(EmbeddingError::DimensionMismatch {
                expected: self.dimension,
                got: vector.len(),
            });
        }
        if self.table.insert(word.to_string(), vector).is_some() {
            self.duplicate_count += 1;
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.table.get(word).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Vector for a lemma under the store's OOV policy.
    fn resolve(&self, lemma: &str) -> Option<Vec<f64>> {
        if let Some(v) = self.get(lemma) {
            return Some(v.to_vec());
        }
        match self.oov_policy {
            OovPolicy::Skip => None,
            OovPolicy::Random { seed } => Some(random_unit_vector(seed, lemma, self.dimension)),
        }
    }
}

/// Deterministic pseudo-random unit vector for an OOV lemma.
pub fn random_unit_vector(seed: u64, lemma: &str, dimension: usize) -> Vec<f64> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(lemma.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut v: Vec<f64> = (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v[0] = 1.0;
    } else {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// Loads word vectors in word2vec text format: a `<count> <dimension>` header
/// line, then one `<word> <c1> ... <cd>` line per word.
pub fn load_word_vectors(path: &Path, oov_policy: OovPolicy) -> Result<EmbeddingStore, EmbeddingError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .ok_or_else(|| EmbeddingError::Format {
            line: 1,
            reason: "missing header".into(),
        })??;
    let mut parts = header.split_whitespace();
    let (count, dimension) = match (parts.next(), parts.next(), parts.next()) {
        (Some(c), Some(d), None) => {
            let count: usize = c.parse().map_err(|_| EmbeddingError::Format {
                line: 1,
                reason: format!("bad vocabulary count '{c}'"),
            })?;
            let dim: usize = d.parse().map_err(|_| EmbeddingError::Format {
                line: 1,
                reason: format!("bad dimension '{d}'"),
            })?;
            (count, dim)
        }
        _ => {
            return Err(EmbeddingError::Format {
                line: 1,
                reason: "header must be '<count> <dimension>'".into(),
            })
        }
    };
    if dimension == 0 {
        return Err(EmbeddingError::Format {
            line: 1,
            reason: "dimension must be positive".into(),
        });
    }

    let mut store = EmbeddingStore::new(dimension, oov_policy);
    let mut rows = 0usize;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 2;
        let mut fields = line.split_whitespace();
        let word = fields.next().ok_or_else(|| EmbeddingError::Format {
            line: line_no,
            reason: "empty row".into(),
        })?;
        let mut vector = Vec::with_capacity(dimension);
        for f in fields {
            let x: f64 = f.parse().map_err(|_| EmbeddingError::Format {
                line: line_no,
                reason: format!("non-numeric component '{f}'"),
            })?;
            vector.push(x);
        }
        if vector.len() != dimension {
            return Err(EmbeddingError::Format {
                line: line_no,
                reason: format!(
                    "expected {dimension} components, got {}",
                    vector.len()
                ),
            });
        }
        store.insert(word, vector)?;
        rows += 1;
    }
    if rows != count {
        return Err(EmbeddingError::Format {
            line: 1,
            reason: format!("header declares {count} words, file has {rows}"),
        });
    }
    Ok(store)
}

/// Where sentence vectors come from.
#[derive(Debug, Clone)]
pub enum SentenceVectorSource {
    /// Mean of word vectors (non-stopword lemmas unless `include_stopwords`).
    AverageWords {
        store: EmbeddingStore,
        include_stopwords: bool,
    },
    /// Externally computed vectors keyed by (doc_id, sentence_index).
    Precomputed {
        dimension: usize,
        table: HashMap<(String, usize), Vec<f64>>,
    },
}

impl SentenceVectorSource {
    pub fn average(store: EmbeddingStore) -> Self {
        Self::AverageWords {
            store,
            include_stopwords: false,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::AverageWords { store, .. } => store.dimension,
            Self::Precomputed { dimension, .. } => *dimension,
        }
    }

    /// Sentence vector per the source mode, or `None` when no word
    /// contributes (AVERAGE_WORDS) or the table has no entry (PRECOMPUTED).
    pub fn sentence_vector(
        &self,
        doc_id: &str,
        sentence: &Sentence,
    ) -> Result<Option<Vec<f64>>, EmbeddingError> {
        match self {
            Self::AverageWords {
                store,
                include_stopwords,
            } => {
                let mut sum = vec![0.0; store.dimension];
                let mut contributors = 0usize;
                for token in &sentence.tokens {
                    if token.is_stopword && !include_stopwords {
                        continue;
                    }
                    if let Some(v) = store.resolve(&token.lemma) {
                        for (acc, x) in sum.iter_mut().zip(&v) {
                            *acc += x;
                        }
                        contributors += 1;
                    }
                }
                if contributors == 0 {
                    return Ok(None);
                }
                for x in &mut sum {
                    *x /= contributors as f64;
                }
                Ok(Some(sum))
            }
            Self::Precomputed { dimension, table } => {
                match table.get(&(doc_id.to_string(), sentence.index)) {
                    Some(v) => {
                        if v.len() != *dimension {
                            return Err(EmbeddingError::DimensionMismatch {
                                expected: *dimension,
                                got: v.len(),
                            });
                        }
                        Ok(Some(v.clone()))
                    }
                    None => Ok(None),
                }
            }
        }
    }

    /// Clone of `doc` with every sentence's `vector` field filled from this
    /// source. Sentences the source cannot cover keep `vector = None`.
    pub fn attach(&self, doc: &Document) -> Result<Document, EmbeddingError> {
        let mut out = doc.clone();
        for sentence in &mut out.sentences {
            if sentence.vector.is_none() {
                sentence.vector = self.sentence_vector(&doc.id, sentence)?;
            }
        }
        Ok(out)
    }
}

/// Plain cosine similarity, in [-1, 1].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Cosine clamped to [0, 1]; the form used everywhere a graph weight is made.
pub fn cosine_clamped(u: &[f64], v: &[f64]) -> Result<f64, EmbeddingError> {
    Ok(cosine(u, v)?.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{build_document, LemmaDictionary, StopwordList};
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    fn store2(entries: &[(&str, [f64; 2])]) -> EmbeddingStore {
        let mut s = EmbeddingStore::new(2, OovPolicy::Skip);
        for (w, v) in entries {
            s.insert(w, v.to_vec()).unwrap();
        }
        s
    }

    fn sentence_of(words: &str) -> Sentence {
        build_document("t", words, &LemmaDictionary::new(), &StopwordList::new())
            .unwrap()
            .sentences
            .remove(0)
    }

    #[test]
    fn average_of_two_words() {
        let src = SentenceVectorSource::average(store2(&[("a", [1.0, 2.0]), ("b", [3.0, 4.0])]));
        let v = src.sentence_vector("d", &sentence_of("a b")).unwrap().unwrap();
        assert_eq!(v, vec![2.0, 3.0]);
    }

    #[test]
    fn single_word_identity() {
        let src = SentenceVectorSource::average(store2(&[("a", [5.0, 0.0])]));
        let v = src.sentence_vector("d", &sentence_of("a")).unwrap().unwrap();
        assert_eq!(v, vec![5.0, 0.0]);
    }

    #[test]
    fn oov_skipped_from_mean() {
        let src = SentenceVectorSource::average(store2(&[("a", [1.0, 0.0]), ("b", [0.0, 1.0])]));
        let v = src
            .sentence_vector("d", &sentence_of("a b zzz"))
            .unwrap()
            .unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
    }

    #[test]
    fn all_oov_is_absent() {
        let src = SentenceVectorSource::average(store2(&[]));
        assert!(src.sentence_vector("d", &sentence_of("x y")).unwrap().is_none());
    }

    #[test]
    fn random_oov_reproducible() {
        let a = random_unit_vector(7, "слово", 10);
        let b = random_unit_vector(7, "слово", 10);
        assert_eq!(a, b);
        let c = random_unit_vector(8, "слово", 10);
        assert_ne!(a, c);
        assert_abs_diff_eq!(
            a.iter().map(|x| x * x).sum::<f64>().sqrt(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn precomputed_lookup_and_mismatch() {
        let mut table = HashMap::new();
        table.insert(("d".to_string(), 0), vec![1.0, 2.0]);
        table.insert(("d".to_string(), 1), vec![1.0, 2.0, 3.0]);
        let src = SentenceVectorSource::Precomputed { dimension: 2, table };
        let s0 = sentence_of("a");
        assert_eq!(src.sentence_vector("d", &s0).unwrap().unwrap(), vec![1.0, 2.0]);
        let mut s1 = s0.clone();
        s1.index = 1;
        assert!(matches!(
            src.sentence_vector("d", &s1),
            Err(EmbeddingError::DimensionMismatch { .. })
        ));
        let mut s2 = s0.clone();
        s2.index = 9;
        assert!(src.sentence_vector("d", &s2).unwrap().is_none());
    }

    #[test]
    fn cosine_basics() {
        assert_abs_diff_eq!(cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cosine_zero_vector_error() {
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(EmbeddingError::ZeroVector)
        ));
    }

    #[test]
    fn clamped_cosine() {
        assert_eq!(cosine_clamped(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(
            cosine_clamped(&[1.0, 2.0], &[1.0, 2.0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cosine_clamped(&[2.0, 1.0], &[1.0, 2.0]).unwrap(),
            0.8,
            epsilon = 1e-12
        );
    }

    #[test]
    fn loads_word2vec_text_format() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "3 2").unwrap();
        writeln!(f, "кіт 1.0 0.5").unwrap();
        writeln!(f, "дім -0.25 2").unwrap();
        writeln!(f, "кіт 0.0 1.0").unwrap();
        let store = load_word_vectors(f.path(), OovPolicy::Skip).unwrap();
        assert_eq!(store.dimension, 2);
        assert_eq!(store.len(), 2);
        assert_eq!(store.duplicate_count, 1);
        // last entry wins
        assert_eq!(store.get("кіт").unwrap(), &[0.0, 1.0]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn nonzero_vec() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-5.0f64..5.0, 3)
                .prop_filter("non-zero", |v| v.iter().any(|x| x.abs() > 1e-3))
        }

        proptest! {
            #[test]
            fn cosine_symmetric(u in nonzero_vec(), v in nonzero_vec()) {
                prop_assert_eq!(cosine(&u, &v).unwrap(), cosine(&v, &u).unwrap());
            }

            #[test]
            fn cosine_scale_invariant(
                u in nonzero_vec(),
                v in nonzero_vec(),
                a in 0.1f64..10.0,
                b in 0.1f64..10.0,
            ) {
                let us: Vec<f64> = u.iter().map(|x| a * x).collect();
                let vs: Vec<f64> = v.iter().map(|x| b * x).collect();
                let base = cosine(&u, &v).unwrap();
                prop_assert!((cosine(&us, &vs).unwrap() - base).abs() < 1e-9);
            }

            #[test]
            fn averaging_ignores_token_order(
                order in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
            ) {
                let src = SentenceVectorSource::average(store2(&[
                    ("a", [1.0, 0.5]),
                    ("b", [-2.0, 3.0]),
                    ("c", [0.25, 4.0]),
                    ("d", [7.0, -1.5]),
                ]));
                let words = ["a", "b", "c", "d"];
                let base = src.sentence_vector("d", &sentence_of("a b c d")).unwrap().unwrap();
                let shuffled_text: Vec<&str> = order.iter().map(|&i| words[i]).collect();
                let shuffled = src
                    .sentence_vector("d", &sentence_of(&shuffled_text.join(" ")))
                    .unwrap()
                    .unwrap();
                for (x, y) in base.iter().zip(&shuffled) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let cases = [
            "2\nа 1.0",
            "1 2\nа 1.0",
            "1 2\nа 1.0 x",
            "2 2\nа 1.0 2.0",
        ];
        for text in cases {
            let mut f = tempfile::NamedTempFile::new().unwrap();
            f.write_all(text.as_bytes()).unwrap();
            assert!(matches!(
                load_word_vectors(f.path(), OovPolicy::Skip),
                Err(EmbeddingError::Format { .. })
            ));
        }
    }
}
