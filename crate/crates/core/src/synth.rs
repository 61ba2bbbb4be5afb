//! Synthetic planted-coherence corpus: consecutive sentences share entity
//! lemmas and drift smoothly in embedding space, so the original order is
//! measurably more coherent than any shuffle.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::SentenceVectorSource;
use crate::evaluation::derive_seed;
use crate::preprocess::{Document, Sentence, Token};

#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub n_docs: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub dimension: usize,
    /// Step size of the random walk between consecutive sentence vectors.
    /// Smaller values give smoother, more coherent chains.
    pub drift: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n_docs: 100,
            min_sentences: 8,
            max_sentences: 14,
            dimension: 16,
            drift: 0.35,
            seed: 7,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dimension: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// Generates the corpus plus a PRECOMPUTED vector source covering it.
/// Each sentence i carries entities {e_i, e_{i+1}} so only neighbors share
/// one, and its vector is one step of a smooth random walk.
pub fn planted_corpus(config: &PlantedConfig) -> (Vec<Document>, SentenceVectorSource) {
    let mut docs = Vec::with_capacity(config.n_docs);
    let mut table = HashMap::new();

    for d in 0..config.n_docs {
        let id = format!("planted-{d:04}");
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &id, 0));
        let n = rng.gen_range(config.min_sentences..=config.max_sentences);

        let mut vector = random_unit(&mut rng, config.dimension);
        let mut sentences = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                let step = random_unit(&mut rng, config.dimension);
                let next: Vec<f64> = vector
                    .iter()
                    .zip(&step)
                    .map(|(v, s)| v + config.drift * s)
                    .collect();
                vector = normalize(next);
            }
            let words = [format!("e{i}"), format!("e{}", i + 1)];
            let tokens: Vec<Token> = words
                .iter()
                .map(|w| Token {
                    surface: w.clone(),
                    lemma: w.clone(),
                    is_stopword: false,
                })
                .collect();
            let entities = tokens.iter().map(|t| t.lemma.clone()).collect();
            table.insert((id.clone(), i), vector.clone());
            sentences.push(Sentence {
                index: i,
                tokens,
                entities,
                vector: None,
            });
        }
        docs.push(Document { id, sentences });
    }

    let source = SentenceVectorSource::Precomputed {
        dimension: config.dimension,
        table,
    };
    (docs, source)
}
