//! Sentence similarity measures: the alpha-mixed entity/cosine measure and
//! the distance-weighted cosine.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::embeddings::cosine_clamped;
use crate::preprocess::Sentence;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("distance-weighted similarity of a sentence with itself (index {0})")]
    SameSentence(usize),
}

/// Graph-construction parameters: `alpha` mixes entity overlap with cosine
/// (PAV), `theta` is the MSV edge threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityParams {
    pub alpha: f64,
    pub theta: f64,
}

impl SimilarityParams {
    pub fn new(alpha: f64, theta: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&alpha));
        debug_assert!(theta >= 0.0);
        Self { alpha, theta }
    }
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self { alpha: 0.5, theta: 0.0 }
    }
}

/// Entity-overlap ratio |A ∩ B| / |A ∪ B|, 0 when the union is empty.
pub fn uot(entities_i: &BTreeSet<String>, entities_j: &BTreeSet<String>) -> f64 {
    let intersection = entities_i.intersection(entities_j).count();
    let union = entities_i.len() + entities_j.len() - intersection;
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Clamped cosine of two attached sentence vectors; 0 when either is
/// absent or zero.
fn clamped_cos_or_zero(s_i: &Sentence, s_j: &Sentence) -> f64 {
    match (&s_i.vector, &s_j.vector) {
        (Some(u), Some(v)) => cosine_clamped(u, v).unwrap_or(0.0),
        _ => 0.0,
    }
}

/// `alpha * uot + (1 - alpha) * clamped cosine`. Sentences must carry
/// attached vectors; an absent vector degrades the cosine term to 0.
pub fn sim_mixed(s_i: &Sentence, s_j: &Sentence, alpha: f64) -> f64 {
    alpha * uot(&s_i.entities, &s_j.entities) + (1.0 - alpha) * clamped_cos_or_zero(s_i, s_j)
}

/// Clamped cosine divided by sentence distance |i - j|.
pub fn sim_distance_weighted(s_i: &Sentence, s_j: &Sentence) -> Result<f64, SimilarityError> {
    if s_i.index == s_j.index {
        return Err(SimilarityError::SameSentence(s_i.index));
    }
    let distance = s_i.index.abs_diff(s_j.index) as f64;
    Ok(clamped_cos_or_zero(s_i, s_j) / distance)
}
