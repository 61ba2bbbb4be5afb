//! Benchmark protocols: document discrimination (DDT), insertion (IT) and
//! parameter sweeps with paired seeds.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use rayon::prelude::*;

use crate::embeddings::{EmbeddingError, SentenceVectorSource};
use crate::graph::{build_graph, coherence_score, Approach};
use crate::preprocess::Document;
use crate::similarity::SimilarityParams;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("document has {0} sentences, need at least 2 to permute")]
    TooShort(usize),
    #[error("no document in the corpus is eligible for the task")]
    EmptyEligibleSet,
    #[error("approach {0} has no sweep parameter")]
    UnsupportedApproach(Approach),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Ddt,
    It,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Ddt => write!(f, "DDT"),
            Task::It => write!(f, "IT"),
        }
    }
}

/// One trial of either task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub doc_id: String,
    pub trial: usize,
    pub correct: bool,
    pub original_score: f64,
    /// DDT: score of the shuffled competitor.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub competitor_score: Option<f64>,
    /// IT: best-scoring reinsertion position (lowest index on ties).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_position: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: Task,
    pub approach: Approach,
    pub alpha: f64,
    pub theta: f64,
    pub accuracy: f64,
    pub seed: u64,
    pub trials: Vec<TrialOutcome>,
    /// Ids of documents too short for the task.
    pub skipped: Vec<String>,
}

/// Stable per-(document, trial) seed so sweeps reuse identical permutations
/// across grid points.
pub fn derive_seed(master: u64, doc_id: &str, trial: usize) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(doc_id.as_bytes());
    hasher.update((trial as u64).to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Uniformly random non-identity reordering of the sentences, re-drawn until
/// it differs from the original order. Indices are re-packed `0..N-1`.
pub fn permute_document(doc: &Document, rng_seed: u64) -> Result<Document, EvalError> {
    let n = doc.len();
    if n < 2 {
        return Err(EvalError::TooShort(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        order.shuffle(&mut rng);
        if order.iter().enumerate().any(|(i, &o)| i != o) {
            break;
        }
    }
    let mut out = doc.clone();
    out.sentences = order
        .iter()
        .enumerate()
        .map(|(index, &o)| {
            let mut s = doc.sentences[o].clone();
            s.index = index;
            s
        })
        .collect();
    Ok(out)
}

fn score_doc(doc: &Document, approach: Approach, params: &SimilarityParams) -> f64 {
    coherence_score(&build_graph(doc, approach, params))
}

/// Document discrimination: for each document, `k` seeded shuffles; a trial
/// is correct iff the original scores strictly higher than the shuffle.
pub fn run_ddt(
    corpus: &[Document],
    approach: Approach,
    params: &SimilarityParams,
    source: &SentenceVectorSource,
    permutations_per_doc: usize,
    seed: u64,
) -> Result<TaskReport, EvalError> {
    assert!(permutations_per_doc >= 1);
    let mut eligible = Vec::new();
    let mut skipped = Vec::new();
    for doc in corpus {
        if doc.len() >= 2 {
            eligible.push(doc);
        } else {
            skipped.push(doc.id.clone());
        }
    }
    if eligible.is_empty() {
        return Err(EvalError::EmptyEligibleSet);
    }

    let per_doc: Result<Vec<Vec<TrialOutcome>>, EvalError> = eligible
        .par_iter()
        .map(|doc| {
            let attached = source.attach(doc)?;
            let original_score = score_doc(&attached, approach, params);
            let mut trials = Vec::with_capacity(permutations_per_doc);
            for t in 0..permutations_per_doc {
                let shuffled = permute_document(&attached, derive_seed(seed, &doc.id, t))?;
                let competitor_score = score_doc(&shuffled, approach, params);
                trials.push(TrialOutcome {
                    doc_id: doc.id.clone(),
                    trial: t,
                    correct: original_score > competitor_score,
                    original_score,
                    competitor_score: Some(competitor_score),
                    chosen_position: None,
                });
            }
            Ok(trials)
        })
        .collect();

    let mut trials: Vec<TrialOutcome> = per_doc?.into_iter().flatten().collect();
    trials.sort_by(|a, b| a.doc_id.cmp(&b.doc_id).then(a.trial.cmp(&b.trial)));
    skipped.sort();
    Ok(assemble(Task::Ddt, approach, params, trials, skipped, seed))
}

/// Insertion task: remove one seeded-random sentence, reinsert at every
/// position; correct iff the original position is the strict unique argmax.
pub fn run_insertion(
    corpus: &[Document],
    approach: Approach,
    params: &SimilarityParams,
    source: &SentenceVectorSource,
    seed: u64,
) -> Result<TaskReport, EvalError> {
    let mut eligible = Vec::new();
    let mut skipped = Vec::new();
    for doc in corpus {
        if doc.len() >= 3 {
            eligible.push(doc);
        } else {
            skipped.push(doc.id.clone());
        }
    }
    if eligible.is_empty() {
        return Err(EvalError::EmptyEligibleSet);
    }

    let per_doc: Result<Vec<TrialOutcome>, EvalError> = eligible
        .par_iter()
        .map(|doc| {
            let attached = source.attach(doc)?;
            let n = attached.len();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &doc.id, 0));
            let removed = rng.gen_range(0..n);

            let mut rest = attached.clone();
            let sentence = rest.sentences.remove(removed);

            let mut scores = Vec::with_capacity(n);
            for position in 0..n {
                let mut variant = rest.clone();
                variant.sentences.insert(position, sentence.clone());
                for (index, s) in variant.sentences.iter_mut().enumerate() {
                    s.index = index;
                }
                scores.push(score_doc(&variant, approach, params));
            }

            let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let chosen = scores.iter().position(|&s| s == best).unwrap();
            let unique = scores.iter().filter(|&&s| s == best).count() == 1;
            Ok(TrialOutcome {
                doc_id: doc.id.clone(),
                trial: 0,
                correct: unique && chosen == removed,
                original_score: scores[removed],
                competitor_score: None,
                chosen_position: Some(chosen),
            })
        })
        .collect();

    let mut trials = per_doc?;
    trials.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    skipped.sort();
    Ok(assemble(Task::It, approach, params, trials, skipped, seed))
}

fn assemble(
    task: Task,
    approach: Approach,
    params: &SimilarityParams,
    trials: Vec<TrialOutcome>,
    skipped: Vec<String>,
    seed: u64,
) -> TaskReport {
    let correct = trials.iter().filter(|t| t.correct).count();
    TaskReport {
        task,
        approach,
        alpha: params.alpha,
        theta: params.theta,
        accuracy: correct as f64 / trials.len() as f64,
        seed,
        trials,
        skipped,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub accuracy: f64,
    pub n_trials: usize,
}

/// Runs the task at every grid point with the same master seed, so all grid
/// points see identical permutations/removals. PAV sweeps alpha, MSV theta;
/// SSV has no parameter.
pub fn sweep(
    corpus: &[Document],
    approach: Approach,
    task: Task,
    grid: &[f64],
    source: &SentenceVectorSource,
    permutations_per_doc: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, EvalError> {
    if approach == Approach::Ssv {
        return Err(EvalError::UnsupportedApproach(approach));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &value in grid {
        let params = match approach {
            Approach::Pav => SimilarityParams { alpha: value, theta: 0.0 },
            Approach::Msv => SimilarityParams { alpha: 0.0, theta: value },
            Approach::Ssv => unreachable!(),
        };
        let report = match task {
            Task::Ddt => run_ddt(corpus, approach, &params, source, permutations_per_doc, seed)?,
            Task::It => run_insertion(corpus, approach, &params, source, seed)?,
        };
        rows.push(SweepRow {
            param: value,
            accuracy: report.accuracy,
            n_trials: report.trials.len(),
        });
    }
    Ok(rows)
}

/// Report file: one JSON trial record per line, then a JSON summary record.
pub fn write_report<W: Write>(report: &TaskReport, mut out: W) -> std::io::Result<()> {
    for trial in &report.trials {
        serde_json::to_writer(&mut out, trial)?;
        out.write_all(b"\n")?;
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        task: Task,
        approach: Approach,
        alpha: f64,
        theta: f64,
        accuracy: f64,
        n_trials: usize,
        seed: u64,
        skipped: &'a [String],
    }
    serde_json::to_writer(
        &mut out,
        &Summary {
            task: report.task,
            approach: report.approach,
            alpha: report.alpha,
            theta: report.theta,
            accuracy: report.accuracy,
            n_trials: report.trials.len(),
            seed: report.seed,
            skipped: &report.skipped,
        },
    )?;
    out.write_all(b"\n")
}

/// Sweep rows as CSV with the `param,accuracy,n_trials` header.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "param,accuracy,n_trials")?;
    for row in rows {
        writeln!(out, "{},{},{}", row.param, row.accuracy, row.n_trials)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::Sentence;
    use std::collections::BTreeSet;

    fn vec_doc(id: &str, vectors: Vec<Vec<f64>>) -> Document {
        let sentences = vectors
            .into_iter()
            .enumerate()
            .map(|(index, v)| Sentence {
                index,
                tokens: Vec::new(),
                entities: BTreeSet::new(),
                vector: Some(v),
            })
            .collect();
        Document { id: id.into(), sentences }
    }

    fn attached_source() -> SentenceVectorSource {
        // vectors already attached; any source works as a no-op fallback
        SentenceVectorSource::Precomputed {
            dimension: 0,
            table: Default::default(),
        }
    }

    fn surfaces(doc: &Document) -> Vec<Vec<f64>> {
        doc.sentences
            .iter()
            .map(|s| s.vector.clone().unwrap())
            .collect()
    }

    #[test]
    fn permute_two_sentences_forced_swap() {
        let doc = vec_doc("d", vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        for seed in 0..20 {
            let p = permute_document(&doc, seed).unwrap();
            assert_eq!(surfaces(&p), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
            assert_eq!(p.sentences[0].index, 0);
            assert_eq!(p.sentences[1].index, 1);
        }
    }

    #[test]
    fn permute_too_short() {
        let doc = vec_doc("d", vec![vec![1.0]]);
        assert!(matches!(permute_document(&doc, 1), Err(EvalError::TooShort(1))));
    }

    #[test]
    fn permute_seed_regression() {
        // pinned once from the seeded generator; guards RNG stability
        let doc = vec_doc(
            "d",
            (0..5).map(|i| vec![i as f64, 1.0]).collect(),
        );
        let p = permute_document(&doc, 42).unwrap();
        let order: Vec<usize> = p
            .sentences
            .iter()
            .map(|s| s.vector.as_ref().unwrap()[0] as usize)
            .collect();
        assert_eq!(p, permute_document(&doc, 42).unwrap());
        // recorded from ChaCha8 seed 42 on first verified run
        assert_eq!(order, vec![0, 2, 4, 3, 1]);
    }

    #[test]
    fn ddt_single_correct_trial() {
        // coherent chain: adjacent vectors similar, ends dissimilar
        let doc = vec_doc(
            "d",
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.9, 0.5, 0.0],
                vec![0.5, 0.9, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![-0.4, 0.9, 0.0],
            ],
        );
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let report = run_ddt(&[doc], Approach::Msv, &params, &attached_source(), 3, 9)
            .unwrap();
        assert_eq!(report.trials.len(), 3);
        assert!(report.accuracy > 0.0);
        for t in &report.trials {
            assert_eq!(t.correct, t.original_score > t.competitor_score.unwrap());
        }
    }

    #[test]
    fn ddt_tie_is_incorrect() {
        // identical sentences: every permutation scores the same
        let doc = vec_doc("d", vec![vec![1.0, 1.0]; 4]);
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let report = run_ddt(&[doc], Approach::Msv, &params, &attached_source(), 2, 1)
            .unwrap();
        assert_eq!(report.accuracy, 0.0);
    }

    #[test]
    fn ddt_skips_short_docs() {
        let long = vec_doc("b", vec![vec![1.0, 0.0], vec![0.9, 0.1]]);
        let short = vec_doc("a", vec![vec![1.0, 0.0]]);
        let params = SimilarityParams::default();
        let report = run_ddt(
            &[long, short],
            Approach::Msv,
            &params,
            &attached_source(),
            1,
            0,
        )
        .unwrap();
        assert_eq!(report.skipped, vec!["a".to_string()]);
        assert_eq!(report.trials.len(), 1);
    }

    #[test]
    fn ddt_empty_eligible_set() {
        let short = vec_doc("a", vec![vec![1.0]]);
        let params = SimilarityParams::default();
        assert!(matches!(
            run_ddt(&[short], Approach::Msv, &params, &attached_source(), 1, 0),
            Err(EvalError::EmptyEligibleSet)
        ));
    }

    #[test]
    fn insertion_identical_sentences_incorrect() {
        let doc = vec_doc("d", vec![vec![1.0, 1.0]; 3]);
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let report =
            run_insertion(&[doc], Approach::Msv, &params, &attached_source(), 5).unwrap();
        assert_eq!(report.accuracy, 0.0);
        assert!(!report.trials[0].correct);
    }

    #[test]
    fn insertion_reports_chosen_position() {
        let doc = vec_doc(
            "d",
            vec![vec![1.0, 0.0], vec![0.9, 0.4], vec![0.1, 1.0]],
        );
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let report =
            run_insertion(&[doc], Approach::Msv, &params, &attached_source(), 5).unwrap();
        assert!(report.trials[0].chosen_position.is_some());
    }

    #[test]
    fn reproducible_reports() {
        let docs = vec![
            vec_doc("a", vec![vec![1.0, 0.2], vec![0.8, 0.4], vec![0.2, 1.0]]),
            vec_doc("b", vec![vec![0.3, 1.0], vec![0.4, 0.9]]),
        ];
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let r1 = run_ddt(&docs, Approach::Msv, &params, &attached_source(), 4, 77).unwrap();
        let r2 = run_ddt(&docs, Approach::Msv, &params, &attached_source(), 4, 77).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn accuracy_self_consistent() {
        let docs = vec![vec_doc(
            "a",
            vec![vec![1.0, 0.2], vec![0.8, 0.4], vec![0.2, 1.0]],
        )];
        let params = SimilarityParams { alpha: 0.0, theta: 0.0 };
        let r = run_ddt(&docs, Approach::Msv, &params, &attached_source(), 8, 3).unwrap();
        let recomputed =
            r.trials.iter().filter(|t| t.correct).count() as f64 / r.trials.len() as f64;
        assert_eq!(r.accuracy, recomputed);
    }

    #[test]
    fn sweep_rejects_ssv() {
        let docs = vec![vec_doc("a", vec![vec![1.0], vec![1.0]])];
        assert!(matches!(
            sweep(&docs, Approach::Ssv, Task::Ddt, &[0.0], &attached_source(), 1, 0),
            Err(EvalError::UnsupportedApproach(Approach::Ssv))
        ));
    }

    #[test]
    fn sweep_single_point_matches_direct_run() {
        let docs = vec![vec_doc(
            "a",
            vec![vec![1.0, 0.2], vec![0.8, 0.4], vec![0.2, 1.0]],
        )];
        let rows = sweep(
            &docs,
            Approach::Msv,
            Task::Ddt,
            &[0.2],
            &attached_source(),
            5,
            11,
        )
        .unwrap();
        let params = SimilarityParams { alpha: 0.0, theta: 0.2 };
        let direct =
            run_ddt(&docs, Approach::Msv, &params, &attached_source(), 5, 11).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].accuracy, direct.accuracy);
        assert_eq!(rows[0].n_trials, direct.trials.len());
    }

    #[test]
    fn sweep_grid_of_eleven() {
        let docs = vec![vec_doc(
            "a",
            vec![vec![1.0, 0.2], vec![0.8, 0.4], vec![0.2, 1.0]],
        )];
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let rows = sweep(
            &docs,
            Approach::Pav,
            Task::Ddt,
            &grid,
            &attached_source(),
            2,
            5,
        )
        .unwrap();
        assert_eq!(rows.len(), 11);
    }

    #[test]
    fn csv_shape() {
        let rows = vec![
            SweepRow { param: 0.0, accuracy: 0.5, n_trials: 10 },
            SweepRow { param: 0.5, accuracy: 0.25, n_trials: 10 },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "param,accuracy,n_trials\n0,0.5,10\n0.5,0.25,10\n");
    }
}
