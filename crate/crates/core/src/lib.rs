//! Text-coherence scoring over semantic similarity graphs.
//!
//! A document is preprocessed into sentences, each sentence gets a dense
//! vector (word averaging or a precomputed table), a directed weighted graph
//! is built over the sentences (PAV, SSV or MSV) and coherence is the mean
//! outgoing edge weight. The `evaluation` module benchmarks a scorer with
//! the document-discrimination and insertion tasks plus parameter sweeps.

pub mod corpus;
pub mod embeddings;
pub mod evaluation;
pub mod graph;
pub mod preprocess;
pub mod similarity;
pub mod synth;

pub use embeddings::{
    cosine, cosine_clamped, load_word_vectors, EmbeddingError, EmbeddingStore, OovPolicy,
    SentenceVectorSource,
};
pub use evaluation::{
    permute_document, run_ddt, run_insertion, sweep, EvalError, SweepRow, Task, TaskReport,
    TrialOutcome,
};
pub use graph::{
    build_graph, build_msv, build_pav, build_ssv, coherence_score, Approach, CoherenceGraph, Edge,
};
pub use preprocess::{
    build_document, extract_entities, split_sentences, tokenize_and_lemmatize, Document,
    LemmaDictionary, PreprocessError, Sentence, StopwordList, Token,
};
pub use similarity::{sim_distance_weighted, sim_mixed, uot, SimilarityError, SimilarityParams};
