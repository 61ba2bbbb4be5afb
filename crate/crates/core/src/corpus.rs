//! Line-delimited file formats: the canonical preprocessed corpus and the
//! precomputed sentence-vector table. See docs/formats.md for the layout.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embeddings::SentenceVectorSource;
use crate::preprocess::{extract_entities, Document, Sentence, Token};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: record has an empty id")]
    MissingId { line: usize },
    #[error("line {line}: duplicate document id '{id}'")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: document has no sentences")]
    EmptySentences { line: usize },
    #[error("line {line}: vector dimension {got} differs from {expected}")]
    VectorDimension {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One corpus record: `{"id": ..., "sentences": [[[surface, lemma, stop], ...], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct DocumentRecord {
    id: String,
    sentences: Vec<Vec<(String, String, bool)>>,
}

impl From<&Document> for DocumentRecord {
    fn from(doc: &Document) -> Self {
        DocumentRecord {
            id: doc.id.clone(),
            sentences: doc
                .sentences
                .iter()
                .map(|s| {
                    s.tokens
                        .iter()
                        .map(|t| (t.surface.clone(), t.lemma.clone(), t.is_stopword))
                        .collect()
                })
                .collect(),
        }
    }
}

impl DocumentRecord {
    fn into_document(self) -> Document {
        let sentences = self
            .sentences
            .into_iter()
            .enumerate()
            .map(|(index, triples)| {
                let tokens: Vec<Token> = triples
                    .into_iter()
                    .map(|(surface, lemma, is_stopword)| Token {
                        surface,
                        lemma,
                        is_stopword,
                    })
                    .collect();
                let entities = extract_entities(&tokens);
                Sentence {
                    index,
                    tokens,
                    entities,
                    vector: None,
                }
            })
            .collect();
        Document {
            id: self.id,
            sentences,
        }
    }
}

/// Reads a canonical corpus file, one JSON document record per line.
/// Records without an id, with duplicate ids or without sentences are
/// rejected.
pub fn read_corpus(path: &Path) -> Result<Vec<Document>, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let record: DocumentRecord = serde_json::from_str(&line)
            .map_err(|source| CorpusError::Parse { line: line_no, source })?;
        if record.id.is_empty() {
            return Err(CorpusError::MissingId { line: line_no });
        }
        if record.sentences.is_empty() {
            return Err(CorpusError::EmptySentences { line: line_no });
        }
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                id: record.id,
            });
        }
        docs.push(record.into_document());
    }
    Ok(docs)
}

pub fn write_corpus<W: Write>(docs: &[Document], mut out: W) -> Result<(), CorpusError> {
    for doc in docs {
        let record = DocumentRecord::from(doc);
        serde_json::to_writer(&mut out, &record)
            .map_err(|source| CorpusError::Parse { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// One precomputed sentence vector:
/// `{"doc_id": ..., "sentence_index": ..., "vector": [...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct VectorRecord {
    doc_id: String,
    sentence_index: usize,
    vector: Vec<f64>,
}

/// Reads a precomputed sentence-vector file into a PRECOMPUTED source.
/// All vectors must share one dimension.
pub fn read_sentence_vectors(path: &Path) -> Result<SentenceVectorSource, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut table: HashMap<(String, usize), Vec<f64>> = HashMap::new();
    let mut dimension: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let record: VectorRecord = serde_json::from_str(&line)
            .map_err(|source| CorpusError::Parse { line: line_no, source })?;
        if record.doc_id.is_empty() {
            return Err(CorpusError::MissingId { line: line_no });
        }
        match dimension {
            None => dimension = Some(record.vector.len()),
            Some(d) if d != record.vector.len() => {
                return Err(CorpusError::VectorDimension {
                    line: line_no,
                    expected: d,
                    got: record.vector.len(),
                })
            }
            Some(_) => {}
        }
        table.insert((record.doc_id, record.sentence_index), record.vector);
    }
    Ok(SentenceVectorSource::Precomputed {
        dimension: dimension.unwrap_or(0),
        table,
    })
}

pub fn write_sentence_vectors<W: Write>(
    entries: &[(&str, usize, &[f64])],
    mut out: W,
) -> Result<(), CorpusError> {
    for (doc_id, sentence_index, vector) in entries {
        let record = VectorRecord {
            doc_id: doc_id.to_string(),
            sentence_index: *sentence_index,
            vector: vector.to_vec(),
        };
        serde_json::to_writer(&mut out, &record)
            .map_err(|source| CorpusError::Parse { line: 0, source })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
