//! Raw text to canonical [`Document`] form: sentence splitting, tokenization,
//! stopword flagging, dictionary lemmatization and entity-set extraction.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("no sentence survived preprocessing for document '{0}'")]
    EmptyDocument(String),
    #[error("malformed dictionary line {line}: expected 'surface<TAB>lemma'")]
    BadDictionaryLine { line: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A single word occurrence. `lemma` falls back to the lowercased surface
/// form when the dictionary has no entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub is_stopword: bool,
}

/// One sentence of a document. `entities` is the set of non-stopword lemmas;
/// `vector` is filled in later by a vector source, never during preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
    pub entities: BTreeSet<String>,
    pub vector: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Surface form (lowercased) to lemma map.
#[derive(Debug, Clone, Default)]
pub struct LemmaDictionary {
    entries: HashMap<String, String>,
}

impl LemmaDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: &str, lemma: &str) {
        self.entries
            .insert(surface.to_lowercase(), lemma.to_string());
    }

    pub fn lookup(&self, surface: &str) -> Option<&str> {
        self.entries.get(&surface.to_lowercase()).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Loads a UTF-8 file with one `surface<TAB>lemma` pair per line.
    /// Blank lines are ignored; a line without a tab or with an empty
    /// lemma is an error.
    pub fn load(path: &Path) -> Result<Self, PreprocessError> {
        let text = fs::read_to_string(path)?;
        let mut dict = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (surface, lemma) = line
                .split_once('\t')
                .ok_or(PreprocessError::BadDictionaryLine { line: i + 1 })?;
            let lemma = lemma.trim();
            if surface.is_empty() || lemma.is_empty() {
                return Err(PreprocessError::BadDictionaryLine { line: i + 1 });
            }
            dict.insert(surface, lemma);
        }
        Ok(dict)
    }
}

/// Exact-match stopword set over lowercased words.
#[derive(Debug, Clone, Default)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        let mut list = Self::new();
        for w in words {
            list.insert(w.as_ref());
        }
        list
    }

    pub fn insert(&mut self, word: &str) {
        self.words.insert(word.to_lowercase());
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    /// Loads a UTF-8 file with one word per line.
    pub fn load(path: &Path) -> Result<Self, PreprocessError> {
        let text = fs::read_to_string(path)?;
        Ok(Self::from_words(
            text.lines().map(|l| l.trim()).filter(|l| !l.is_empty()),
        ))
    }
}

/// Abbreviations that suppress a sentence split after their trailing dot.
/// Stored lowercased with the dot included, e.g. `табл.`.
#[derive(Debug, Clone)]
pub struct AbbreviationList {
    entries: HashSet<String>,
}

const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "табл.", "рис.", "див.", "напр.", "т.", "ін.", "с.", "р.", "ст.", "проф.",
    "акад.", "ім.", "грн.", "тис.", "млн.", "обл.", "вул.",
];

impl Default for AbbreviationList {
    fn default() -> Self {
        Self::from_words(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl AbbreviationList {
    pub fn empty() -> Self {
        Self {
            entries: HashSet::new(),
        }
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            entries: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    fn contains(&self, word_with_dot: &str) -> bool {
        self.entries.contains(&word_with_dot.to_lowercase())
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic()
}

fn is_word_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{02BC}' | '\u{2019}' | '-')
}

/// Splits text into sentences with the default abbreviation list.
pub fn split_sentences(text: &str) -> Vec<String> {
    split_sentences_with(text, &AbbreviationList::default())
}

/// A split happens after a run of terminal punctuation (`.` `!` `?` `…`)
/// that is followed by whitespace and then an uppercase letter or a digit.
/// A single dot closing a known abbreviation does not split.
pub fn split_sentences_with(text: &str, abbreviations: &AbbreviationList) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        if !is_terminal(chars[i]) {
            i += 1;
            continue;
        }
        // Consume the whole terminal run ("...", "?!", ...).
        let punct_start = i;
        while i < chars.len() && is_terminal(chars[i]) {
            i += 1;
        }
        let punct_len = i - punct_start;

        // Whitespace, then uppercase or digit, else not a boundary.
        let mut j = i;
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        let boundary = j > i
            && j < chars.len()
            && (chars[j].is_uppercase() || chars[j].is_ascii_digit());
        if !boundary {
            continue;
        }

        // Abbreviation check applies to a lone dot only.
        if punct_len == 1 && chars[punct_start] == '.' {
            let mut w = punct_start;
            while w > start && (is_word_char(chars[w - 1]) || is_word_joiner(chars[w - 1])) {
                w -= 1;
            }
            if w < punct_start {
                let word: String = chars[w..=punct_start].iter().collect();
                if abbreviations.contains(&word) {
                    continue;
                }
            }
        }

        let piece: String = chars[start..i].iter().collect();
        let piece = piece.trim();
        if !piece.is_empty() {
            sentences.push(piece.to_string());
        }
        start = j;
        i = j;
    }

    let tail: String = chars[start..].iter().collect();
    let tail = tail.trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// Tokens are maximal runs of alphabetic characters; apostrophes and hyphens
/// are kept when they sit between letters. Digits and punctuation are dropped.
pub fn tokenize_and_lemmatize(
    sentence_text: &str,
    dict: &LemmaDictionary,
    stops: &StopwordList,
) -> Vec<Token> {
    let chars: Vec<char> = sentence_text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();

    for (i, &c) in chars.iter().enumerate() {
        let joins = is_word_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|&n| is_word_char(n));
        if is_word_char(c) || joins {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(make_token(std::mem::take(&mut current), dict, stops));
        }
    }
    if !current.is_empty() {
        tokens.push(make_token(current, dict, stops));
    }
    tokens
}

fn make_token(surface: String, dict: &LemmaDictionary, stops: &StopwordList) -> Token {
    let lower = surface.to_lowercase();
    let lemma = dict.lookup(&lower).unwrap_or(&lower).to_string();
    let is_stopword = stops.contains(&lemma) || stops.contains(&lower);
    Token {
        surface,
        lemma,
        is_stopword,
    }
}

/// The set of non-stopword lemmas of a token list.
pub fn extract_entities(tokens: &[Token]) -> BTreeSet<String> {
    tokens
        .iter()
        .filter(|t| !t.is_stopword)
        .map(|t| t.lemma.clone())
        .collect()
}

/// Runs the full pipeline. Sentences that are empty after tokenization are
/// dropped and indices re-packed `0..N-1`.
pub fn build_document(
    id: &str,
    text: &str,
    dict: &LemmaDictionary,
    stops: &StopwordList,
) -> Result<Document, PreprocessError> {
    build_document_with(id, text, dict, stops, &AbbreviationList::default())
}

pub fn build_document_with(
    id: &str,
    text: &str,
    dict: &LemmaDictionary,
    stops: &StopwordList,
    abbreviations: &AbbreviationList,
) -> Result<Document, PreprocessError> {
    let mut sentences = Vec::new();
    for raw in split_sentences_with(text, abbreviations) {
        let tokens = tokenize_and_lemmatize(&raw, dict, stops);
        if tokens.is_empty() {
            continue;
        }
        let entities = extract_entities(&tokens);
        sentences.push(Sentence {
            index: sentences.len(),
            tokens,
            entities,
            vector: None,
        });
    }
    if sentences.is_empty() {
        return Err(PreprocessError::EmptyDocument(id.to_string()));
    }
    Ok(Document {
        id: id.to_string(),
        sentences,
    })
}
