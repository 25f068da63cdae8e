//! Study text to tf-idf vectors.
//!
//! Pipeline per document: [`tokenize`] -> [`remove_stopwords`] -> [`stem`],
//! then [`build_matrix`] weighs raw term counts by `ln(N / df)`.

mod porter;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

pub use porter::stem;

/// Tokens shorter than this many characters are dropped.
pub const MIN_TOKEN_LEN: usize = 2;

pub const STOPLIST_VERSION: &str = "en-1";
const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextprepError {
    #[error("cannot vectorize an empty corpus")]
    EmptyCorpus,
}

/// Lowercase maximal alphabetic runs; everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|run| run.chars().count() >= MIN_TOKEN_LEN)
        .map(str::to_lowercase)
        .collect()
}

/// Set of lowercase words removed before stemming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// The bundled English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { words }
    }

    pub fn empty() -> Self {
        Stoplist { words: HashSet::new() }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::english()
    }
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

/// Stemmed, stopword-free terms of one document.
pub fn document_terms(text: &str, stoplist: &Stoplist) -> Vec<String> {
    remove_stopwords(tokenize(text), stoplist)
        .iter()
        .map(|t| stem(t))
        .collect()
}

/// Documents x terms tf-idf matrix with sparse rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDocumentMatrix {
    /// Vocabulary, lexicographically ordered.
    pub terms: Vec<String>,
    /// Per document: `(term index, weight)` for non-zero weights, ascending by term index.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub doc_keys: Vec<String>,
    /// Number of documents containing each term.
    pub doc_freq: Vec<usize>,
    /// Documents whose vector is all zero.
    pub zero_rows: Vec<usize>,
}

impl TermDocumentMatrix {
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn weight(&self, doc: usize, term: usize) -> f64 {
        let row = &self.rows[doc];
        match row.binary_search_by_key(&term, |&(t, _)| t) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "srmap.matrix/v1",
            "stoplist": STOPLIST_VERSION,
            "terms": self.terms,
            "doc_freq": self.doc_freq,
            "doc_keys": self.doc_keys,
            "rows": self.rows,
            "zero_rows": self.zero_rows,
        })
    }
}

/// Builds the tf-idf matrix over title + abstract + keywords of every study.
pub fn build_matrix(corpus: &Corpus, stoplist: &Stoplist) -> Result<TermDocumentMatrix, TextprepError> {
    let texts: Vec<String> = corpus.studies().iter().map(|s| s.document_text()).collect();
    let keys = corpus.keys();
    build_matrix_from_texts(&keys, &texts, stoplist)
}

pub fn build_matrix_from_texts(
    keys: &[String],
    texts: &[String],
    stoplist: &Stoplist,
) -> Result<TermDocumentMatrix, TextprepError> {
    if texts.is_empty() {
        return Err(TextprepError::EmptyCorpus);
    }
    let counts: Vec<BTreeMap<String, usize>> = texts
        .iter()
        .map(|text| {
            let mut tf = BTreeMap::new();
            for term in document_terms(text, stoplist) {
                *tf.entry(term).or_insert(0) += 1;
            }
            tf
        })
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tf in &counts {
        for term in tf.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    let doc_freq: Vec<usize> = df.values().copied().collect();
    let n = texts.len() as f64;
    let idf: Vec<f64> = doc_freq.iter().map(|&d| (n / d as f64).ln()).collect();

    let mut rows = Vec::with_capacity(counts.len());
    let mut zero_rows = Vec::new();
    for (doc, tf) in counts.iter().enumerate() {
        let row: Vec<(usize, f64)> = tf
            .iter()
            .filter_map(|(term, &count)| {
                let idx = terms.binary_search(term).expect("term in vocabulary");
                let w = count as f64 * idf[idx];
                (w > 0.0).then_some((idx, w))
            })
            .collect();
        if row.is_empty() {
            zero_rows.push(doc);
        }
        rows.push(row);
    }

    Ok(TermDocumentMatrix {
        terms,
        rows,
        doc_keys: keys.to_vec(),
        doc_freq,
        zero_rows,
    })
}
