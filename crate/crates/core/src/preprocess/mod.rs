//! Text to integer token streams.
//!
//! The fixed stage order is tokenize, stop-word filter, stem, n-grams. Each
//! stage is exposed on its own so callers (and tests) can compose them.

mod porter;
pub mod stopwords;
mod vocab;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

pub use porter::stem;
pub use vocab::Vocabulary;

/// Separator used when joining n-gram components.
pub const NGRAM_JOINER: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessProfile {
    pub name: String,
    pub lowercase: bool,
    pub min_token_len: usize,
    pub stopwords: BTreeSet<String>,
    pub stem: bool,
    pub ngram_max: usize,
}

impl PreprocessProfile {
    /// Unstemmed unigrams, used for topic modeling and word analytics.
    pub fn topic() -> Self {
        Self {
            name: "topic".into(),
            lowercase: true,
            min_token_len: 1,
            stopwords: stopwords::english(),
            stem: false,
            ngram_max: 1,
        }
    }

    /// Stemmed unigrams plus bigrams, used for classification features.
    pub fn classify() -> Self {
        Self {
            name: "classify".into(),
            lowercase: true,
            min_token_len: 1,
            stopwords: stopwords::english(),
            stem: true,
            ngram_max: 2,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "topic" => Some(Self::topic()),
            "classify" => Some(Self::classify()),
            _ => None,
        }
    }

    pub fn with_stopwords(mut self, stopwords: BTreeSet<String>) -> Self {
        self.stopwords = stopwords;
        self
    }

    /// Runs every stage on one text and returns surface terms.
    pub fn terms(&self, text: &str) -> Vec<String> {
        let tokens = tokenize(text, self.lowercase);
        let mut tokens = filter_stopwords(tokens, &self.stopwords, self.min_token_len);
        if self.stem {
            for t in tokens.iter_mut() {
                *t = stem(t);
            }
        }
        ngrams(tokens, self.ngram_max)
    }
}

/// Splits `text` into maximal runs of alphanumeric characters.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| {
            if lowercase {
                s.to_lowercase()
            } else {
                s.to_string()
            }
        })
        .collect()
}

/// Drops stop words and tokens shorter than `min_len` characters.
pub fn filter_stopwords(
    tokens: Vec<String>,
    stopwords: &BTreeSet<String>,
    min_len: usize,
) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| t.chars().count() >= min_len && !stopwords.contains(t))
        .collect()
}

/// The input tokens followed by every contiguous k-gram for `2..=n_max`.
pub fn ngrams(tokens: Vec<String>, n_max: usize) -> Vec<String> {
    let mut out = tokens.clone();
    for k in 2..=n_max {
        out.extend(tokens.windows(k).map(|w| w.join(NGRAM_JOINER)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TextSource {
    /// The document body text.
    #[default]
    Body,
    /// Title, abstract, keywords and the other metadata fields.
    Bibliographic,
}

#[derive(Debug, Clone)]
pub struct TokenizedCorpus {
    pub profile: PreprocessProfile,
    pub vocab: Vocabulary,
    pub doc_ids: Vec<String>,
    pub docs: Vec<Vec<u32>>,
}

impl TokenizedCorpus {
    /// Encodes pre-split documents; term ids follow first occurrence.
    pub fn from_terms(
        profile: PreprocessProfile,
        doc_ids: Vec<String>,
        term_docs: Vec<Vec<String>>,
    ) -> Self {
        assert_eq!(doc_ids.len(), term_docs.len());
        let mut vocab = Vocabulary::new();
        let docs = term_docs
            .iter()
            .map(|terms| terms.iter().map(|t| vocab.intern(t)).collect())
            .collect();
        Self {
            profile,
            vocab,
            doc_ids,
            docs,
        }
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Indices of documents that ended up with no tokens.
    pub fn empty_docs(&self) -> Vec<usize> {
        (0..self.docs.len())
            .filter(|&d| self.docs[d].is_empty())
            .collect()
    }

    pub fn decode(&self, doc: usize) -> Vec<&str> {
        self.docs[doc].iter().map(|&w| self.vocab.term(w)).collect()
    }
}

pub fn build_tokenized_corpus(
    corpus: &Corpus,
    profile: &PreprocessProfile,
    source: TextSource,
) -> TokenizedCorpus {
    let term_docs: Vec<Vec<String>> = corpus
        .documents()
        .par_iter()
        .map(|doc| match source {
            TextSource::Body => profile.terms(&doc.text),
            TextSource::Bibliographic => profile.terms(&doc.bibliographic_text()),
        })
        .collect();
    let doc_ids = corpus.ids().map(str::to_string).collect();
    let tc = TokenizedCorpus::from_terms(profile.clone(), doc_ids, term_docs);
    let empty = tc.empty_docs();
    if !empty.is_empty() {
        log::warn!(
            "{} document(s) have no tokens under profile `{}`",
            empty.len(),
            profile.name
        );
    }
    tc
}
