use std::collections::{HashMap, HashSet};
use std::path::Path;

use super::TopicError;

/// Bundled English stopword list, one term per line.
pub const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn parse(src: &str) -> Self {
        StopWords(
            src.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, TopicError> {
        std::fs::read_to_string(path)
            .map(|src| StopWords::parse(&src))
            .map_err(|e| TopicError::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })
    }

    pub fn english() -> Self {
        StopWords::parse(ENGLISH_STOPWORDS)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWords(iter.into_iter().map(Into::into).collect())
    }
}

/// Documents as token-id sequences over a filtered vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedCorpus {
    vocab: Vec<String>,
    docs: Vec<Vec<u32>>,
    doc_ids: Vec<String>,
    dropped: Vec<String>,
}

impl EncodedCorpus {
    /// Builds directly from id sequences. Every id must be below
    /// `vocab.len()` and no document may be empty.
    pub fn from_parts(
        vocab: Vec<String>,
        docs: Vec<Vec<u32>>,
        doc_ids: Vec<String>,
    ) -> Result<Self, TopicError> {
        if docs.is_empty() {
            return Err(TopicError::EmptyCorpus);
        }
        if doc_ids.len() != docs.len() {
            return Err(TopicError::Invalid(
                "doc_ids length differs from docs".into(),
            ));
        }
        let v = vocab.len() as u32;
        for (d, doc) in docs.iter().enumerate() {
            if doc.is_empty() {
                return Err(TopicError::Invalid(format!("document {d} is empty")));
            }
            if let Some(w) = doc.iter().find(|&&w| w >= v) {
                return Err(TopicError::Invalid(format!(
                    "document {d} references word {w} but vocabulary has {v} terms"
                )));
            }
        }
        Ok(EncodedCorpus {
            vocab,
            docs,
            doc_ids,
            dropped: Vec::new(),
        })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn docs(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    /// Ids of documents emptied by filtering.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    pub(crate) fn into_parts(self) -> (Vec<String>, Vec<Vec<u32>>, Vec<String>) {
        (self.vocab, self.docs, self.doc_ids)
    }
}

/// Encodes `(id, tokens)` documents, dropping stopwords and terms seen
/// fewer than `min_count` times. Vocabulary order is first occurrence.
pub fn build_vocab<'a, I, S>(
    docs: I,
    stopwords: &StopWords,
    min_count: usize,
) -> Result<EncodedCorpus, TopicError>
where
    I: IntoIterator<Item = (&'a str, &'a [S])>,
    S: AsRef<str> + 'a,
{
    let docs: Vec<(&str, &[S])> = docs.into_iter().collect();

    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    for (_, tokens) in &docs {
        for tok in tokens.iter().map(AsRef::as_ref) {
            if stopwords.contains(tok) {
                continue;
            }
            let c = counts.entry(tok).or_insert_with(|| {
                order.push(tok);
                0
            });
            *c += 1;
        }
    }

    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut vocab = Vec::new();
    for term in order {
        if counts[term] >= min_count {
            index.insert(term, vocab.len() as u32);
            vocab.push(term.to_string());
        }
    }

    let mut encoded = Vec::with_capacity(docs.len());
    let mut doc_ids = Vec::with_capacity(docs.len());
    let mut dropped = Vec::new();
    for (id, tokens) in docs {
        let ids: Vec<u32> = tokens
            .iter()
            .filter_map(|t| index.get(t.as_ref()).copied())
            .collect();
        if ids.is_empty() {
            dropped.push(id.to_string());
        } else {
            encoded.push(ids);
            doc_ids.push(id.to_string());
        }
    }
    if encoded.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    Ok(EncodedCorpus {
        vocab,
        docs: encoded,
        doc_ids,
        dropped,
    })
}
