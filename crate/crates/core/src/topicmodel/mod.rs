//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
//!
//! [`build_vocab`] turns token lists into an [`EncodedCorpus`]; [`fit`]
//! runs the sampler and returns a [`TopicModel`] holding assignments and
//! count tables, from which `phi`, `theta` and top-word lists are read.

mod dump;
mod sampler;
mod vocab;

use thiserror::Error;

pub use dump::{render_topics, ModelDump, DUMP_FORMAT};
pub use sampler::{
    fit, Sampler, SamplerConfig, TopicModel, DEFAULT_ALPHA_SUM, DEFAULT_BETA, DEFAULT_ITERATIONS,
    DEFAULT_TOPICS,
};
pub use vocab::{build_vocab, EncodedCorpus, StopWords, ENGLISH_STOPWORDS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopicError {
    #[error("corpus is empty after filtering")]
    EmptyCorpus,
    #[error("{topics} topics requested but the corpus has only {tokens} tokens")]
    Overparameterized { topics: usize, tokens: usize },
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error("topic {topic} out of range (model has {topics})")]
    TopicOutOfRange { topic: usize, topics: usize },
    #[error("document {doc} out of range (model has {docs})")]
    DocOutOfRange { doc: usize, docs: usize },
    #[error("invalid model state: {0}")]
    Invalid(String),
    #[error("model dump: {0}")]
    Dump(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}
