//! Situational-awareness mining over disaster tweets.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`corpus`]: parse newline-delimited tweet records, keep those matching
//!    a hashtag/keyword query, normalize text and bucket tweets by UTC day.
//! 2. [`sentiment`]: word-count polarity against a positive/negative
//!    lexicon; negative tweets feed the next stage.
//! 3. [`topicmodel`]: per-day LDA fitted with a collapsed Gibbs sampler.
//! 4. [`temporal`]: a hand-edited category map turns topics into a
//!    category-by-day presence matrix with frequency and diversity series.

pub mod corpus;
pub mod sentiment;
pub mod temporal;
pub mod topicmodel;

pub use corpus::{normalize, DailyBuckets, DateWindow, Query, Tweet};
pub use sentiment::{classify, score, Lexicon, SentimentLabel, SentimentScore, SentimentSummary};
pub use temporal::{CategoryMap, DayModel, PresenceMatrix, TemporalReport};
pub use topicmodel::{fit, EncodedCorpus, SamplerConfig, StopWords, TopicModel};
