use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::sampler::{SamplerConfig, TopicModel};
use super::vocab::EncodedCorpus;
use super::TopicError;

pub const DUMP_FORMAT: &str = "sitaware-lda/1";

/// Serializable snapshot of a fitted model. `n_kw` is topic-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<NaiveDate>,
    pub config: SamplerConfig,
    pub log_likelihood: f64,
    pub vocab: Vec<String>,
    pub doc_ids: Vec<String>,
    pub docs: Vec<Vec<u32>>,
    pub assignments: Vec<Vec<u32>>,
    pub n_dk: Vec<Vec<u32>>,
    pub n_kw: Vec<Vec<u32>>,
}

impl ModelDump {
    pub fn from_model(model: &TopicModel, day: Option<NaiveDate>) -> Self {
        let k = model.num_topics();
        let v = model.vocab().len();
        let d = model.num_docs();
        ModelDump {
            format: DUMP_FORMAT.to_string(),
            day,
            config: *model.config(),
            log_likelihood: model.log_likelihood(),
            vocab: model.vocab().to_vec(),
            doc_ids: model.doc_ids().to_vec(),
            docs: (0..d).map(|i| model.doc(i).to_vec()).collect(),
            assignments: (0..d).map(|i| model.assignments(i).to_vec()).collect(),
            n_dk: (0..d)
                .map(|i| (0..k).map(|t| model.doc_topic_count(i, t)).collect())
                .collect(),
            n_kw: (0..k)
                .map(|t| (0..v).map(|w| model.topic_word_count(t, w)).collect())
                .collect(),
        }
    }

    /// Rebuilds the model and checks the stored counts against it.
    pub fn to_model(&self) -> Result<TopicModel, TopicError> {
        if self.format != DUMP_FORMAT {
            return Err(TopicError::Dump(format!(
                "unknown format {:?}",
                self.format
            )));
        }
        let corpus =
            EncodedCorpus::from_parts(self.vocab.clone(), self.docs.clone(), self.doc_ids.clone())?;
        let model = TopicModel::from_assignments(corpus, self.config, &self.assignments)?;
        let rebuilt = ModelDump::from_model(&model, self.day);
        if rebuilt.n_dk != self.n_dk || rebuilt.n_kw != self.n_kw {
            return Err(TopicError::Dump(
                "stored counts disagree with assignments".into(),
            ));
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("dump serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self, TopicError> {
        serde_json::from_str(src).map_err(|e| TopicError::Dump(e.to_string()))
    }
}

/// Human-readable listing of the top `n` words of every topic.
pub fn render_topics(model: &TopicModel, day: Option<NaiveDate>, n: usize) -> String {
    let c = model.config();
    let mut out = String::new();
    if let Some(day) = day {
        let _ = writeln!(out, "# day {}", day.format("%Y-%m-%d"));
    }
    let _ = writeln!(
        out,
        "# topics={} alpha={} beta={} iterations={} seed={} docs={} tokens={} vocab={}",
        c.topics,
        c.alpha,
        c.beta,
        c.iterations,
        c.seed,
        model.num_docs(),
        model.num_tokens(),
        model.vocab().len()
    );
    for k in 0..model.num_topics() {
        let _ = writeln!(out, "\ntopic {k} ({} tokens)", model.topic_count(k));
        for (word, p) in model.top_words(k, n).expect("k in range") {
            let _ = writeln!(out, "  {word:<20} {p:.6}");
        }
    }
    out
}
