use libm::lgamma as ln_gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::vocab::EncodedCorpus;
use super::TopicError;

/// Total Dirichlet mass on document-topic proportions; split evenly over
/// topics when no per-topic alpha is given.
pub const DEFAULT_ALPHA_SUM: f64 = 5.0;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_TOPICS: usize = 25;
pub const DEFAULT_ITERATIONS: usize = 1000;

/// Collapsed Gibbs sampler settings. `alpha` and `beta` are symmetric
/// per-topic and per-word priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::with_topics(DEFAULT_TOPICS)
    }
}

impl SamplerConfig {
    /// `topics` topics with alpha = 5/K, beta = 0.01, 1000 sweeps, seed 0.
    pub fn with_topics(topics: usize) -> Self {
        SamplerConfig {
            topics,
            alpha: DEFAULT_ALPHA_SUM / topics.max(1) as f64,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        let bad = |msg: &str| Err(TopicError::InvalidConfig(msg.into()));
        if self.topics < 1 {
            return bad("topic count must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        Ok(())
    }
}

/// Sampler state: per-token topic assignments and the count tables derived
/// from them.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    config: SamplerConfig,
    vocab: Vec<String>,
    doc_ids: Vec<String>,
    // Tokens of all documents back to back; doc d spans offsets[d]..offsets[d + 1].
    tokens: Vec<u32>,
    offsets: Vec<usize>,
    z: Vec<u32>,
    // D x K, row-major by document.
    n_dk: Vec<u32>,
    // V x K, row-major by word so one token's K counts are contiguous.
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
}

impl TopicModel {
    fn empty(corpus: EncodedCorpus, config: SamplerConfig) -> Self {
        let (vocab, docs, doc_ids) = corpus.into_parts();
        let k = config.topics;
        let mut offsets = Vec::with_capacity(docs.len() + 1);
        offsets.push(0);
        let mut tokens = Vec::new();
        for doc in &docs {
            tokens.extend_from_slice(doc);
            offsets.push(tokens.len());
        }
        TopicModel {
            n_dk: vec![0; docs.len() * k],
            n_wk: vec![0; vocab.len() * k],
            n_k: vec![0; k],
            z: vec![0; tokens.len()],
            config,
            vocab,
            doc_ids,
            tokens,
            offsets,
        }
    }

    /// Rebuilds a model from a corpus and explicit assignments.
    pub fn from_assignments(
        corpus: EncodedCorpus,
        config: SamplerConfig,
        assignments: &[Vec<u32>],
    ) -> Result<Self, TopicError> {
        config.validate()?;
        if assignments.len() != corpus.docs().len() {
            return Err(TopicError::Invalid(
                "assignment rows differ from document count".into(),
            ));
        }
        for (doc, z) in corpus.docs().iter().zip(assignments) {
            if doc.len() != z.len() {
                return Err(TopicError::Invalid(
                    "assignment length differs from document".into(),
                ));
            }
            if let Some(&t) = z.iter().find(|&&t| t as usize >= config.topics) {
                return Err(TopicError::TopicOutOfRange {
                    topic: t as usize,
                    topics: config.topics,
                });
            }
        }
        let mut model = TopicModel::empty(corpus, config);
        for (d, z) in assignments.iter().enumerate() {
            let start = model.offsets[d];
            for (i, &t) in z.iter().enumerate() {
                model.z[start + i] = t;
                model.add(d, start + i, t as usize);
            }
        }
        Ok(model)
    }

    #[inline]
    fn add(&mut self, d: usize, i: usize, topic: usize) {
        let k = self.config.topics;
        let w = self.tokens[i] as usize;
        self.n_dk[d * k + topic] += 1;
        self.n_wk[w * k + topic] += 1;
        self.n_k[topic] += 1;
    }

    #[inline]
    fn remove(&mut self, d: usize, i: usize, topic: usize) {
        let k = self.config.topics;
        let w = self.tokens[i] as usize;
        self.n_dk[d * k + topic] -= 1;
        self.n_wk[w * k + topic] -= 1;
        self.n_k[topic] -= 1;
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn num_topics(&self) -> usize {
        self.config.topics
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc(&self, d: usize) -> &[u32] {
        &self.tokens[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.offsets[d + 1] - self.offsets[d]
    }

    /// Topic assignments of document `d`, in token order.
    pub fn assignments(&self, d: usize) -> &[u32] {
        &self.z[self.offsets[d]..self.offsets[d + 1]]
    }

    pub fn doc_topic_count(&self, d: usize, k: usize) -> u32 {
        self.n_dk[d * self.config.topics + k]
    }

    pub fn topic_word_count(&self, k: usize, w: usize) -> u32 {
        self.n_wk[w * self.config.topics + k]
    }

    pub fn topic_count(&self, k: usize) -> u32 {
        self.n_k[k]
    }

    /// Checks the count tables against each other and the assignments.
    pub fn check_invariants(&self) -> Result<(), String> {
        let k = self.config.topics;
        let v = self.vocab.len();
        if let Some(t) = self.z.iter().find(|&&t| t as usize >= k) {
            return Err(format!("assignment {t} out of range"));
        }
        for d in 0..self.num_docs() {
            let sum: u64 = self.n_dk[d * k..(d + 1) * k]
                .iter()
                .map(|&c| c as u64)
                .sum();
            if sum != self.doc_len(d) as u64 {
                return Err(format!(
                    "doc {d}: topic counts sum to {sum}, length {}",
                    self.doc_len(d)
                ));
            }
        }
        for t in 0..k {
            let sum: u64 = (0..v).map(|w| self.n_wk[w * k + t] as u64).sum();
            if sum != self.n_k[t] as u64 {
                return Err(format!(
                    "topic {t}: word counts sum to {sum}, total {}",
                    self.n_k[t]
                ));
            }
        }
        let total: u64 = self.n_k.iter().map(|&c| c as u64).sum();
        if total != self.tokens.len() as u64 {
            return Err(format!(
                "topic totals sum to {total}, corpus has {}",
                self.tokens.len()
            ));
        }
        Ok(())
    }

    /// Topic-word distribution, one row per topic:
    /// (n_kw + beta) / (n_k + V beta).
    pub fn phi(&self) -> Vec<Vec<f64>> {
        (0..self.num_topics()).map(|k| self.phi_row(k)).collect()
    }

    pub fn phi_row(&self, k: usize) -> Vec<f64> {
        let beta = self.config.beta;
        let denom = self.n_k[k] as f64 + self.vocab.len() as f64 * beta;
        (0..self.vocab.len())
            .map(|w| (self.topic_word_count(k, w) as f64 + beta) / denom)
            .collect()
    }

    /// Document-topic distribution, one row per document:
    /// (n_dk + alpha) / (len(d) + K alpha).
    pub fn theta(&self) -> Vec<Vec<f64>> {
        (0..self.num_docs()).map(|d| self.theta_row(d)).collect()
    }

    pub fn theta_row(&self, d: usize) -> Vec<f64> {
        let k = self.num_topics();
        let alpha = self.config.alpha;
        let denom = self.doc_len(d) as f64 + k as f64 * alpha;
        self.n_dk[d * k..(d + 1) * k]
            .iter()
            .map(|&c| (c as f64 + alpha) / denom)
            .collect()
    }

    /// The `n` most probable words of topic `k`, ties in vocabulary order.
    pub fn top_words(&self, k: usize, n: usize) -> Result<Vec<(&str, f64)>, TopicError> {
        if k >= self.num_topics() {
            return Err(TopicError::TopicOutOfRange {
                topic: k,
                topics: self.num_topics(),
            });
        }
        let phi = self.phi_row(k);
        let mut order: Vec<usize> = (0..self.vocab.len()).collect();
        // phi is monotone in the raw count within a row, so sort on counts
        order.sort_by(|&a, &b| {
            self.topic_word_count(k, b)
                .cmp(&self.topic_word_count(k, a))
                .then(a.cmp(&b))
        });
        Ok(order
            .into_iter()
            .take(n)
            .map(|w| (self.vocab[w].as_str(), phi[w]))
            .collect())
    }

    /// argmax of theta for document `d`; lowest topic id on ties.
    pub fn dominant_topic(&self, d: usize) -> Result<usize, TopicError> {
        if d >= self.num_docs() {
            return Err(TopicError::DocOutOfRange {
                doc: d,
                docs: self.num_docs(),
            });
        }
        let k = self.num_topics();
        let row = &self.n_dk[d * k..(d + 1) * k];
        let mut best = 0;
        for (t, &c) in row.iter().enumerate() {
            if c > row[best] {
                best = t;
            }
        }
        Ok(best)
    }

    /// Collapsed joint log p(w, z) with theta and phi integrated out.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.num_topics();
        let v = self.vocab.len();
        let alpha = self.config.alpha;
        let beta = self.config.beta;

        // Zero counts contribute ln_gamma(prior) - ln_gamma(prior) = 0, so
        // only non-zero cells are visited.
        let mut ll = 0.0;
        let lg_beta = ln_gamma(beta);
        for t in 0..k {
            ll += ln_gamma(v as f64 * beta) - ln_gamma(self.n_k[t] as f64 + v as f64 * beta);
            for w in 0..v {
                let c = self.n_wk[w * k + t];
                if c > 0 {
                    ll += ln_gamma(c as f64 + beta) - lg_beta;
                }
            }
        }

        let lg_alpha = ln_gamma(alpha);
        for d in 0..self.num_docs() {
            ll += ln_gamma(k as f64 * alpha) - ln_gamma(self.doc_len(d) as f64 + k as f64 * alpha);
            for &c in &self.n_dk[d * k..(d + 1) * k] {
                if c > 0 {
                    ll += ln_gamma(c as f64 + alpha) - lg_alpha;
                }
            }
        }
        ll
    }
}

/// Runs collapsed Gibbs sweeps over a model, one token at a time.
///
/// Sweeps visit documents in index order and tokens in position order.
/// Initial topics are `floor(u * K)` for one uniform draw per token; each
/// resample draws one uniform and scans the cumulative weights.
pub struct Sampler {
    model: TopicModel,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
    sweeps: usize,
}

impl Sampler {
    pub fn new(corpus: EncodedCorpus, config: SamplerConfig) -> Result<Self, TopicError> {
        config.validate()?;
        if corpus.docs().is_empty() {
            return Err(TopicError::EmptyCorpus);
        }
        let tokens = corpus.num_tokens();
        if config.topics > tokens {
            return Err(TopicError::Overparameterized {
                topics: config.topics,
                tokens,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut model = TopicModel::empty(corpus, config);
        let k = config.topics;
        for d in 0..model.num_docs() {
            for i in model.offsets[d]..model.offsets[d + 1] {
                let u: f64 = rng.gen();
                let t = ((u * k as f64) as usize).min(k - 1);
                model.z[i] = t as u32;
                model.add(d, i, t);
            }
        }
        Ok(Sampler {
            model,
            rng,
            weights: vec![0.0; k],
            sweeps: 0,
        })
    }

    pub fn model(&self) -> &TopicModel {
        &self.model
    }

    pub fn into_model(self) -> TopicModel {
        self.model
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Resamples every token once.
    pub fn sweep(&mut self) {
        let m = &mut self.model;
        let k = m.config.topics;
        let alpha = m.config.alpha;
        let beta = m.config.beta;
        let v_beta = m.vocab.len() as f64 * beta;
        let weights = &mut self.weights;

        for d in 0..m.offsets.len() - 1 {
            for i in m.offsets[d]..m.offsets[d + 1] {
                let w = m.tokens[i] as usize;
                let old = m.z[i] as usize;
                m.remove(d, i, old);

                let doc_counts = &m.n_dk[d * k..(d + 1) * k];
                let word_counts = &m.n_wk[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    total += (doc_counts[t] as f64 + alpha) * (word_counts[t] as f64 + beta)
                        / (m.n_k[t] as f64 + v_beta);
                    weights[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                m.z[i] = new as u32;
                m.add(d, i, new);
            }
        }
        self.sweeps += 1;
        debug_assert_eq!(self.model.check_invariants(), Ok(()));
    }

    /// Sweeps until the configured iteration count is reached.
    pub fn run(&mut self) {
        while self.sweeps < self.model.config.iterations {
            self.sweep();
        }
    }
}

/// Fits a topic model by collapsed Gibbs sampling and returns the final
/// state after `config.iterations` sweeps.
pub fn fit(corpus: EncodedCorpus, config: SamplerConfig) -> Result<TopicModel, TopicError> {
    let mut sampler = Sampler::new(corpus, config)?;
    sampler
        .model
        .check_invariants()
        .map_err(TopicError::Invalid)?;
    sampler.run();
    let model = sampler.into_model();
    model.check_invariants().map_err(TopicError::Invalid)?;
    Ok(model)
}
