//! Shared fixtures and a from-scratch Gibbs reference for sampler tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sitaware::topicmodel::{EncodedCorpus, SamplerConfig};

/// Two blocks of documents over disjoint vocabularies: `per_block` docs
/// over a1..a10, then `per_block` docs over b1..b10, `len` tokens each.
pub fn two_block(per_block: usize, len: usize) -> EncodedCorpus {
    let vocab: Vec<String> = (1..=10)
        .map(|i| format!("a{i}"))
        .chain((1..=10).map(|i| format!("b{i}")))
        .collect();
    let mut docs = Vec::new();
    for block in 0..2u32 {
        for j in 0..per_block {
            docs.push(
                (0..len)
                    .map(|t| block * 10 + ((j * 3 + t * 7) % 10) as u32)
                    .collect(),
            );
        }
    }
    let ids = (0..docs.len()).map(|d| format!("doc{d}")).collect();
    EncodedCorpus::from_parts(vocab, docs, ids).unwrap()
}

/// Random documents with lengths in `lens` over a `v`-word vocabulary.
pub fn random_corpus(
    seed: u64,
    docs: usize,
    v: usize,
    lens: std::ops::Range<usize>,
) -> EncodedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = (0..v).map(|i| format!("w{i}")).collect();
    let docs: Vec<Vec<u32>> = (0..docs)
        .map(|_| {
            let n = rng.gen_range(lens.clone());
            (0..n).map(|_| rng.gen_range(0..v as u32)).collect()
        })
        .collect();
    let ids = (0..docs.len()).map(|d| format!("doc{d}")).collect();
    EncodedCorpus::from_parts(vocab, docs, ids).unwrap()
}

/// Naive collapsed Gibbs sampler. Every conditional is computed from
/// counts rebuilt over the whole corpus, never from cached tables. Uses
/// the same random stream layout as the library: one uniform per token
/// for initialization, then one per token per sweep.
pub struct ReferenceGibbs {
    pub docs: Vec<Vec<u32>>,
    pub v: usize,
    pub cfg: SamplerConfig,
    pub z: Vec<Vec<u32>>,
    rng: ChaCha8Rng,
}

impl ReferenceGibbs {
    pub fn new(corpus: &EncodedCorpus, cfg: SamplerConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let k = cfg.topics;
        let z = corpus
            .docs()
            .iter()
            .map(|doc| {
                doc.iter()
                    .map(|_| {
                        let u: f64 = rng.gen();
                        ((u * k as f64).floor() as usize).min(k - 1) as u32
                    })
                    .collect()
            })
            .collect();
        ReferenceGibbs {
            docs: corpus.docs().to_vec(),
            v: corpus.vocab().len(),
            cfg,
            z,
            rng,
        }
    }

    /// Counts excluding position (skip_d, skip_i): (doc-topic, word-topic, topic).
    fn counts_without(&self, skip_d: usize, skip_i: usize, topic: u32) -> (f64, f64, f64) {
        let word = self.docs[skip_d][skip_i];
        let (mut doc_topic, mut word_topic, mut topic_total) = (0u32, 0u32, 0u32);
        for (d, doc) in self.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                if (d, i) == (skip_d, skip_i) || self.z[d][i] != topic {
                    continue;
                }
                topic_total += 1;
                if w == word {
                    word_topic += 1;
                }
                if d == skip_d {
                    doc_topic += 1;
                }
            }
        }
        (doc_topic as f64, word_topic as f64, topic_total as f64)
    }

    pub fn sweep(&mut self) {
        let (alpha, beta) = (self.cfg.alpha, self.cfg.beta);
        let v_beta = self.v as f64 * beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let mut cumulative = Vec::with_capacity(self.cfg.topics);
                let mut total = 0.0;
                for t in 0..self.cfg.topics as u32 {
                    let (ndk, nwk, nk) = self.counts_without(d, i, t);
                    total += (ndk + alpha) * (nwk + beta) / (nk + v_beta);
                    cumulative.push(total);
                }
                let u = self.rng.gen::<f64>() * total;
                let new = cumulative
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(self.cfg.topics - 1);
                self.z[d][i] = new as u32;
            }
        }
    }
}
