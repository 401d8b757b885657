//! Browser bindings for the demo page. Each operation is a plain function
//! returning a serializable value; the `#[wasm_bindgen]` wrappers turn
//! the result into a JSON string or a thrown error.

use chrono::NaiveDate;
use serde::Serialize;
use sitaware::corpus::{normalize, DateWindow};
use sitaware::sentiment::{classify, score, Lexicon, SentimentLabel};
use sitaware::temporal::{
    apply_category_map, presence_matrix, CategoryMap, DayTopics, TemporalReport,
};
use sitaware::topicmodel::{build_vocab, fit, SamplerConfig, StopWords};
use wasm_bindgen::prelude::*;

/// Category map used when the page loads.
pub const EXAMPLE_CATEGORY_MAP: &str = include_str!("../www/example_category_map.csv");

#[derive(Debug, Serialize)]
pub struct Classified {
    pub tokens: Vec<String>,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub pos_count: u32,
    pub neg_count: u32,
    pub label: SentimentLabel,
}

fn lexicon(src: &str) -> Result<Lexicon, String> {
    if src.trim().is_empty() {
        Ok(Lexicon::demo())
    } else {
        Lexicon::parse(src).map_err(|e| e.to_string())
    }
}

/// Scores one text against `lexicon_src`, or the bundled lexicon when it
/// is blank.
pub fn classify_text(text: &str, lexicon_src: &str) -> Result<Classified, String> {
    let lex = lexicon(lexicon_src)?;
    let tokens = normalize(text);
    let s = score(&tokens, &lex);
    Ok(Classified {
        positive: tokens
            .iter()
            .filter(|t| lex.is_positive(t))
            .cloned()
            .collect(),
        negative: tokens
            .iter()
            .filter(|t| lex.is_negative(t))
            .cloned()
            .collect(),
        pos_count: s.pos_count,
        neg_count: s.neg_count,
        label: classify(s),
        tokens,
    })
}

#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct TopicParams {
    pub topics: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Non-positive means 5/K.
    pub alpha: f64,
    pub beta: f64,
    pub top_words: usize,
}

#[derive(Debug, Serialize)]
pub struct TopicSummary {
    pub id: usize,
    pub tokens: u32,
    pub words: Vec<(String, f64)>,
}

#[derive(Debug, Serialize)]
pub struct DocSummary {
    pub line: usize,
    pub dominant: usize,
    pub theta: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct FittedTopics {
    pub vocab_size: usize,
    pub tokens: usize,
    pub log_likelihood: f64,
    pub topics: Vec<TopicSummary>,
    pub docs: Vec<DocSummary>,
}

/// Fits a topic model on `text`, one document per non-blank line.
pub fn fit_topics(text: &str, p: TopicParams) -> Result<FittedTopics, String> {
    let docs: Vec<(String, Vec<String>)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| ((i + 1).to_string(), normalize(l)))
        .collect();
    let corpus = build_vocab(
        docs.iter().map(|(id, t)| (id.as_str(), t.as_slice())),
        &StopWords::english(),
        1,
    )
    .map_err(|e| e.to_string())?;
    let alpha = if p.alpha > 0.0 {
        p.alpha
    } else {
        5.0 / p.topics.max(1) as f64
    };
    let config = SamplerConfig {
        topics: p.topics,
        alpha,
        beta: p.beta,
        iterations: p.iterations,
        seed: p.seed,
    };
    let model = fit(corpus, config).map_err(|e| e.to_string())?;
    let topics = (0..model.num_topics())
        .map(|k| TopicSummary {
            id: k,
            tokens: model.topic_count(k),
            words: model
                .top_words(k, p.top_words)
                .expect("topic in range")
                .into_iter()
                .map(|(w, pr)| (w.to_string(), pr))
                .collect(),
        })
        .collect();
    let docs = (0..model.num_docs())
        .map(|d| DocSummary {
            line: model.doc_ids()[d].parse().unwrap_or(0),
            dominant: model.dominant_topic(d).expect("doc in range"),
            theta: model.theta_row(d),
        })
        .collect();
    Ok(FittedTopics {
        vocab_size: model.vocab().len(),
        tokens: model.num_tokens(),
        log_likelihood: model.log_likelihood(),
        topics,
        docs,
    })
}

/// Presence, frequency and diversity report for a category map over
/// `days` days from `start`, each day having `topics_per_day` topics.
pub fn category_report(
    map_csv: &str,
    start: &str,
    days: usize,
    topics_per_day: usize,
    include_uncategorized: bool,
) -> Result<TemporalReport, String> {
    let start = NaiveDate::parse_from_str(start.trim(), "%Y-%m-%d")
        .map_err(|e| format!("start date: {e}"))?;
    if days == 0 {
        return Err("the window needs at least one day".into());
    }
    let end = start + chrono::Duration::days(days as i64 - 1);
    let window = DateWindow::new(start, end).map_err(|e| e.to_string())?;
    let map = CategoryMap::parse_csv(map_csv).map_err(|e| e.to_string())?;
    let day_topics: Vec<DayTopics> = window
        .days()
        .map(|day| DayTopics {
            day,
            topics: topics_per_day,
        })
        .collect();
    let topics = apply_category_map(&day_topics, &map).map_err(|e| e.to_string())?;
    TemporalReport::build(presence_matrix(&topics, window, include_uncategorized))
        .map_err(|e| e.to_string())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = classifyText)]
pub fn classify_text_js(text: &str, lexicon_src: &str) -> Result<String, JsError> {
    to_js(classify_text(text, lexicon_src))
}

#[wasm_bindgen(js_name = fitTopics)]
pub fn fit_topics_js(text: &str, params_json: &str) -> Result<String, JsError> {
    let params: TopicParams =
        serde_json::from_str(params_json).map_err(|e| JsError::new(&e.to_string()))?;
    to_js(fit_topics(text, params))
}

#[wasm_bindgen(js_name = categoryReport)]
pub fn category_report_js(
    map_csv: &str,
    start: &str,
    days: usize,
    topics_per_day: usize,
    include_uncategorized: bool,
) -> Result<String, JsError> {
    to_js(category_report(
        map_csv,
        start,
        days,
        topics_per_day,
        include_uncategorized,
    ))
}

#[wasm_bindgen(js_name = exampleCategoryMap)]
pub fn example_category_map() -> String {
    EXAMPLE_CATEGORY_MAP.to_string()
}
