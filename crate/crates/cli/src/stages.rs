//! The four pipeline stages. Each reads the previous stage's files under
//! the output directory and writes its own subdirectory:
//!
//! ```text
//! <output>/ingest/day_YYYY-MM-DD.jsonl, summary.json
//! <output>/sentiment/{negative,neutral,positive}/day_YYYY-MM-DD.jsonl,
//!                    summary.json, negative_per_day.csv
//! <output>/topics/model_YYYY-MM-DD.json, topics_YYYY-MM-DD.txt
//! <output>/report/presence.csv, frequencies.csv, diversity.csv,
//!                 diversity_chart.txt
//! ```

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sitaware::corpus::{
    parse_record, DailyBuckets, DateWindow, Query, RecordError, RecordErrorKind, Tweet,
};
use sitaware::sentiment::{classify, round2, score, Lexicon, SentimentLabel, SentimentSummary};
use sitaware::temporal::{
    apply_category_map, presence_matrix, run_daily, CategoryMap, DayTopics, TemporalError,
    TemporalReport,
};
use sitaware::topicmodel::{render_topics, ModelDump, StopWords, TopicError};

use crate::config::{require_file, PipelineConfig};
use crate::error::{CliError, Result};

pub const INGEST_DIR: &str = "ingest";
pub const SENTIMENT_DIR: &str = "sentiment";
pub const TOPICS_DIR: &str = "topics";
pub const REPORT_DIR: &str = "report";

/// Number of top words listed per topic in `topics_*.txt`.
pub const TOPIC_LISTING_WORDS: usize = 20;

pub fn day_file_name(day: NaiveDate) -> String {
    format!("day_{}.jsonl", day.format("%Y-%m-%d"))
}

pub fn model_file_name(day: NaiveDate) -> String {
    format!("model_{}.json", day.format("%Y-%m-%d"))
}

pub fn topics_file_name(day: NaiveDate) -> String {
    format!("topics_{}.txt", day.format("%Y-%m-%d"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCount {
    pub date: NaiveDate,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub day_boundary: String,
    /// Non-blank input lines.
    pub total: u64,
    pub malformed: u64,
    pub matched: u64,
    pub unmatched: u64,
    /// Matched tweets dated outside the window.
    pub excluded: u64,
    pub kept: u64,
    pub per_day: Vec<DayCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentReport {
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub total: u64,
    pub negative: u64,
    pub neutral: u64,
    pub positive: u64,
    pub negative_pct: f64,
    pub neutral_pct: f64,
    pub positive_pct: f64,
    pub negative_per_day: Vec<DayCount>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SentimentReport {
    fn from_summary(s: &SentimentSummary) -> Self {
        let pct = |l| round2(s.percentage(l));
        SentimentReport {
            window_start: s.window.start(),
            window_end: s.window.end(),
            total: s.total(),
            negative: s.negative,
            neutral: s.neutral,
            positive: s.positive,
            negative_pct: pct(SentimentLabel::Negative),
            neutral_pct: pct(SentimentLabel::Neutral),
            positive_pct: pct(SentimentLabel::Positive),
            negative_per_day: s
                .window
                .days()
                .zip(&s.negative_per_day)
                .map(|(date, &count)| DayCount { date, count })
                .collect(),
            warnings: Vec::new(),
        }
    }
}

/// A tweet with its sentiment, as written by the sentiment stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledTweet {
    #[serde(flatten)]
    pub tweet: Tweet,
    pub sentiment: SentimentLabel,
    pub pos_count: u32,
    pub neg_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicsSummary {
    pub days: Vec<(NaiveDate, usize)>,
    pub total_topics: usize,
}

fn load_query(cfg: &PipelineConfig) -> Result<Query> {
    match &cfg.query {
        Some(path) => {
            require_file("query", path)?;
            Query::load(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
        }
        None => Ok(Query::flood_default()),
    }
}

fn load_lexicon(cfg: &PipelineConfig) -> Result<Lexicon> {
    match &cfg.lexicon {
        Some(path) => {
            require_file("lexicon", path)?;
            Lexicon::load(path)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
        }
        None => Ok(Lexicon::demo()),
    }
}

fn load_stopwords(cfg: &PipelineConfig) -> Result<StopWords> {
    match &cfg.stopwords {
        Some(path) => {
            require_file("stopword", path)?;
            StopWords::load(path).map_err(|e| CliError::validation(e.to_string()))
        }
        None => Ok(StopWords::english()),
    }
}

fn load_category_map(cfg: &PipelineConfig) -> Result<CategoryMap> {
    match &cfg.category_map {
        Some(path) => {
            require_file("category map", path)?;
            CategoryMap::load(path)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
        }
        None => Ok(CategoryMap::default()),
    }
}

/// Replaces a stage directory with a fresh empty one.
fn fresh_dir(dir: &Path) -> Result<()> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, &item).map_err(|e| CliError::internal(e.to_string()))?;
        w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary serializes");
    s.push('\n');
    s
}

/// Reads the per-day files of a stage directory back into buckets.
fn read_day_files(dir: &Path, window: DateWindow) -> Result<DailyBuckets> {
    let mut buckets = Vec::with_capacity(window.len());
    for day in window.days() {
        let path = dir.join(day_file_name(day));
        let file = fs::File::open(&path).map_err(|e| {
            CliError::validation(format!(
                "{}: {e} (run the previous stage first)",
                path.display()
            ))
        })?;
        let mut tweets = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CliError::io(&path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let tweet: Tweet = serde_json::from_str(&line)
                .map_err(|e| CliError::validation(format!("{}:{}: {e}", path.display(), i + 1)))?;
            tweets.push(tweet);
        }
        buckets.push(tweets);
    }
    DailyBuckets::from_buckets(window, buckets).ok_or_else(|| {
        CliError::validation(format!(
            "{}: tweets filed under the wrong day",
            dir.display()
        ))
    })
}

/// Parses, filters, normalizes and buckets the input records.
pub fn cmd_ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::validation("no input file configured"))?;
    require_file("input", input)?;
    let query = load_query(cfg)?;

    let file = fs::File::open(input)
        .map_err(|e| CliError::validation(format!("{}: {e}", input.display())))?;
    let mut buckets = DailyBuckets::empty(cfg.window);
    let mut seen_ids: HashSet<String> = HashSet::new();
    let (mut total, mut malformed, mut matched, mut excluded) = (0u64, 0u64, 0u64, 0u64);

    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(input, e))?;
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        let parsed = parse_record(&line, i + 1).and_then(|t| {
            if seen_ids.insert(t.id.clone()) {
                Ok(t)
            } else {
                Err(RecordError {
                    line: i + 1,
                    kind: RecordErrorKind::DuplicateId(t.id),
                })
            }
        });
        let mut tweet = match parsed {
            Ok(t) => t,
            Err(e) if cfg.strict => {
                return Err(CliError::validation(format!(
                    "{}:{}: {}",
                    input.display(),
                    e.line,
                    e.kind
                )))
            }
            Err(_) => {
                malformed += 1;
                continue;
            }
        };
        tweet.normalize();
        if !query.matches_tokens(&tweet.tokens) {
            continue;
        }
        matched += 1;
        if buckets.insert(tweet).is_err() {
            excluded += 1;
        }
    }

    let kept = buckets.total() as u64;
    let summary = IngestSummary {
        window_start: cfg.window.start(),
        window_end: cfg.window.end(),
        day_boundary: "UTC".into(),
        total,
        malformed,
        matched,
        unmatched: total - malformed - matched,
        excluded,
        kept,
        per_day: buckets
            .iter()
            .map(|(date, b)| DayCount {
                date,
                count: b.len() as u64,
            })
            .collect(),
    };
    if kept == 0 {
        return Err(CliError::empty(format!(
            "no tweets matched the query inside {}..{} ({} read, {} malformed, {} matched)",
            cfg.window.start(),
            cfg.window.end(),
            total,
            malformed,
            matched
        )));
    }

    let dir = cfg.stage_dir(INGEST_DIR);
    fresh_dir(&dir)?;
    for (day, tweets) in buckets.iter() {
        write_jsonl(&dir.join(day_file_name(day)), tweets)?;
    }
    write_file(&dir.join("summary.json"), &to_json_pretty(&summary))?;
    Ok(summary)
}

/// Labels every ingested tweet and splits the days by polarity.
pub fn cmd_sentiment(cfg: &PipelineConfig) -> Result<SentimentReport> {
    let lexicon = load_lexicon(cfg)?;
    let buckets = read_day_files(&cfg.stage_dir(INGEST_DIR), cfg.window)?;

    let dir = cfg.stage_dir(SENTIMENT_DIR);
    let mut summary = SentimentSummary::empty(cfg.window);
    let mut split: Vec<[Vec<LabeledTweet>; 3]> = Vec::with_capacity(cfg.window.len());
    for (i, (_, tweets)) in buckets.iter().enumerate() {
        let mut by_label: [Vec<LabeledTweet>; 3] = Default::default();
        for tweet in tweets {
            let s = score(&tweet.tokens, &lexicon);
            let label = classify(s);
            summary.record(i, label);
            by_label[label_slot(label)].push(LabeledTweet {
                tweet: tweet.clone(),
                sentiment: label,
                pos_count: s.pos_count,
                neg_count: s.neg_count,
            });
        }
        split.push(by_label);
    }

    fresh_dir(&dir)?;
    for label in SentimentLabel::ALL {
        let sub = dir.join(label.as_str());
        fs::create_dir_all(&sub).map_err(|e| CliError::io(&sub, e))?;
        for (day, by_label) in cfg.window.days().zip(&split) {
            write_jsonl(&sub.join(day_file_name(day)), &by_label[label_slot(label)])?;
        }
    }

    let mut report = SentimentReport::from_summary(&summary);
    if summary.negative == 0 {
        report
            .warnings
            .push("no negative tweets: topic modelling has nothing to work on".into());
    }
    write_file(&dir.join("summary.json"), &to_json_pretty(&report))?;
    write_file(
        &dir.join("negative_per_day.csv"),
        &summary.negative_per_day_csv(),
    )?;
    Ok(report)
}

fn label_slot(label: SentimentLabel) -> usize {
    match label {
        SentimentLabel::Negative => 0,
        SentimentLabel::Neutral => 1,
        SentimentLabel::Positive => 2,
    }
}

fn temporal_error(e: TemporalError) -> CliError {
    match &e {
        TemporalError::Day {
            source: TopicError::EmptyCorpus,
            ..
        } => CliError::empty(e.to_string()),
        TemporalError::Day { .. }
        | TemporalError::DanglingEntry { .. }
        | TemporalError::DuplicateEntry { .. }
        | TemporalError::Format { .. } => CliError::validation(e.to_string()),
        TemporalError::NoData => CliError::empty(e.to_string()),
        TemporalError::Io { .. } => CliError::internal(e.to_string()),
    }
}

/// Fits one topic model per day on the negative tweets.
pub fn cmd_topics(cfg: &PipelineConfig) -> Result<TopicsSummary> {
    cfg.sampler
        .validate()
        .map_err(|e| CliError::validation(e.to_string()))?;
    let stopwords = load_stopwords(cfg)?;
    let negative = read_day_files(
        &cfg.stage_dir(SENTIMENT_DIR)
            .join(SentimentLabel::Negative.as_str()),
        cfg.window,
    )?;
    if let Some((day, _)) = negative.iter().find(|(_, b)| b.is_empty()) {
        return Err(CliError::empty(format!("day {day}: no negative tweets")));
    }

    let models = run_daily(&negative, &stopwords, cfg.min_count, cfg.sampler, cfg.jobs)
        .map_err(temporal_error)?;

    let dir = cfg.stage_dir(TOPICS_DIR);
    fresh_dir(&dir)?;
    let mut days = Vec::with_capacity(models.len());
    for m in &models {
        let dump = ModelDump::from_model(&m.model, Some(m.day));
        write_file(&dir.join(model_file_name(m.day)), &dump.to_json())?;
        write_file(
            &dir.join(topics_file_name(m.day)),
            &render_topics(&m.model, Some(m.day), TOPIC_LISTING_WORDS),
        )?;
        days.push((m.day, m.model.num_topics()));
    }
    Ok(TopicsSummary {
        total_topics: days.iter().map(|d| d.1).sum(),
        days,
    })
}

/// Reads the topic dumps of every day in the window.
pub fn load_day_topics(cfg: &PipelineConfig) -> Result<Vec<DayTopics>> {
    let dir = cfg.stage_dir(TOPICS_DIR);
    cfg.window
        .days()
        .map(|day| {
            let path = dir.join(model_file_name(day));
            let src = fs::read_to_string(&path).map_err(|e| {
                CliError::validation(format!("{}: {e} (run `topics` first)", path.display()))
            })?;
            let model = ModelDump::from_json(&src)
                .and_then(|d| d.to_model())
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            Ok(DayTopics {
                day,
                topics: model.num_topics(),
            })
        })
        .collect()
}

/// Applies the category map to the fitted topics and writes the reports.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<TemporalReport> {
    let map = load_category_map(cfg)?;
    let days = load_day_topics(cfg)?;
    let topics = apply_category_map(&days, &map).map_err(temporal_error)?;
    let matrix = presence_matrix(&topics, cfg.window, cfg.include_uncategorized);
    let report = TemporalReport::build(matrix).map_err(temporal_error)?;

    let dir = cfg.stage_dir(REPORT_DIR);
    fresh_dir(&dir)?;
    write_file(&dir.join("presence.csv"), &report.matrix.to_csv())?;
    write_file(&dir.join("frequencies.csv"), &report.frequencies_csv())?;
    write_file(&dir.join("diversity.csv"), &report.diversity_csv())?;
    write_file(&dir.join("diversity_chart.txt"), &report.diversity_chart())?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub ingest: IngestSummary,
    pub sentiment: SentimentReport,
    pub topics: TopicsSummary,
    pub report: TemporalReport,
}

/// Checks every input of every stage before any stage runs.
pub fn validate_all(cfg: &PipelineConfig) -> Result<()> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::validation("no input file configured"))?;
    require_file("input", input)?;
    load_query(cfg)?;
    load_lexicon(cfg)?;
    load_stopwords(cfg)?;
    load_category_map(cfg)?;
    cfg.sampler
        .validate()
        .map_err(|e| CliError::validation(e.to_string()))
}

/// Runs all four stages in order.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    validate_all(cfg)?;
    let ingest = cmd_ingest(cfg)?;
    let sentiment = cmd_sentiment(cfg)?;
    let topics = cmd_topics(cfg)?;
    let report = cmd_report(cfg)?;
    Ok(PipelineSummary {
        ingest,
        sentiment,
        topics,
        report,
    })
}
