//! Per-day topic models and the category-by-day reports built from a
//! hand-edited category map.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DailyBuckets, DateWindow};
use crate::sentiment::round2;
use crate::topicmodel::{build_vocab, fit, SamplerConfig, StopWords, TopicError, TopicModel};

/// Row name used for topics without a category when they are reported.
pub const UNCATEGORIZED: &str = "Uncategorized";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemporalError {
    #[error("day {day}: {source}")]
    Day {
        day: NaiveDate,
        #[source]
        source: TopicError,
    },
    #[error("category map line {line}: no topic {topic} on {day}")]
    DanglingEntry {
        line: usize,
        day: NaiveDate,
        topic: usize,
    },
    #[error("category map line {line}: ({day}, topic {topic}) is already mapped")]
    DuplicateEntry {
        line: usize,
        day: NaiveDate,
        topic: usize,
    },
    #[error("category map line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("no categorized topics to report")]
    NoData,
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

/// A fitted model for one day of the window.
#[derive(Debug, Clone)]
pub struct DayModel {
    pub day: NaiveDate,
    pub model: TopicModel,
}

/// Seed of the model for day `index`: the base seed plus the day index.
pub fn day_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Fits one model per day of `buckets`, which should hold only the tweets
/// to be modelled (the negative ones). Day `i` uses seed `config.seed + i`.
/// Up to `jobs` days are fitted concurrently.
pub fn run_daily(
    buckets: &DailyBuckets,
    stopwords: &StopWords,
    min_count: usize,
    config: SamplerConfig,
    jobs: usize,
) -> Result<Vec<DayModel>, TemporalError> {
    let days: Vec<(usize, NaiveDate)> = buckets.window().days().enumerate().collect();
    let fit_day = |&(i, day): &(usize, NaiveDate)| -> Result<DayModel, TemporalError> {
        let tweets = &buckets.buckets()[i];
        let day_err = |source| TemporalError::Day { day, source };
        let corpus = build_vocab(
            tweets.iter().map(|t| (t.id.as_str(), t.tokens.as_slice())),
            stopwords,
            min_count,
        )
        .map_err(day_err)?;
        let config = SamplerConfig {
            seed: day_seed(config.seed, i),
            ..config
        };
        let model = fit(corpus, config).map_err(day_err)?;
        Ok(DayModel { day, model })
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| TemporalError::Io {
                    path: "<thread pool>".into(),
                    msg: e.to_string(),
                })?;
            // collect keeps day order; the first failing day is reported
            return pool.install(|| days.par_iter().map(fit_day).collect());
        }
    }
    let _ = jobs;
    days.iter().map(fit_day).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryEntry {
    pub day: NaiveDate,
    pub topic: usize,
    pub category: String,
    /// 1-based line in the source file, 0 when built in code.
    #[serde(skip)]
    pub line: usize,
}

/// Human-assigned categories for (day, topic) pairs. Unlisted pairs are
/// uncategorized.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryMap {
    entries: Vec<CategoryEntry>,
}

impl CategoryMap {
    pub fn new<I>(entries: I) -> Result<Self, TemporalError>
    where
        I: IntoIterator<Item = (NaiveDate, usize, String)>,
    {
        let mut map = CategoryMap::default();
        for (day, topic, category) in entries {
            map.push(CategoryEntry {
                day,
                topic,
                category,
                line: 0,
            })?;
        }
        Ok(map)
    }

    fn push(&mut self, mut entry: CategoryEntry) -> Result<(), TemporalError> {
        entry.category = entry.category.trim().to_string();
        if entry.category.is_empty() {
            return Err(TemporalError::Format {
                line: entry.line,
                msg: "empty category name".into(),
            });
        }
        if self
            .entries
            .iter()
            .any(|e| e.day == entry.day && e.topic == entry.topic)
        {
            return Err(TemporalError::DuplicateEntry {
                line: entry.line,
                day: entry.day,
                topic: entry.topic,
            });
        }
        self.entries.push(entry);
        Ok(())
    }

    /// CSV with a `date,topic_id,category` header.
    pub fn parse_csv(src: &str) -> Result<Self, TemporalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(src.as_bytes());
        let headers = rdr.headers().map_err(|e| TemporalError::Format {
            line: 1,
            msg: e.to_string(),
        })?;
        if headers.iter().collect::<Vec<_>>() != ["date", "topic_id", "category"] {
            return Err(TemporalError::Format {
                line: 1,
                msg: "expected header `date,topic_id,category`".into(),
            });
        }
        let mut map = CategoryMap::default();
        for record in rdr.records() {
            let record = record.map_err(|e| TemporalError::Format {
                line: e.position().map_or(0, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let format = |msg: String| TemporalError::Format { line, msg };
            if record.len() != 3 {
                return Err(format(format!("expected 3 fields, got {}", record.len())));
            }
            let day = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
                .map_err(|e| format(format!("bad date {:?}: {e}", &record[0])))?;
            let topic = record[1]
                .parse::<usize>()
                .map_err(|e| format(format!("bad topic id {:?}: {e}", &record[1])))?;
            map.push(CategoryEntry {
                day,
                topic,
                category: record[2].to_string(),
                line,
            })?;
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self, TemporalError> {
        let src = std::fs::read_to_string(path).map_err(|e| TemporalError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        CategoryMap::parse_csv(&src)
    }

    pub fn entries(&self) -> &[CategoryEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct category names, alphabetically.
    pub fn categories(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.entries.iter().map(|e| e.category.as_str()).collect();
        set.into_iter().collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["date", "topic_id", "category"]).unwrap();
        for e in &self.entries {
            w.write_record([
                e.day.format("%Y-%m-%d").to_string(),
                e.topic.to_string(),
                e.category.clone(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// How many topics one day's model has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayTopics {
    pub day: NaiveDate,
    pub topics: usize,
}

impl From<&DayModel> for DayTopics {
    fn from(m: &DayModel) -> Self {
        DayTopics {
            day: m.day,
            topics: m.model.num_topics(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategorizedTopic {
    pub day: NaiveDate,
    pub topic: usize,
    pub category: Option<String>,
}

/// Labels every topic of every day. Map entries pointing at a day or topic
/// that does not exist are rejected.
pub fn apply_category_map(
    days: &[DayTopics],
    map: &CategoryMap,
) -> Result<Vec<CategorizedTopic>, TemporalError> {
    let mut lookup: BTreeMap<(NaiveDate, usize), &str> = BTreeMap::new();
    for e in map.entries() {
        let exists = days.iter().any(|d| d.day == e.day && e.topic < d.topics);
        if !exists {
            return Err(TemporalError::DanglingEntry {
                line: e.line,
                day: e.day,
                topic: e.topic,
            });
        }
        lookup.insert((e.day, e.topic), e.category.as_str());
    }
    Ok(days
        .iter()
        .flat_map(|d| (0..d.topics).map(move |t| (d.day, t)))
        .map(|(day, topic)| CategorizedTopic {
            day,
            topic,
            category: lookup.get(&(day, topic)).map(|c| c.to_string()),
        })
        .collect())
}

/// Category x day booleans: a cell is set when any topic of that day
/// carries the category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresenceMatrix {
    pub categories: Vec<String>,
    pub days: Vec<NaiveDate>,
    pub cells: Vec<Vec<bool>>,
}

impl PresenceMatrix {
    pub fn row_sum(&self, c: usize) -> usize {
        self.cells[c].iter().filter(|&&b| b).count()
    }

    pub fn column_sum(&self, d: usize) -> usize {
        self.cells.iter().filter(|row| row[d]).count()
    }

    pub fn total(&self) -> usize {
        (0..self.categories.len()).map(|c| self.row_sum(c)).sum()
    }

    pub fn get(&self, category: &str, day: NaiveDate) -> Option<bool> {
        let c = self.categories.iter().position(|n| n == category)?;
        let d = self.days.iter().position(|&x| x == day)?;
        Some(self.cells[c][d])
    }

    /// `category,<date>...` header, then one 0/1 row per category.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["category".to_string()];
        header.extend(self.days.iter().map(|d| d.format("%Y-%m-%d").to_string()));
        w.write_record(&header).unwrap();
        for (name, row) in self.categories.iter().zip(&self.cells) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|&b| if b { "1" } else { "0" }.to_string()));
            w.write_record(&rec).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

/// Builds the presence matrix over `window`. Categories are sorted
/// alphabetically; with `include_uncategorized` an extra
/// [`UNCATEGORIZED`] row (last) marks days with unlabeled topics.
pub fn presence_matrix(
    topics: &[CategorizedTopic],
    window: DateWindow,
    include_uncategorized: bool,
) -> PresenceMatrix {
    let mut seen: HashSet<(&str, usize)> = HashSet::new();
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for t in topics {
        let Some(d) = window.index_of(t.day) else {
            continue;
        };
        match &t.category {
            Some(c) => {
                names.insert(c);
                seen.insert((c, d));
            }
            None if include_uncategorized => {
                seen.insert((UNCATEGORIZED, d));
            }
            None => {}
        }
    }
    let mut categories: Vec<&str> = names.into_iter().filter(|&n| n != UNCATEGORIZED).collect();
    if seen.iter().any(|(c, _)| *c == UNCATEGORIZED) {
        categories.push(UNCATEGORIZED);
    }
    let days: Vec<NaiveDate> = window.days().collect();
    let cells = categories
        .iter()
        .map(|c| (0..days.len()).map(|d| seen.contains(&(*c, d))).collect())
        .collect();
    PresenceMatrix {
        categories: categories.into_iter().map(str::to_string).collect(),
        days,
        cells,
    }
}

/// Share of presence cells per category, in percent of all set cells.
pub fn category_frequencies(matrix: &PresenceMatrix) -> Result<Vec<(String, f64)>, TemporalError> {
    let total = matrix.total();
    if total == 0 {
        return Err(TemporalError::NoData);
    }
    Ok(matrix
        .categories
        .iter()
        .enumerate()
        .map(|(c, name)| {
            (
                name.clone(),
                100.0 * matrix.row_sum(c) as f64 / total as f64,
            )
        })
        .collect())
}

/// Number of distinct categories on each day.
pub fn diversity_per_day(matrix: &PresenceMatrix) -> Vec<usize> {
    (0..matrix.days.len())
        .map(|d| matrix.column_sum(d))
        .collect()
}

/// Presence matrix with its derived frequency and diversity series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalReport {
    pub matrix: PresenceMatrix,
    pub frequencies: Vec<(String, f64)>,
    pub diversity: Vec<usize>,
}

impl TemporalReport {
    pub fn build(matrix: PresenceMatrix) -> Result<Self, TemporalError> {
        let frequencies = category_frequencies(&matrix)?;
        let diversity = diversity_per_day(&matrix);
        Ok(TemporalReport {
            matrix,
            frequencies,
            diversity,
        })
    }

    /// `category,percentage`, percentages rounded half-to-even to 2 places.
    pub fn frequencies_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["category", "percentage"]).unwrap();
        for (name, p) in &self.frequencies {
            w.write_record([name.clone(), format!("{:.2}", round2(*p))])
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn diversity_csv(&self) -> String {
        let mut out = String::from("date,count\n");
        for (day, n) in self.matrix.days.iter().zip(&self.diversity) {
            let _ = writeln!(out, "{},{}", day.format("%Y-%m-%d"), n);
        }
        out
    }

    pub fn diversity_chart(&self) -> String {
        ascii_bar_chart(
            "Distinct topic categories per day (UTC calendar days)",
            self.matrix
                .days
                .iter()
                .map(|d| d.format("%Y-%m-%d").to_string())
                .zip(self.diversity.iter().map(|&n| n as u64)),
        )
    }
}

/// One `#` per unit, scaled down when the largest bar exceeds 60.
pub fn ascii_bar_chart(title: &str, rows: impl IntoIterator<Item = (String, u64)>) -> String {
    let rows: Vec<(String, u64)> = rows.into_iter().collect();
    let max = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let scale = if max > 60 { 60.0 / max as f64 } else { 1.0 };
    let mut out = format!("{title}\n");
    for (label, n) in rows {
        let bar = "#".repeat((n as f64 * scale).round() as usize);
        let _ = writeln!(out, "{label:>width$} | {bar} {n}");
    }
    out
}
