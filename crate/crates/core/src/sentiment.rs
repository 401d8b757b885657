//! Word-count sentiment: tokens are matched against positive and negative
//! term lists and the majority polarity wins.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DailyBuckets, DateWindow};

/// Small flood-domain lexicon bundled for demos and tests.
pub const DEMO_LEXICON: &str = include_str!("../data/lexicon_demo.txt");

const MIN_STEM_LEN: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: term {term:?} is listed as both positive and negative")]
    Conflict { line: usize, term: String },
    #[error("no {0} terms")]
    EmptyPolarity(Polarity),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

/// Exact terms plus stem wildcards (`abandon*`) for one polarity.
#[derive(Debug, Clone, Default)]
struct TermSet {
    exact: HashSet<String>,
    stems: Vec<String>,
}

impl TermSet {
    fn matches(&self, token: &str) -> bool {
        self.exact.contains(token) || self.stems.iter().any(|s| token.starts_with(s.as_str()))
    }

    fn len(&self) -> usize {
        self.exact.len() + self.stems.len()
    }

    fn contains_entry(&self, entry: &Entry) -> bool {
        match entry {
            Entry::Exact(t) => self.exact.contains(t),
            Entry::Stem(s) => self.stems.contains(s),
        }
    }

    fn insert(&mut self, entry: Entry) {
        match entry {
            Entry::Exact(t) => {
                self.exact.insert(t);
            }
            Entry::Stem(s) => {
                if !self.stems.contains(&s) {
                    self.stems.push(s);
                }
            }
        }
    }
}

enum Entry {
    Exact(String),
    Stem(String),
}

impl Entry {
    fn parse(raw: &str, line: usize) -> Result<Entry, LexiconError> {
        let term = raw.to_lowercase();
        let format = |msg: String| LexiconError::Format { line, msg };
        match term.find('*') {
            None => Ok(Entry::Exact(term)),
            Some(pos) if pos + 1 == term.len() => {
                let stem = &term[..pos];
                if stem.chars().count() < MIN_STEM_LEN {
                    Err(format(format!(
                        "stem {raw:?} is shorter than {MIN_STEM_LEN} characters"
                    )))
                } else {
                    Ok(Entry::Stem(stem.to_string()))
                }
            }
            Some(_) => Err(format(format!("wildcard inside term {raw:?}"))),
        }
    }

    fn display(&self) -> String {
        match self {
            Entry::Exact(t) => t.clone(),
            Entry::Stem(s) => format!("{s}*"),
        }
    }
}

/// Positive and negative dictionaries.
#[derive(Debug, Clone)]
pub struct Lexicon {
    positive: TermSet,
    negative: TermSet,
}

impl Lexicon {
    /// Parses the sectioned lexicon format: `[positive]` / `[negative]`
    /// headers, one entry per line, `*` suffix for stems, `;` comments.
    pub fn parse(src: &str) -> Result<Self, LexiconError> {
        let mut positive = TermSet::default();
        let mut negative = TermSet::default();
        let mut section: Option<Polarity> = None;

        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                section = match line.to_lowercase().as_str() {
                    "[positive]" => Some(Polarity::Positive),
                    "[negative]" => Some(Polarity::Negative),
                    _ => {
                        return Err(LexiconError::Format {
                            line: line_no,
                            msg: format!("unknown section {line}"),
                        })
                    }
                };
                continue;
            }
            if line.chars().any(char::is_whitespace) {
                return Err(LexiconError::Format {
                    line: line_no,
                    msg: format!("entry {line:?} contains whitespace"),
                });
            }
            let entry = Entry::parse(line, line_no)?;
            let (mine, other) = match section {
                Some(Polarity::Positive) => (&mut positive, &negative),
                Some(Polarity::Negative) => (&mut negative, &positive),
                None => {
                    return Err(LexiconError::Format {
                        line: line_no,
                        msg: "entry before any section header".into(),
                    })
                }
            };
            if other.contains_entry(&entry) {
                return Err(LexiconError::Conflict {
                    line: line_no,
                    term: entry.display(),
                });
            }
            mine.insert(entry);
        }

        if positive.len() == 0 {
            return Err(LexiconError::EmptyPolarity(Polarity::Positive));
        }
        if negative.len() == 0 {
            return Err(LexiconError::EmptyPolarity(Polarity::Negative));
        }
        Ok(Lexicon { positive, negative })
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let src = std::fs::read_to_string(path).map_err(|e| LexiconError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Lexicon::parse(&src)
    }

    pub fn demo() -> Self {
        Lexicon::parse(DEMO_LEXICON).expect("bundled lexicon is valid")
    }

    /// Number of (positive, negative) entries.
    pub fn len(&self) -> (usize, usize) {
        (self.positive.len(), self.negative.len())
    }

    pub fn is_positive(&self, token: &str) -> bool {
        self.positive.matches(token)
    }

    pub fn is_negative(&self, token: &str) -> bool {
        self.negative.matches(token)
    }
}

/// Lexicon hits in one tweet.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub pos_count: u32,
    pub neg_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Counts tokens hitting each polarity; repeated tokens count repeatedly.
pub fn score<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> SentimentScore {
    let mut s = SentimentScore::default();
    for tok in tokens {
        let tok = tok.as_ref();
        if lex.is_positive(tok) {
            s.pos_count += 1;
        }
        if lex.is_negative(tok) {
            s.neg_count += 1;
        }
    }
    s
}

/// Majority rule; ties (including no hits) are neutral.
pub fn classify(s: SentimentScore) -> SentimentLabel {
    use std::cmp::Ordering::*;
    match s.neg_count.cmp(&s.pos_count) {
        Greater => SentimentLabel::Negative,
        Less => SentimentLabel::Positive,
        Equal => SentimentLabel::Neutral,
    }
}

/// Label totals plus the per-day negative series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentSummary {
    pub window: DateWindow,
    pub negative: u64,
    pub neutral: u64,
    pub positive: u64,
    pub negative_per_day: Vec<u64>,
}

impl SentimentSummary {
    pub fn empty(window: DateWindow) -> Self {
        SentimentSummary {
            window,
            negative: 0,
            neutral: 0,
            positive: 0,
            negative_per_day: vec![0; window.len()],
        }
    }

    /// Builds a summary straight from totals and a per-day negative series.
    pub fn from_counts(
        window: DateWindow,
        negative_per_day: Vec<u64>,
        neutral: u64,
        positive: u64,
    ) -> Option<Self> {
        if negative_per_day.len() != window.len() {
            return None;
        }
        Some(SentimentSummary {
            window,
            negative: negative_per_day.iter().sum(),
            neutral,
            positive,
            negative_per_day,
        })
    }

    pub fn record(&mut self, day_index: usize, label: SentimentLabel) {
        match label {
            SentimentLabel::Negative => {
                self.negative += 1;
                self.negative_per_day[day_index] += 1;
            }
            SentimentLabel::Neutral => self.neutral += 1,
            SentimentLabel::Positive => self.positive += 1,
        }
    }

    pub fn merge(mut self, other: &SentimentSummary) -> SentimentSummary {
        assert_eq!(self.window, other.window);
        self.negative += other.negative;
        self.neutral += other.neutral;
        self.positive += other.positive;
        for (a, b) in self
            .negative_per_day
            .iter_mut()
            .zip(&other.negative_per_day)
        {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.negative + self.neutral + self.positive
    }

    pub fn count(&self, label: SentimentLabel) -> u64 {
        match label {
            SentimentLabel::Negative => self.negative,
            SentimentLabel::Neutral => self.neutral,
            SentimentLabel::Positive => self.positive,
        }
    }

    /// Share of the corpus, in percent. Zero for an empty corpus.
    pub fn percentage(&self, label: SentimentLabel) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            100.0 * self.count(label) as f64 / total as f64
        }
    }

    pub fn min_daily_negative(&self) -> u64 {
        self.negative_per_day.iter().copied().min().unwrap_or(0)
    }

    pub fn max_daily_negative(&self) -> u64 {
        self.negative_per_day.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_daily_negative(&self) -> f64 {
        self.negative as f64 / self.negative_per_day.len() as f64
    }

    /// `date,count` rows with a header.
    pub fn negative_per_day_csv(&self) -> String {
        let mut out = String::from("date,count\n");
        for (day, n) in self.window.days().zip(&self.negative_per_day) {
            out.push_str(&format!("{},{}\n", day.format("%Y-%m-%d"), n));
        }
        out
    }
}

/// Labels every tweet in the buckets and tallies the result. Tweets must
/// already be normalized.
pub fn summarize<F>(buckets: &DailyBuckets, mut label_of: F) -> SentimentSummary
where
    F: FnMut(&crate::corpus::Tweet) -> SentimentLabel,
{
    let mut summary = SentimentSummary::empty(buckets.window());
    for (i, bucket) in buckets.buckets().iter().enumerate() {
        for tweet in bucket {
            summary.record(i, label_of(tweet));
        }
    }
    summary
}

/// Rounds half-to-even at two decimals.
pub fn round2(value: f64) -> f64 {
    (value * 100.0).round_ties_even() / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{partition_by_day, Tweet};
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn lex(src: &str) -> Lexicon {
        Lexicon::parse(src).unwrap()
    }

    #[test]
    fn loads_minimal_lexicon() {
        let l = lex("[positive]\ngood\n[negative]\ndamage\n");
        assert_eq!(l.len(), (1, 1));
        assert!(l.is_positive("good"));
        assert!(l.is_negative("damage"));
    }

    #[test]
    fn wildcard_entries() {
        let l = lex("; comment\n[positive]\nglad\n[negative]\nsad*\n");
        assert!(l.is_negative("sadness"));
        assert!(l.is_negative("sad"));
        assert!(!l.is_negative("glad"));
    }

    #[test]
    fn lexicon_errors() {
        assert!(matches!(
            Lexicon::parse("[positive]\nfine\n[negative]\nfine\n"),
            Err(LexiconError::Conflict { line: 4, .. })
        ));
        assert_eq!(
            Lexicon::parse("[positive]\n[negative]\nbad\n").unwrap_err(),
            LexiconError::EmptyPolarity(Polarity::Positive)
        );
        assert_eq!(
            Lexicon::parse("[positive]\ngood\n[negative]\n").unwrap_err(),
            LexiconError::EmptyPolarity(Polarity::Negative)
        );
        assert!(matches!(
            Lexicon::parse("[positive]\ngo*od\n[negative]\nbad\n"),
            Err(LexiconError::Format { line: 2, .. })
        ));
        assert!(matches!(
            Lexicon::parse("[positive]\ng*\n[negative]\nbad\n"),
            Err(LexiconError::Format { .. })
        ));
        assert!(matches!(
            Lexicon::parse("good\n[negative]\nbad\n"),
            Err(LexiconError::Format { line: 1, .. })
        ));
    }

    #[test]
    fn score_examples() {
        let l = lex("[positive]\nglad\n[negative]\ndamage\nsad*\n");
        assert_eq!(
            score(&["damage", "inside", "room"], &l),
            SentimentScore {
                pos_count: 0,
                neg_count: 1
            }
        );
        assert_eq!(score::<&str>(&[], &l), SentimentScore::default());
        // frozen from an exhaustive small-lexicon script
        assert_eq!(
            score(&["sadness", "sadly", "glad"], &l),
            SentimentScore {
                pos_count: 1,
                neg_count: 2
            }
        );
        assert_eq!(score(&["damage", "damage"], &l).neg_count, 2);
    }

    #[test]
    fn classify_examples() {
        let s = |pos_count, neg_count| SentimentScore {
            pos_count,
            neg_count,
        };
        assert_eq!(classify(s(0, 0)), SentimentLabel::Neutral);
        assert_eq!(classify(s(1, 3)), SentimentLabel::Negative);
        assert_eq!(classify(s(2, 2)), SentimentLabel::Neutral);
        assert_eq!(classify(s(3, 1)), SentimentLabel::Positive);
    }

    #[test]
    fn large_corpus_label_shares() {
        // 217,074 / 529,150 / 217,183 sum to 963,407
        let w = DateWindow::flood_2015();
        let mut per_day = vec![0; 13];
        per_day[0] = 217_074;
        let s = SentimentSummary::from_counts(w, per_day, 529_150, 217_183).unwrap();
        assert_eq!(s.total(), 963_407);
        assert_eq!(round2(s.percentage(SentimentLabel::Negative)), 22.53);
        assert_eq!(round2(s.percentage(SentimentLabel::Neutral)), 54.92);
        assert_eq!(round2(s.percentage(SentimentLabel::Positive)), 22.54);
    }

    #[test]
    fn daily_negative_fixture() {
        let per_day = vec![
            16198, 18710, 30022, 20319, 17803, 17575, 15632, 12745, 12783, 13208, 13813, 14839,
            13427,
        ];
        let s = SentimentSummary::from_counts(DateWindow::flood_2015(), per_day, 0, 0).unwrap();
        assert_eq!(s.min_daily_negative(), 12_745);
        assert_eq!(s.max_daily_negative(), 30_022);
        assert_eq!(s.negative, 217_074);
        assert!((s.mean_daily_negative() - 16_700.0).abs() < 100.0);
    }

    #[test]
    fn single_negative_tweet_series() {
        let w = DateWindow::flood_2015();
        let t = Tweet {
            id: "1".into(),
            created_at: Utc.with_ymd_and_hms(2015, 10, 3, 9, 0, 0).unwrap(),
            text: String::new(),
            tokens: vec![],
        };
        let (b, _) = partition_by_day(vec![t], w);
        let s = summarize(&b, |_| SentimentLabel::Negative);
        let mut expected = vec![0; 13];
        expected[0] = 1;
        assert_eq!(s.negative_per_day, expected);
        assert!(s
            .negative_per_day_csv()
            .starts_with("date,count\n2015-10-03,1\n2015-10-04,0\n"));
    }

    #[test]
    fn round_half_even() {
        assert_eq!(round2(9.375), 9.38);
        assert_eq!(round2(9.385), 9.38);
        assert_eq!(round2(18.461538), 18.46);
    }

    #[test]
    fn demo_lexicon_is_valid() {
        let l = Lexicon::demo();
        assert!(l.is_negative("damage"));
        assert!(l.is_positive("safe"));
        assert!(!l.is_negative("flood"));
    }

    proptest! {
        #[test]
        fn classify_is_symmetric(p in 0u32..50, n in 0u32..50) {
            let a = classify(SentimentScore { pos_count: p, neg_count: n });
            let b = classify(SentimentScore { pos_count: n, neg_count: p });
            let flipped = match a {
                SentimentLabel::Negative => SentimentLabel::Positive,
                SentimentLabel::Positive => SentimentLabel::Negative,
                SentimentLabel::Neutral => SentimentLabel::Neutral,
            };
            prop_assert_eq!(b, flipped);
        }

        #[test]
        fn unmatched_tokens_do_not_change_label(
            tokens in prop::collection::vec("(good|bad|sadly|glad|x[a-z]{0,4})", 0..12),
            extra in "q[a-z]{0,6}",
            pos in 0usize..13,
        ) {
            let l = lex("[positive]\ngood\nglad\n[negative]\nbad\nsad*\n");
            let before = classify(score(&tokens, &l));
            let mut more = tokens.clone();
            more.insert(pos.min(more.len()), extra);
            prop_assert_eq!(classify(score(&more, &l)), before);
            let s = score(&tokens, &l);
            prop_assert!((s.pos_count + s.neg_count) as usize <= tokens.len());
        }
    }
}
