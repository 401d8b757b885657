//! Tweet records: parsing, query filtering, token normalization and
//! partitioning into daily buckets.
//!
//! Records are newline-delimited JSON objects with `id`, `created_at`
//! (ISO-8601) and `text`. Days are UTC calendar dates.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One social-media record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    /// Normalized tokens; empty until [`Tweet::normalize`] runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tokens: Vec<String>,
}

impl Tweet {
    pub fn day(&self) -> NaiveDate {
        self.created_at.date_naive()
    }

    /// Fills `tokens` from `text`.
    pub fn normalize(&mut self) {
        self.tokens = normalize(&self.text);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordErrorKind {
    Malformed(String),
    MissingField(&'static str),
    Timestamp(String),
    DuplicateId(String),
}

impl fmt::Display for RecordErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordErrorKind::Malformed(msg) => write!(f, "malformed record: {msg}"),
            RecordErrorKind::MissingField(field) => write!(f, "missing field `{field}`"),
            RecordErrorKind::Timestamp(ts) => write!(f, "unparseable timestamp {ts:?}"),
            RecordErrorKind::DuplicateId(id) => write!(f, "duplicate tweet id {id:?}"),
        }
    }
}

/// A record-level failure. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct RecordError {
    pub line: usize,
    pub kind: RecordErrorKind,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("invalid date window: start {start} is after end {end}")]
    Window { start: NaiveDate, end: NaiveDate },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    created_at: Option<String>,
    text: Option<String>,
}

/// Parses one newline-delimited record. `line_no` is only used for error
/// reporting.
pub fn parse_record(line: &str, line_no: usize) -> Result<Tweet, RecordError> {
    let err = |kind| RecordError {
        line: line_no,
        kind,
    };
    let line = line.trim();
    if line.is_empty() {
        return Err(err(RecordErrorKind::Malformed("empty line".into())));
    }
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|e| err(RecordErrorKind::Malformed(e.to_string())))?;

    let id = match raw.id {
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        Some(serde_json::Value::Null) | None => {
            return Err(err(RecordErrorKind::MissingField("id")))
        }
        Some(other) => {
            return Err(err(RecordErrorKind::Malformed(format!(
                "id must be a string, got {other}"
            ))))
        }
    };
    if id.is_empty() {
        return Err(err(RecordErrorKind::Malformed("empty id".into())));
    }
    let created_at = raw
        .created_at
        .ok_or_else(|| err(RecordErrorKind::MissingField("created_at")))?;
    let text = raw
        .text
        .ok_or_else(|| err(RecordErrorKind::MissingField("text")))?;
    let created_at =
        parse_timestamp(&created_at).ok_or_else(|| err(RecordErrorKind::Timestamp(created_at)))?;

    Ok(Tweet {
        id,
        created_at,
        text,
        tokens: Vec::new(),
    })
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(ts) = DateTime::parse_from_rfc3339(s) {
        return Some(ts.with_timezone(&Utc));
    }
    // Offset-less timestamps are taken as UTC.
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .ok()
        .map(|naive| naive.and_utc())
}

/// Case-folds `text` and splits it into tokens.
///
/// URLs (anything from `http://` or `https://` to the next whitespace),
/// `@mentions` and the retweet marker `rt` are removed. Hashtags keep their
/// word without the `#`. Apostrophes inside words are dropped, every other
/// non-alphanumeric character separates tokens.
pub fn normalize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut chunk = chunk.to_lowercase();
        if let Some(pos) = url_start(&chunk) {
            chunk.truncate(pos);
        }
        let mut current = String::new();
        let mut mention = false;
        let mut prev_marker: Option<char> = None;
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                if current.is_empty() {
                    mention = prev_marker == Some('@');
                }
                current.push(c);
                prev_marker = None;
            } else if is_apostrophe(c) && !current.is_empty() {
                // "they'll" -> "theyll"
            } else {
                push_token(&mut tokens, &mut current, mention);
                prev_marker = Some(c);
            }
        }
        push_token(&mut tokens, &mut current, mention);
    }
    tokens
}

fn url_start(chunk: &str) -> Option<usize> {
    match (chunk.find("http://"), chunk.find("https://")) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn push_token(tokens: &mut Vec<String>, current: &mut String, mention: bool) {
    if current.is_empty() {
        return;
    }
    let token = std::mem::take(current);
    if mention || token == "rt" || token.starts_with("http") {
        return;
    }
    tokens.push(token);
}

/// A disjunction of match terms. Hashtag terms keep their leading `#`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    terms: BTreeSet<String>,
}

impl Query {
    pub fn new<I, S>(terms: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for term in terms {
            let term = term.as_ref().trim().to_lowercase();
            let bare = term.strip_prefix('#').unwrap_or(&term);
            if bare.is_empty() {
                return Err(CorpusError::Query(format!("empty term {term:?}")));
            }
            set.insert(term);
        }
        if set.is_empty() {
            return Err(CorpusError::Query("no terms".into()));
        }
        Ok(Query { terms: set })
    }

    /// One term per line; blank lines ignored. A leading `#` marks a
    /// hashtag term, not a comment.
    pub fn parse(src: &str) -> Result<Self, CorpusError> {
        Query::new(src.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let src = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        Query::parse(&src)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    /// The hashtag set from the flood data collection.
    pub fn flood_default() -> Self {
        Query::new([
            "#floodsc",
            "#scflood2015",
            "#scfloodrelief",
            "#southcarolinastrong",
            "#prayforsc",
            "#scflood",
            "#scflooding",
            "#floodgsscmmwithlove",
            "#floodingsc",
            "#flood",
            "flood",
        ])
        .expect("static query is valid")
    }

    /// Whether any term matches a whole normalized token.
    pub fn matches_tokens(&self, tokens: &[String]) -> bool {
        tokens.iter().any(|tok| {
            self.terms
                .iter()
                .any(|t| t.strip_prefix('#').unwrap_or(t) == tok)
        })
    }
}

/// True iff any query term occurs in the case-folded tweet text.
///
/// Matching runs on normalized tokens, so `#scflood` and a bare `scflood`
/// both match the hashtag term, and `flood` never matches `floodlight`.
pub fn matches_query(tweet: &Tweet, query: &Query) -> bool {
    if tweet.tokens.is_empty() {
        query.matches_tokens(&normalize(&tweet.text))
    } else {
        query.matches_tokens(&tweet.tokens)
    }
}

/// Inclusive range of UTC calendar days.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, CorpusError> {
        if start > end {
            return Err(CorpusError::Window { start, end });
        }
        Ok(DateWindow { start, end })
    }

    /// October 3 to October 15, 2015.
    pub fn flood_2015() -> Self {
        DateWindow {
            start: NaiveDate::from_ymd_opt(2015, 10, 3).unwrap(),
            end: NaiveDate::from_ymd_opt(2015, 10, 15).unwrap(),
        }
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, day: NaiveDate) -> Option<usize> {
        if day < self.start || day > self.end {
            None
        } else {
            Some((day - self.start).num_days() as usize)
        }
    }

    pub fn day(&self, index: usize) -> Option<NaiveDate> {
        (index < self.len()).then(|| self.start + chrono::Days::new(index as u64))
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.len()).map(|i| self.start + chrono::Days::new(i as u64))
    }
}

/// Tweets grouped by day, one bucket per day of the window.
#[derive(Clone, Debug, PartialEq)]
pub struct DailyBuckets {
    window: DateWindow,
    buckets: Vec<Vec<Tweet>>,
}

impl DailyBuckets {
    pub fn empty(window: DateWindow) -> Self {
        DailyBuckets {
            window,
            buckets: vec![Vec::new(); window.len()],
        }
    }

    /// Buckets from pre-split lists; fails if a tweet lies outside its day.
    pub fn from_buckets(window: DateWindow, buckets: Vec<Vec<Tweet>>) -> Option<Self> {
        if buckets.len() != window.len() {
            return None;
        }
        let aligned = buckets
            .iter()
            .enumerate()
            .all(|(i, b)| b.iter().all(|t| window.index_of(t.day()) == Some(i)));
        aligned.then_some(DailyBuckets { window, buckets })
    }

    pub fn window(&self) -> DateWindow {
        self.window
    }

    pub fn buckets(&self) -> &[Vec<Tweet>] {
        &self.buckets
    }

    pub fn into_buckets(self) -> Vec<Vec<Tweet>> {
        self.buckets
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, &[Tweet])> {
        self.window
            .days()
            .zip(self.buckets.iter().map(Vec::as_slice))
    }

    pub fn total(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }

    /// Places a tweet in its day; returns it back if outside the window.
    pub fn insert(&mut self, tweet: Tweet) -> Result<(), Tweet> {
        match self.window.index_of(tweet.day()) {
            Some(i) => {
                self.buckets[i].push(tweet);
                Ok(())
            }
            None => Err(tweet),
        }
    }

    /// Concatenates two bucket sets over the same window.
    pub fn merge(mut self, other: DailyBuckets) -> DailyBuckets {
        assert_eq!(
            self.window, other.window,
            "merging buckets of different windows"
        );
        for (mine, theirs) in self.buckets.iter_mut().zip(other.buckets) {
            mine.extend(theirs);
        }
        self
    }
}

/// Splits tweets by UTC day. Returns the buckets and the number of tweets
/// that fell outside the window.
pub fn partition_by_day(
    tweets: impl IntoIterator<Item = Tweet>,
    window: DateWindow,
) -> (DailyBuckets, usize) {
    let mut buckets = DailyBuckets::empty(window);
    let mut excluded = 0;
    for tweet in tweets {
        if buckets.insert(tweet).is_err() {
            excluded += 1;
        }
    }
    (buckets, excluded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn tweet(id: &str, ts: &str, text: &str) -> Tweet {
        parse_record(
            &serde_json::json!({"id": id, "created_at": ts, "text": text}).to_string(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn parses_sample_record() {
        let line = r#"{"id":"1","created_at":"2015-10-05T12:00:00Z","text":"Damage inside Student Activities room at Westwood. #SCFlood"}"#;
        let t = parse_record(line, 1).unwrap();
        assert_eq!(t.id, "1");
        assert_eq!(t.day(), date(2015, 10, 5));
        assert!(t.tokens.is_empty());
    }

    #[test]
    fn converts_offsets_to_utc() {
        let t = tweet("1", "2015-10-04T22:30:00-04:00", "x");
        assert_eq!(t.day(), date(2015, 10, 5));
        let t = tweet("2", "2015-10-04T22:30:00", "x");
        assert_eq!(t.day(), date(2015, 10, 4));
    }

    #[test]
    fn record_errors() {
        let e = parse_record("", 7).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(matches!(e.kind, RecordErrorKind::Malformed(_)));

        let e = parse_record(r#"{"id":"1","created_at":"not-a-date","text":"x"}"#, 2).unwrap_err();
        assert_eq!(e.kind, RecordErrorKind::Timestamp("not-a-date".into()));

        let e = parse_record(r#"{"id":"1","text":"x"}"#, 3).unwrap_err();
        assert_eq!(e.kind, RecordErrorKind::MissingField("created_at"));

        let e = parse_record(
            r#"{"id":"","created_at":"2015-10-05T12:00:00Z","text":"x"}"#,
            4,
        )
        .unwrap_err();
        assert!(matches!(e.kind, RecordErrorKind::Malformed(_)));

        assert!(parse_record("[1,2,3]", 5).is_err());
    }

    #[test]
    fn numeric_ids_become_strings() {
        let t = parse_record(
            r#"{"id":650000000001,"created_at":"2015-10-05T12:00:00Z","text":"x"}"#,
            1,
        )
        .unwrap();
        assert_eq!(t.id, "650000000001");
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize("rt @user Flood on Main St http://t.co/abc"),
            ["flood", "on", "main", "st"]
        );
        assert!(normalize("").is_empty());
        // frozen from an independent regex tokenizer
        assert_eq!(
            normalize("Damage inside Student Activities room at Westwood. #SCFlood"),
            [
                "damage",
                "inside",
                "student",
                "activities",
                "room",
                "at",
                "westwood",
                "scflood"
            ]
        );
        assert_eq!(
            normalize("How many South Carolinians have flood insurance?  Few.They'll be looking to federal gov't or their tight-fisted governor for help. #SCFlood"),
            [
                "how", "many", "south", "carolinians", "have", "flood", "insurance", "few",
                "theyll", "be", "looking", "to", "federal", "govt", "or", "their", "tight",
                "fisted", "governor", "for", "help", "scflood"
            ]
        );
    }

    #[test]
    fn normalize_edge_cases() {
        assert_eq!(normalize("RT: see(https://x.y/z) now"), ["see", "now"]);
        assert_eq!(normalize("@a@b #c#d"), ["c", "d"]);
        assert_eq!(normalize("r't"), Vec::<String>::new());
        assert_eq!(normalize("FLOOD…warning"), ["flood", "warning"]);
    }

    #[test]
    fn query_matching() {
        let q = Query::flood_default();
        let t = tweet(
            "1",
            "2015-10-05T12:00:00Z",
            "How many South Carolinians have flood insurance? ... #SCFlood",
        );
        assert!(matches_query(&t, &q));
        let t = tweet("2", "2015-10-05T12:00:00Z", "sunny day in Ohio");
        assert!(!matches_query(&t, &q));

        let flood = Query::new(["flood"]).unwrap();
        assert!(matches_query(
            &tweet("3", "2015-10-05T12:00:00Z", "FLOOD warning"),
            &flood
        ));
        assert!(!matches_query(
            &tweet("4", "2015-10-05T12:00:00Z", "floodlight"),
            &flood
        ));

        let hashtag = Query::new(["#SCFlood"]).unwrap();
        assert!(matches_query(
            &tweet("5", "2015-10-05T12:00:00Z", "scflood again"),
            &hashtag
        ));
    }

    #[test]
    fn query_file_format() {
        let q = Query::parse("#floodsc\n\nflood\n  #SCFlood2015  \n").unwrap();
        assert_eq!(
            q.terms().collect::<Vec<_>>(),
            ["#floodsc", "#scflood2015", "flood"]
        );
        assert!(Query::parse("\n\n").is_err());
        assert!(Query::parse("#\n").is_err());
    }

    #[test]
    fn window_and_partition() {
        let w = DateWindow::flood_2015();
        assert_eq!(w.len(), 13);
        assert!(DateWindow::new(date(2015, 10, 5), date(2015, 10, 4)).is_err());

        let tweets = vec![
            tweet("a", "2015-10-02T23:59:59Z", "x"),
            tweet("b", "2015-10-03T00:00:00Z", "x"),
            tweet("c", "2015-10-15T23:59:59Z", "x"),
            tweet("d", "2015-10-16T00:00:00Z", "x"),
        ];
        let (b, excluded) = partition_by_day(tweets, w);
        assert_eq!(excluded, 2);
        assert_eq!(b.buckets().len(), 13);
        assert_eq!(b.buckets()[0][0].id, "b");
        assert_eq!(b.buckets()[12][0].id, "c");
    }

    #[test]
    fn merge_is_concatenation() {
        let w = DateWindow::flood_2015();
        let (a, _) = partition_by_day(vec![tweet("a", "2015-10-04T01:00:00Z", "x")], w);
        let (b, _) = partition_by_day(vec![tweet("b", "2015-10-04T02:00:00Z", "x")], w);
        let m = a.merge(b);
        assert_eq!(m.buckets()[1].len(), 2);
        assert_eq!(m.total(), 2);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,80}") {
            let once = normalize(&s);
            let twice = normalize(&once.join(" "));
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn normalize_output_is_clean(s in "(rt|RT|@\\w+|#\\w+|https?://\\S+|\\w+|[ .,!?'’:;-]){0,30}") {
            for tok in normalize(&s) {
                prop_assert!(tok != "rt");
                prop_assert!(!tok.starts_with("http"));
                prop_assert!(!tok.is_empty());
                prop_assert!(!tok.chars().any(char::is_whitespace));
            }
        }

        #[test]
        fn query_matching_is_monotone(
            text in "[a-z #]{0,40}",
            base in prop::collection::vec("#?[a-z]{1,5}", 1..4),
            extra in prop::collection::vec("#?[a-z]{1,5}", 0..4),
        ) {
            let t = Tweet { id: "x".into(), created_at: DateTime::<Utc>::UNIX_EPOCH, text, tokens: vec![] };
            let q1 = Query::new(&base).unwrap();
            let q2 = Query::new(base.iter().chain(&extra)).unwrap();
            if matches_query(&t, &q1) {
                prop_assert!(matches_query(&t, &q2));
            }
        }

        #[test]
        fn partition_conserves_count(offsets in prop::collection::vec(-5i64..20, 0..50)) {
            let w = DateWindow::flood_2015();
            let base = date(2015, 10, 3).and_hms_opt(12, 0, 0).unwrap().and_utc();
            let tweets: Vec<Tweet> = offsets.iter().enumerate().map(|(i, o)| Tweet {
                id: i.to_string(),
                created_at: base + chrono::Duration::days(*o),
                text: String::new(),
                tokens: vec![],
            }).collect();
            let n = tweets.len();
            let (b, excluded) = partition_by_day(tweets, w);
            prop_assert_eq!(b.total() + excluded, n);
            for (day, bucket) in b.iter() {
                for t in bucket {
                    prop_assert_eq!(t.day(), day);
                }
            }
        }
    }
}
