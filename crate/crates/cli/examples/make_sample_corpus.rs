//! Writes the bundled synthetic corpus to `data/sample/tweets.jsonl`.
//!
//! Usage: cargo run -p sitaware-cli --example make_sample_corpus [-- <out-path>]
//!
//! 5,000 lines: in-window flood tweets with daily volumes shaped like a
//! real two-week flood event, plus off-topic tweets, tweets dated outside
//! the window and a handful of malformed records.

use std::io::Write;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOTAL_LINES: usize = 5000;
const OFF_TOPIC: usize = 180;
const OUT_OF_WINDOW: usize = 90;
const MALFORMED: usize = 30;

/// Relative volume of negative tweets per day.
const DAILY_SHAPE: [u32; 13] = [
    16198, 18710, 30022, 20319, 17803, 17575, 15632, 12745, 12783, 13208, 13813, 14839, 13427,
];

/// Theme vocabulary and the days (0-based) on which each theme is active.
const THEMES: &[(&str, &[&str], &str)] = &[
    (
        "animal",
        &["dog", "pets", "cat", "kennel", "animals"],
        "0100000000000",
    ),
    (
        "bridge",
        &["bridge", "span", "overpass", "crossing", "washed"],
        "0010011000010",
    ),
    (
        "costs",
        &["million", "dollars", "estimate", "repairs", "costs"],
        "1111101110011",
    ),
    (
        "water",
        &["boil", "advisory", "drinking", "bottled", "tap"],
        "0011111100000",
    ),
    (
        "report",
        &["rainfall", "inches", "river", "crest", "gauge"],
        "1101100000100",
    ),
    (
        "homes",
        &["evacuated", "displaced", "families", "shelters", "homes"],
        "1011111000000",
    ),
    (
        "insurance",
        &["insurance", "claims", "fema", "coverage", "policy"],
        "0001110011100",
    ),
    (
        "power",
        &["power", "outage", "electricity", "lines", "restored"],
        "0100010100000",
    ),
    (
        "road",
        &["road", "interstate", "detour", "closures", "highway"],
        "0011111001000",
    ),
    (
        "roof",
        &["roof", "leaking", "tarp", "ceiling", "shingles"],
        "0011111100000",
    ),
    (
        "victims",
        &["toll", "bodies", "rescue", "swept", "search"],
        "0111111111111",
    ),
];

const QUERY_TAGS: &[&str] = &[
    "#scflood",
    "#floodsc",
    "#scflood2015",
    "#scflooding",
    "#floodingsc",
    "#flood",
    "flood",
    "#scfloodrelief",
];
const NEGATIVE: &[&str] = &[
    "destroyed",
    "devastating",
    "lost",
    "dead",
    "terrible",
    "worst",
    "damaged",
    "stranded",
    "drowned",
    "victims",
    "ruined",
    "scary",
    "sad",
    "tragic",
    "homeless",
];
const POSITIVE: &[&str] = &[
    "thankful",
    "safe",
    "hope",
    "love",
    "volunteers",
    "grateful",
    "proud",
    "blessed",
    "strong",
    "support",
    "heroes",
    "kindness",
];
const FILLER: &[&str] = &[
    "columbia",
    "county",
    "today",
    "near",
    "morning",
    "update",
    "people",
    "street",
    "night",
    "city",
    "state",
    "week",
    "news",
    "area",
    "downtown",
    "lexington",
    "richland",
];
const OFF_TOPIC_TEXT: &[&str] = &[
    "great game tonight go tigers",
    "coffee and a good book this morning",
    "traffic on i-26 is slow again",
    "new phone who dis",
    "cannot wait for the weekend",
];

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).expect("non-empty word list")
}

fn apportion(total: usize, shape: &[u32]) -> Vec<usize> {
    let sum: u64 = shape.iter().map(|&v| v as u64).sum();
    let mut out: Vec<usize> = shape
        .iter()
        .map(|&v| (v as u64 * total as u64 / sum) as usize)
        .collect();
    let mut rem: Vec<(u64, usize)> = shape
        .iter()
        .enumerate()
        .map(|(i, &v)| ((v as u64 * total as u64) % sum, i))
        .collect();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = total - out.iter().sum::<usize>();
    for &(_, i) in rem.iter().take(short) {
        out[i] += 1;
    }
    out
}

fn flood_text(rng: &mut ChaCha8Rng, day: usize) -> String {
    let active: Vec<&[&str]> = THEMES
        .iter()
        .filter(|t| t.2.as_bytes()[day] == b'1')
        .map(|t| t.1)
        .collect();
    let theme = active.choose(rng).expect("every day has a theme");
    let mut words: Vec<String> = vec![pick(rng, QUERY_TAGS).to_string()];
    for _ in 0..rng.gen_range(2..=4) {
        words.push(pick(rng, theme).to_string());
    }
    for _ in 0..rng.gen_range(1..=3) {
        words.push(pick(rng, FILLER).to_string());
    }
    // tone: negative, neutral or positive by construction
    match rng.gen_range(0..100) {
        0..=34 => {
            for _ in 0..rng.gen_range(1..=2) {
                words.push(pick(rng, NEGATIVE).to_string());
            }
        }
        35..=74 => {}
        _ => {
            for _ in 0..rng.gen_range(1..=2) {
                words.push(pick(rng, POSITIVE).to_string());
            }
        }
    }
    words.shuffle(rng);
    let mut text = words.join(" ");
    if rng.gen_bool(0.15) {
        text = format!(
            "RT @{}: {}",
            pick(rng, &["wistv", "thestate", "scemd", "nws"]),
            text
        );
    }
    if rng.gen_bool(0.2) {
        text.push_str(&format!(" https://t.co/{:08x}", rng.gen::<u32>()));
    }
    text
}

fn timestamp(rng: &mut ChaCha8Rng, day: NaiveDate) -> String {
    let secs = rng.gen_range(0..86_400);
    let t = Utc.from_utc_datetime(&day.and_hms_opt(0, 0, 0).unwrap()) + Duration::seconds(secs);
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn record(id: u64, created_at: &str, text: &str) -> String {
    serde_json::json!({ "id": id.to_string(), "created_at": created_at, "text": text }).to_string()
}

fn main() -> std::io::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "data/sample/tweets.jsonl".into());
    let mut rng = ChaCha8Rng::seed_from_u64(20151003);
    let start = NaiveDate::from_ymd_opt(2015, 10, 3).unwrap();
    let in_window = TOTAL_LINES - OFF_TOPIC - OUT_OF_WINDOW - MALFORMED;

    let mut lines = Vec::with_capacity(TOTAL_LINES);
    let mut id = 651_000_000_000_000_000u64;
    let mut next_id = || {
        id += 1;
        id
    };
    for (d, &n) in apportion(in_window, &DAILY_SHAPE).iter().enumerate() {
        let day = start + Duration::days(d as i64);
        for _ in 0..n {
            let text = flood_text(&mut rng, d);
            lines.push(record(next_id(), &timestamp(&mut rng, day), &text));
        }
    }
    for _ in 0..OFF_TOPIC {
        let day = start + Duration::days(rng.gen_range(0..13));
        let text = pick(&mut rng, OFF_TOPIC_TEXT);
        lines.push(record(next_id(), &timestamp(&mut rng, day), text));
    }
    for _ in 0..OUT_OF_WINDOW {
        let offset = *[-2i64, -1, 13, 14].choose(&mut rng).unwrap();
        let day = start + Duration::days(offset);
        let text = flood_text(&mut rng, 0);
        lines.push(record(next_id(), &timestamp(&mut rng, day), &text));
    }
    for i in 0..MALFORMED {
        let day = start + Duration::days(rng.gen_range(0..13));
        let ts = timestamp(&mut rng, day);
        lines.push(match i % 3 {
            0 => format!(
                "{{\"id\": \"{}\", \"created_at\": \"{ts}\", \"text\": \"#scflood cut off",
                next_id()
            ),
            1 => serde_json::json!({ "id": next_id().to_string(), "created_at": ts }).to_string(),
            _ => record(next_id(), "yesterday afternoon", "#scflood roads closed"),
        });
    }
    lines.shuffle(&mut rng);

    let mut f = std::io::BufWriter::new(std::fs::File::create(&out)?);
    for line in &lines {
        writeln!(f, "{line}")?;
    }
    f.flush()?;
    eprintln!("wrote {} lines to {out}", lines.len());
    Ok(())
}
