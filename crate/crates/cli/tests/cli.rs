use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn sitaware(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sitaware"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn sample_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample")
}

fn record(id: usize, day: &str, text: &str) -> String {
    serde_json::json!({ "id": id.to_string(), "created_at": format!("{day}T12:00:00Z"), "text": text })
        .to_string()
}

/// A two-day run directory with its own tweets and config.
struct Run {
    dir: TempDir,
}

impl Run {
    fn new(lines: &[String], extra_config: &str) -> Run {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("tweets.jsonl"), lines.join("\n") + "\n").unwrap();
        fs::write(
            dir.path().join("run.toml"),
            format!(
                "input = \"tweets.jsonl\"\nstart = 2015-10-03\nend = 2015-10-04\noutput = \"out\"\n{extra_config}"
            ),
        )
        .unwrap();
        Run { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, cmd: &str, extra: &[&str]) -> Output {
        let config = self.path("run.toml");
        let mut args = vec![cmd, "--config", config.to_str().unwrap()];
        args.extend_from_slice(extra);
        sitaware(&args)
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.path(rel)).unwrap()
    }
}

fn planted_corpus() -> Vec<String> {
    let mut lines = Vec::new();
    let mut id = 0;
    for day in ["2015-10-03", "2015-10-04"] {
        for i in 0..5 {
            id += 1;
            lines.push(record(
                id,
                day,
                &format!("#scflood bridge destroyed road {i} damage"),
            ));
        }
        for _ in 0..3 {
            id += 1;
            lines.push(record(id, day, "#scflood thankful volunteers safe"));
        }
        for _ in 0..2 {
            id += 1;
            lines.push(record(id, day, "#scflood water level update"));
        }
    }
    // out of the window and off topic
    lines.push(record(100, "2015-10-09", "#scflood destroyed"));
    lines.push(record(101, "2015-10-03", "nothing to see here"));
    lines
}

#[test]
fn ingest_sample_corpus_writes_13_day_files() {
    let out = tempfile::tempdir().unwrap();
    let config = sample_dir().join("pipeline.toml");
    let o = sitaware(&[
        "ingest",
        "--config",
        config.to_str().unwrap(),
        "--output",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let days = fs::read_dir(out.path().join("ingest"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("day_")
        })
        .count();
    assert_eq!(days, 13);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("ingest/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["total"], 5000);
    assert_eq!(summary["malformed"], 30);
}

#[test]
fn ingest_without_matches_exits_3() {
    let run = Run::new(&[record(1, "2015-10-03", "sunny day")], "");
    let o = run.run("ingest", &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(!run.path("out/ingest").exists());
}

#[test]
fn missing_query_file_exits_2() {
    let run = Run::new(&planted_corpus(), "query = \"nope.txt\"\n");
    let o = run.run("ingest", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nope.txt"));
    assert!(!run.path("out").exists());
}

#[test]
fn strict_mode_reports_the_bad_line() {
    let mut lines = planted_corpus();
    lines.insert(3, "{not json".into());
    let run = Run::new(&lines, "");
    let o = run.run("ingest", &["--strict"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("tweets.jsonl:4"), "{}", stderr(&o));

    let o = run.run("ingest", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(run
        .read("out/ingest/summary.json")
        .contains("\"malformed\": 1"));
}

#[test]
fn sentiment_totals_follow_planted_labels() {
    let run = Run::new(&planted_corpus(), "");
    assert_eq!(code(&run.run("ingest", &[])), 0);
    let o = run.run("sentiment", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s: serde_json::Value =
        serde_json::from_str(&run.read("out/sentiment/summary.json")).unwrap();
    assert_eq!(
        (
            s["negative"].clone(),
            s["positive"].clone(),
            s["neutral"].clone()
        ),
        (10.into(), 6.into(), 4.into())
    );
    assert_eq!(
        run.read("out/sentiment/negative_per_day.csv"),
        "date,count\n2015-10-03,5\n2015-10-04,5\n"
    );
    assert_eq!(
        run.read("out/sentiment/negative/day_2015-10-03.jsonl")
            .lines()
            .count(),
        5
    );
}

#[test]
fn ten_five_five_corpus() {
    let mut lines = Vec::new();
    for i in 0..10 {
        lines.push(record(i, "2015-10-03", "#flood lost everything"));
    }
    for i in 10..15 {
        lines.push(record(i, "2015-10-04", "#flood grateful"));
    }
    for i in 15..20 {
        lines.push(record(i, "2015-10-04", "#flood rain"));
    }
    let run = Run::new(&lines, "");
    assert_eq!(code(&run.run("ingest", &[])), 0);
    assert_eq!(code(&run.run("sentiment", &[])), 0);
    let s: serde_json::Value =
        serde_json::from_str(&run.read("out/sentiment/summary.json")).unwrap();
    assert_eq!([&s["negative"], &s["positive"], &s["neutral"]], [10, 5, 5]);
}

#[test]
fn lexicon_without_negative_section_exits_2() {
    let run = Run::new(&planted_corpus(), "lexicon = \"lex.txt\"\n");
    fs::write(run.path("lex.txt"), "[positive]\ngood\n[negative]\n").unwrap();
    assert_eq!(code(&run.run("ingest", &[])), 0);
    assert_eq!(code(&run.run("sentiment", &[])), 2);
    assert!(!run.path("out/sentiment").exists());
}

#[test]
fn missing_lexicon_exits_2() {
    let run = Run::new(&planted_corpus(), "lexicon = \"absent.txt\"\n");
    assert_eq!(code(&run.run("ingest", &[])), 0);
    assert_eq!(code(&run.run("sentiment", &[])), 2);
}

#[test]
fn all_neutral_corpus_warns() {
    let lines: Vec<String> = (0..4)
        .map(|i| {
            record(
                i,
                if i < 2 { "2015-10-03" } else { "2015-10-04" },
                "#scflood water update",
            )
        })
        .collect();
    let run = Run::new(&lines, "");
    assert_eq!(code(&run.run("ingest", &[])), 0);
    let o = run.run("sentiment", &[]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(run.read("out/sentiment/negative/day_2015-10-03.jsonl"), "");

    let o = run.run("topics", &[]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("2015-10-03"), "{}", stderr(&o));
}

#[test]
fn topics_smoke_run_and_determinism() {
    let run = Run::new(&planted_corpus(), "");
    assert_eq!(code(&run.run("ingest", &[])), 0);
    assert_eq!(code(&run.run("sentiment", &[])), 0);
    let o = run.run("topics", &["--k", "2", "--iterations", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = run.read("out/topics/model_2015-10-04.json");
    assert!(run
        .read("out/topics/topics_2015-10-03.txt")
        .contains("topic 1"));
    assert_eq!(
        code(&run.run("topics", &["--k", "2", "--iterations", "10"])),
        0
    );
    assert_eq!(run.read("out/topics/model_2015-10-04.json"), first);
    assert_eq!(
        code(&run.run("topics", &["--k", "2", "--iterations", "10", "--seed", "5"])),
        0
    );
    assert_ne!(run.read("out/topics/model_2015-10-04.json"), first);
}

#[test]
fn more_topics_than_tokens_exits_2() {
    let run = Run::new(&planted_corpus(), "");
    run.run("ingest", &[]);
    run.run("sentiment", &[]);
    assert_eq!(
        code(&run.run("topics", &["--k", "500", "--iterations", "1"])),
        2
    );
}

fn fitted_two_day_run(extra_config: &str) -> Run {
    let run = Run::new(&planted_corpus(), extra_config);
    for (cmd, extra) in [
        ("ingest", vec![]),
        ("sentiment", vec![]),
        ("topics", vec!["--k", "3", "--iterations", "20"]),
    ] {
        let o = run.run(cmd, &extra);
        assert_eq!(code(&o), 0, "{cmd}: {}", stderr(&o));
    }
    run
}

#[test]
fn report_on_empty_map() {
    let run = fitted_two_day_run("");
    assert_eq!(code(&run.run("report", &[])), 3);
    let o = run.run("report", &["--include-uncategorized"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        run.read("out/report/frequencies.csv"),
        "category,percentage\nUncategorized,100.00\n"
    );
    assert_eq!(
        run.read("out/report/presence.csv"),
        "category,2015-10-03,2015-10-04\nUncategorized,1,1\n"
    );
}

#[test]
fn report_with_map() {
    let run = fitted_two_day_run("category_map = \"map.csv\"\n");
    fs::write(
        run.path("map.csv"),
        "date,topic_id,category\n2015-10-03,0,Road Damage\n2015-10-03,2,Bridge Damage\n2015-10-04,1,Road Damage\n",
    )
    .unwrap();
    let o = run.run("report", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        run.read("out/report/frequencies.csv"),
        "category,percentage\nBridge Damage,33.33\nRoad Damage,66.67\n"
    );
    assert_eq!(
        run.read("out/report/diversity.csv"),
        "date,count\n2015-10-03,2\n2015-10-04,1\n"
    );
    assert!(run.path("out/report/diversity_chart.txt").exists());
}

#[test]
fn dangling_map_entry_exits_2() {
    let run = fitted_two_day_run("category_map = \"map.csv\"\n");
    fs::write(
        run.path("map.csv"),
        "date,topic_id,category\n2015-10-03,7,Road Damage\n",
    )
    .unwrap();
    let o = run.run("report", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert!(!run.path("out/report").exists());
}

#[test]
fn pipeline_equals_manual_stages() {
    let map = "date,topic_id,category\n2015-10-03,1,Victims\n2015-10-04,0,Victims\n";
    let manual = fitted_two_day_run("category_map = \"map.csv\"\nk = 3\niterations = 20\n");
    fs::write(manual.path("map.csv"), map).unwrap();
    assert_eq!(code(&manual.run("report", &[])), 0);

    let piped = Run::new(
        &planted_corpus(),
        "category_map = \"map.csv\"\nk = 3\niterations = 20\n",
    );
    fs::write(piped.path("map.csv"), map).unwrap();
    let o = piped.run("pipeline", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let files = |root: &Path| {
        let mut out = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(dir) = stack.pop() {
            for e in fs::read_dir(dir).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.push((
                        p.strip_prefix(root).unwrap().to_path_buf(),
                        fs::read(&p).unwrap(),
                    ));
                }
            }
        }
        out.sort();
        out
    };
    let (a, b) = (files(&manual.path("out")), files(&piped.path("out")));
    assert_eq!(a.len(), 3 + 8 + 4 + 4);
    assert_eq!(a, b);
}

#[test]
fn pipeline_validates_before_writing() {
    let run = Run::new(&planted_corpus(), "category_map = \"map.csv\"\n");
    fs::write(run.path("map.csv"), "day,topic,category\n").unwrap();
    assert_eq!(code(&run.run("pipeline", &[])), 2);
    assert!(!run.path("out").exists());
}

#[test]
fn bad_flag_values_exit_2() {
    let run = Run::new(&planted_corpus(), "");
    assert_eq!(code(&run.run("ingest", &["--k", "0"])), 2);
    assert_eq!(code(&run.run("ingest", &["--start", "2015-10-05"])), 2);
    assert_eq!(code(&sitaware(&["frobnicate"])), 2);
}
