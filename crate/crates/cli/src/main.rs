use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use sitaware_cli::stages::{self, IngestSummary, SentimentReport, TopicsSummary};
use sitaware_cli::{CliError, ConfigFile, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "sitaware",
    version,
    about = "Disaster tweet sentiment and topic pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, filter and normalize raw tweets into per-day files.
    Ingest(Common),
    /// Label ingested tweets negative, neutral or positive.
    Sentiment(Common),
    /// Fit one topic model per day on the negative tweets.
    Topics(Common),
    /// Build presence, frequency and diversity reports from a category map.
    Report(Common),
    /// Run every stage in order.
    Pipeline(Common),
}

/// Flags shared by every subcommand. Flags override the config file.
#[derive(Args, Debug, Default)]
struct Common {
    /// Config file (TOML key = value pairs).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Raw tweets, one JSON object per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Query term file, one term per line.
    #[arg(long)]
    query: Option<PathBuf>,
    /// First day of the window (YYYY-MM-DD).
    #[arg(long)]
    start: Option<NaiveDate>,
    /// Last day of the window, inclusive.
    #[arg(long)]
    end: Option<NaiveDate>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Topics per day.
    #[arg(long)]
    k: Option<usize>,
    /// Document-topic prior (default 5/K).
    #[arg(long)]
    alpha: Option<f64>,
    /// Topic-word prior.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Drop words seen fewer times than this in a day.
    #[arg(long)]
    min_count: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Abort on the first malformed record.
    #[arg(long)]
    strict: bool,
    /// Days fitted concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV with header date,topic_id,category.
    #[arg(long)]
    category_map: Option<PathBuf>,
    /// Add an Uncategorized row for unmapped topics.
    #[arg(long)]
    include_uncategorized: bool,
}

impl Common {
    fn resolve(self) -> Result<PipelineConfig, CliError> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = ConfigFile {
            input: self.input,
            query: self.query,
            start: self.start,
            end: self.end,
            lexicon: self.lexicon,
            stopwords: self.stopwords,
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            iterations: self.iterations,
            seed: self.seed,
            min_count: self.min_count,
            output: self.output,
            strict: self.strict.then_some(true),
            jobs: self.jobs,
            category_map: self.category_map,
            include_uncategorized: self.include_uncategorized.then_some(true),
        };
        PipelineConfig::resolve(base.overlay(flags))
    }
}

fn print_ingest(s: &IngestSummary) {
    println!(
        "ingest: {} lines, {} malformed, {} matched, {} outside window, {} kept",
        s.total, s.malformed, s.matched, s.excluded, s.kept
    );
}

fn print_sentiment(s: &SentimentReport) {
    println!(
        "sentiment: {} tweets, negative {} ({:.2}%), neutral {} ({:.2}%), positive {} ({:.2}%)",
        s.total, s.negative, s.negative_pct, s.neutral, s.neutral_pct, s.positive, s.positive_pct
    );
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
}

fn print_topics(s: &TopicsSummary) {
    println!("topics: {} days, {} topics", s.days.len(), s.total_topics);
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest(c) => {
            let cfg = c.resolve()?;
            print_ingest(&stages::cmd_ingest(&cfg)?);
        }
        Command::Sentiment(c) => {
            let cfg = c.resolve()?;
            print_sentiment(&stages::cmd_sentiment(&cfg)?);
        }
        Command::Topics(c) => {
            let cfg = c.resolve()?;
            print_topics(&stages::cmd_topics(&cfg)?);
        }
        Command::Report(c) => {
            let cfg = c.resolve()?;
            let r = stages::cmd_report(&cfg)?;
            print!("{}", r.frequencies_csv());
            print!("{}", r.diversity_chart());
        }
        Command::Pipeline(c) => {
            let cfg = c.resolve()?;
            let s = stages::cmd_pipeline(&cfg)?;
            print_ingest(&s.ingest);
            print_sentiment(&s.sentiment);
            print_topics(&s.topics);
            print!("{}", s.report.diversity_chart());
            println!("output written to {}", cfg.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
