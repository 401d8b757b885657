//! Pipeline configuration: a flat key-value file (TOML syntax) overlaid by
//! command-line flags.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;
use sitaware::corpus::DateWindow;
use sitaware::topicmodel::{
    SamplerConfig, DEFAULT_ALPHA_SUM, DEFAULT_BETA, DEFAULT_ITERATIONS, DEFAULT_TOPICS,
};

use crate::error::{CliError, Result};

/// Values read from a config file. Every key is optional.
#[derive(Debug, Default, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub query: Option<PathBuf>,
    #[serde(default, deserialize_with = "de_date")]
    pub start: Option<NaiveDate>,
    #[serde(default, deserialize_with = "de_date")]
    pub end: Option<NaiveDate>,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iterations: Option<usize>,
    pub seed: Option<u64>,
    pub min_count: Option<usize>,
    pub output: Option<PathBuf>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,
    pub category_map: Option<PathBuf>,
    pub include_uncategorized: Option<bool>,
}

/// Accepts both TOML dates (`start = 2015-10-03`) and strings.
fn de_date<'de, D>(de: D) -> std::result::Result<Option<NaiveDate>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Toml(toml::value::Datetime),
    }
    let text = match Raw::deserialize(de)? {
        Raw::Text(s) => s,
        Raw::Toml(d) => d.to_string(),
    };
    NaiveDate::parse_from_str(&text, "%Y-%m-%d")
        .map(Some)
        .map_err(|e| serde::de::Error::custom(format!("bad date {text:?}: {e}")))
}

impl ConfigFile {
    pub fn parse(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))?;
        let mut cfg = ConfigFile::parse(&src)
            .map_err(|e| CliError::validation(format!("{}: {}", path.display(), e.message)))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.input,
            &mut cfg.query,
            &mut cfg.lexicon,
            &mut cfg.stopwords,
            &mut cfg.output,
            &mut cfg.category_map,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `other` replace ours.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            input: other.input.or(self.input),
            query: other.query.or(self.query),
            start: other.start.or(self.start),
            end: other.end.or(self.end),
            lexicon: other.lexicon.or(self.lexicon),
            stopwords: other.stopwords.or(self.stopwords),
            k: other.k.or(self.k),
            alpha: other.alpha.or(self.alpha),
            beta: other.beta.or(self.beta),
            iterations: other.iterations.or(self.iterations),
            seed: other.seed.or(self.seed),
            min_count: other.min_count.or(self.min_count),
            output: other.output.or(self.output),
            strict: other.strict.or(self.strict),
            jobs: other.jobs.or(self.jobs),
            category_map: other.category_map.or(self.category_map),
            include_uncategorized: other.include_uncategorized.or(self.include_uncategorized),
        }
    }
}

/// Fully resolved settings shared by all stages.
///
/// `query`, `lexicon` and `stopwords` fall back to the bundled defaults
/// when unset. `alpha` defaults to 5/K.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub query: Option<PathBuf>,
    pub window: DateWindow,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub sampler: SamplerConfig,
    pub min_count: usize,
    pub output: PathBuf,
    pub strict: bool,
    pub jobs: usize,
    pub category_map: Option<PathBuf>,
    pub include_uncategorized: bool,
}

impl PipelineConfig {
    pub fn resolve(file: ConfigFile) -> Result<Self> {
        let defaults = DateWindow::flood_2015();
        let window = DateWindow::new(
            file.start.unwrap_or(defaults.start()),
            file.end.unwrap_or(defaults.end()),
        )
        .map_err(|e| CliError::validation(e.to_string()))?;
        let topics = file.k.unwrap_or(DEFAULT_TOPICS);
        let sampler = SamplerConfig {
            topics,
            alpha: file
                .alpha
                .unwrap_or(DEFAULT_ALPHA_SUM / topics.max(1) as f64),
            beta: file.beta.unwrap_or(DEFAULT_BETA),
            iterations: file.iterations.unwrap_or(DEFAULT_ITERATIONS),
            seed: file.seed.unwrap_or(0),
        };
        sampler
            .validate()
            .map_err(|e| CliError::validation(e.to_string()))?;
        let min_count = file.min_count.unwrap_or(1);
        if min_count < 1 {
            return Err(CliError::validation("min_count must be at least 1"));
        }
        let jobs = file.jobs.unwrap_or(1);
        if jobs < 1 {
            return Err(CliError::validation("jobs must be at least 1"));
        }
        Ok(PipelineConfig {
            input: file.input,
            query: file.query,
            window,
            lexicon: file.lexicon,
            stopwords: file.stopwords,
            sampler,
            min_count,
            output: file.output.unwrap_or_else(|| PathBuf::from("out")),
            strict: file.strict.unwrap_or(false),
            jobs,
            category_map: file.category_map,
            include_uncategorized: file.include_uncategorized.unwrap_or(false),
        })
    }

    /// Defaults with the given output directory.
    pub fn with_output(output: impl Into<PathBuf>) -> Self {
        let mut cfg = PipelineConfig::resolve(ConfigFile::default()).expect("defaults are valid");
        cfg.output = output.into();
        cfg
    }

    pub fn stage_dir(&self, stage: &str) -> PathBuf {
        self.output.join(stage)
    }
}

pub(crate) fn require_file(what: &str, path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "{what} file {} does not exist",
            path.display()
        )))
    }
}
