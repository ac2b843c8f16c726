//! Command-line front end: batch runs of ingestion, sentiment reports,
//! correlation tables, hotspot rankings, forecasts and charts.
//!
//! Exit codes are a stable contract: 0 success, 1 usage error, 2 input-file
//! error, 3 schema or encoding error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use misinfo_core::analytics::{Correction, KeywordQuery};

pub mod commands;
pub mod svg;
pub mod table;

pub use table::Format;

/// Search terms used when `--keywords` is not given.
pub const DEFAULT_KEYWORDS: [&str; 7] = [
    "COVID-19",
    "COVID-19 hoax",
    "COVID-19 conspiracy",
    "COVID-19 fake news",
    "COVID-19 spike",
    "COVID-19 hospitalizations",
    "COVID-19 death",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Schema(_) => 3,
        }
    }

    pub(crate) fn output(e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("cannot write output: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "misinfo", version, about = "Misinformation tweet analytics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the tweet (and optionally epi) CSV and write canonical copies.
    Ingest(RunArgs),
    /// Per-keyword positive/negative/neutral shares and example tweets.
    Sentiment(RunArgs),
    /// Lagged correlation of daily keyword volume with cases, hospitalizations and deaths.
    Correlate(RunArgs),
    /// Rank states by keyword tweet volume, joined with peak daily burden.
    Hotspots(RunArgs),
    /// Exponential smoothing forecast of national daily cases and deaths.
    Forecast(RunArgs),
    /// Render series CSVs as SVG line charts.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrectionArg {
    Clamp,
    Keep,
}

impl From<CorrectionArg> for Correction {
    fn from(c: CorrectionArg) -> Self {
        match c {
            CorrectionArg::Clamp => Correction::ClampZero,
            CorrectionArg::Keep => Correction::KeepNegative,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Tweet CSV (Date_Time,text,username,user_location,retweet_count,favourite_count,Place).
    #[arg(long, value_name = "PATH")]
    pub tweets: Option<PathBuf>,
    /// State-level epidemiological history CSV.
    #[arg(long, value_name = "PATH")]
    pub epi: Option<PathBuf>,
    /// Lexicon file (`term<TAB>polarity`); the bundled lexicon when omitted.
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    /// Stopword file, one word per line; the bundled English list when omitted.
    #[arg(long, value_name = "PATH")]
    pub stopwords: Option<PathBuf>,
    /// Comma-separated search terms.
    #[arg(long, value_name = "LIST")]
    pub keywords: Option<String>,
    #[arg(long, value_name = "YYYY-MM-DD")]
    pub since: Option<NaiveDate>,
    #[arg(long, value_name = "YYYY-MM-DD")]
    pub until: Option<NaiveDate>,
    /// Drop tweets starting with "RT @".
    #[arg(long)]
    pub exclude_retweets: bool,
    /// Correlate at every lag in [-N, N] days.
    #[arg(long, value_name = "N", default_value_t = 7)]
    pub lag_window: u32,
    /// Smoothing factor in (0, 1].
    #[arg(long, value_name = "F", default_value_t = 0.5)]
    pub alpha: f64,
    /// Forecast horizon in days.
    #[arg(long, value_name = "N", default_value_t = 14)]
    pub horizon: usize,
    /// How negative day-over-day differences are treated.
    #[arg(long, value_enum, default_value_t = CorrectionArg::Clamp)]
    pub correction: CorrectionArg,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// chrono format of the Date_Time column.
    #[arg(long, value_name = "FMT", default_value = misinfo_core::corpus::DEFAULT_TIMESTAMP_FORMAT)]
    pub timestamp_format: String,
    /// Keep byte-literal wrappers such as b'...' in text fields.
    #[arg(long)]
    pub no_strip_artifacts: bool,
    /// Compute the neutral share with the legacy formula
    /// (total - positive + negative), for comparing with older reports.
    #[arg(long)]
    pub printed_neutral_formula: bool,
    /// Resolve states from user_location when the place object gives none.
    #[arg(long)]
    pub user_location_fallback: bool,
    /// Example tweets written per label and keyword.
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub examples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Series CSVs (`date,value`). Defaults to every CSV in `<out>/series`.
    #[arg(value_name = "SERIES")]
    pub series: Vec<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

/// Validated settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub args: RunArgs,
    pub keywords: Vec<String>,
    pub since: NaiveDate,
    pub until: NaiveDate,
}

impl RunConfig {
    pub fn from_args(args: RunArgs) -> Result<Self, CliError> {
        let keywords: Vec<String> = match &args.keywords {
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|k| !k.is_empty())
                .map(str::to_string)
                .collect(),
            None => DEFAULT_KEYWORDS.iter().map(|k| k.to_string()).collect(),
        };
        if keywords.is_empty() {
            return Err(CliError::Usage("--keywords lists no terms".into()));
        }
        let since = args.since.unwrap_or(NaiveDate::MIN);
        let until = args.until.unwrap_or(NaiveDate::MAX);
        if since > until {
            return Err(CliError::Usage(format!(
                "--since {since} is after --until {until}"
            )));
        }
        if !(args.alpha > 0.0 && args.alpha <= 1.0) {
            return Err(CliError::Usage(format!(
                "--alpha {} is outside (0, 1]",
                args.alpha
            )));
        }
        if args.horizon == 0 {
            return Err(CliError::Usage("--horizon must be at least 1".into()));
        }
        for path in [&args.tweets, &args.epi, &args.lexicon, &args.stopwords]
            .into_iter()
            .flatten()
        {
            check_readable(path)?;
        }
        Ok(Self {
            args,
            keywords,
            since,
            until,
        })
    }

    pub fn query(&self, keyword: &str) -> KeywordQuery {
        KeywordQuery::new(keyword, self.since, self.until)
            .expect("window validated")
            .excluding_retweets(self.args.exclude_retweets)
    }

    pub fn require_tweets(&self) -> Result<&Path, CliError> {
        self.args
            .tweets
            .as_deref()
            .ok_or_else(|| CliError::Usage("--tweets PATH is required".into()))
    }

    pub fn require_epi(&self) -> Result<&Path, CliError> {
        self.args
            .epi
            .as_deref()
            .ok_or_else(|| CliError::Usage("--epi PATH is required".into()))
    }

    pub fn out_dir(&self) -> &Path {
        &self.args.out
    }
}

pub(crate) fn check_readable(path: &Path) -> Result<(), CliError> {
    std::fs::File::open(path)
        .map(|_| ())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if path.is_dir() {
        return Err(CliError::Input(format!(
            "{}: is a directory",
            path.display()
        )));
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Ingest(a) => commands::ingest(&RunConfig::from_args(a)?, out, err),
        Command::Sentiment(a) => commands::sentiment(&RunConfig::from_args(a)?, out, err),
        Command::Correlate(a) => commands::correlate(&RunConfig::from_args(a)?, out, err),
        Command::Hotspots(a) => commands::hotspots(&RunConfig::from_args(a)?, out, err),
        Command::Forecast(a) => commands::forecast(&RunConfig::from_args(a)?, out, err),
        Command::Plot(a) => commands::plot(&a, out, err),
    }
}
