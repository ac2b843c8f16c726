//! Misinformation analytics over tweet and epidemiological CSV corpora.
//!
//! The pipeline is split into small, pure stages:
//!
//! - [`corpus`] parses and repairs the tweet and epidemiological CSV files.
//! - [`textprep`] holds the two tweet cleaners and the tokenizer.
//! - [`sentiment`] scores text against a term polarity lexicon and aggregates
//!   positive/negative/neutral percentages per keyword.
//! - [`placeparse`] turns the serialized place object attached to a tweet into
//!   structured geographic fields.
//! - [`analytics`] does keyword filtering, cumulative-to-daily conversion,
//!   lagged Pearson correlation, hotspot ranking and exponential smoothing.
//!
//! Every operation is deterministic. Records are immutable once parsed.

pub mod analytics;
pub mod corpus;
pub mod placeparse;
pub mod sentiment;
pub mod textprep;

pub use analytics::{
    correlate, cumulative_to_daily, forecast, hotspot_rank, keyword_filter, Correction, HotspotRow,
    KeywordQuery, TimeSeries,
};
pub use corpus::{
    parse_epi_csv, parse_tweet_csv, strip_encoding_artifact, ColumnMapping, CorpusConfig,
    CorpusError, EpiRecord, IngestIssue, IssueKind, TweetRecord,
};
pub use placeparse::{parse_place, PlaceInfo};
pub use sentiment::{
    classify, report, score, top_examples, Lexicon, SentimentLabel, SentimentReport,
};
pub use textprep::{clean_corpus_text, clean_for_sentiment, tokenize, CleanConfig, StopwordList};
