//! Tweet and epidemiological CSV ingestion.
//!
//! Both parsers are strict about the header and lenient about rows: a bad row
//! never aborts the parse, it is skipped and reported as an [`IngestIssue`]
//! carrying the physical line on which the row starts. Only a missing header
//! column or undecodable bytes are fatal.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use csv::{ByteRecord, ReaderBuilder, StringRecord, WriterBuilder};
use thiserror::Error;

/// Column names of the tweet CSV, in canonical order.
pub const TWEET_COLUMNS: [&str; 7] = [
    "Date_Time",
    "text",
    "username",
    "user_location",
    "retweet_count",
    "favourite_count",
    "Place",
];

pub const DEFAULT_TIMESTAMP_FORMAT: &str = "%m/%d/%Y %H:%M";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub date_time: NaiveDateTime,
    pub text: String,
    pub username: String,
    pub user_location: Option<String>,
    pub retweet_count: u64,
    pub favourite_count: u64,
    pub place_raw: Option<String>,
}

impl TweetRecord {
    pub fn date(&self) -> NaiveDate {
        self.date_time.date()
    }

    pub fn is_retweet(&self) -> bool {
        self.text.starts_with("RT @")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpiRecord {
    pub date: NaiveDate,
    pub state: String,
    pub positive_cum: Option<u64>,
    pub hospitalized_cum: Option<u64>,
    pub death_cum: Option<u64>,
    pub recovered_cum: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IssueKind {
    MalformedRow,
    BadTimestamp,
    NegativeCount,
    EmptyText,
    DuplicateKey,
}

impl IssueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::MalformedRow => "malformed_row",
            IssueKind::BadTimestamp => "bad_timestamp",
            IssueKind::NegativeCount => "negative_count",
            IssueKind::EmptyText => "empty_text",
            IssueKind::DuplicateKey => "duplicate_key",
        }
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rejected row. `line_number` is the 1-based physical line where the row
/// begins in the source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestIssue {
    pub line_number: u64,
    pub kind: IssueKind,
    pub detail: String,
}

impl IngestIssue {
    fn new(line_number: u64, kind: IssueKind, detail: impl Into<String>) -> Self {
        Self {
            line_number,
            kind,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input is not valid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },
    #[error("header is missing required column(s): {}", missing.join(", "))]
    Schema { missing: Vec<String> },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    /// chrono format string for `Date_Time`.
    pub timestamp_format: String,
    /// Apply [`strip_encoding_artifact`] to the text, username and location fields.
    pub strip_artifacts: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            timestamp_format: DEFAULT_TIMESTAMP_FORMAT.to_string(),
            strip_artifacts: true,
        }
    }
}

/// Header names used to address epidemiological columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub date: String,
    pub state: String,
    pub positive: String,
    pub hospitalized: String,
    pub death: String,
    pub recovered: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            date: "date".into(),
            state: "state".into(),
            positive: "positive".into(),
            hospitalized: "hospitalizedCumulative".into(),
            death: "death".into(),
            recovered: "recovered".into(),
        }
    }
}

/// Removes a byte-literal wrapper such as `b'Mexico, MO'`: a single ASCII
/// letter, an apostrophe, the content, and a closing apostrophe. Nested
/// wrappers are all removed, which keeps the function idempotent. Anything
/// else is returned as is.
pub fn strip_encoding_artifact(field: &str) -> String {
    let mut s = field;
    while let Some(inner) = unwrap_byte_literal(s) {
        s = inner;
    }
    s.to_string()
}

fn unwrap_byte_literal(s: &str) -> Option<&str> {
    let bytes = s.as_bytes();
    if bytes.len() >= 3
        && bytes[0].is_ascii_alphabetic()
        && bytes[1] == b'\''
        && bytes[bytes.len() - 1] == b'\''
    {
        Some(&s[2..s.len() - 1])
    } else {
        None
    }
}

fn decode(source: impl Read) -> Result<String, CorpusError> {
    let mut bytes = Vec::new();
    let mut source = source;
    source.read_to_end(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| CorpusError::Encoding {
        offset: e.utf8_error().valid_up_to(),
    })
}

struct HeaderIndex {
    positions: Vec<usize>,
    width: usize,
}

fn locate_columns(header: &StringRecord, wanted: &[&str]) -> Result<HeaderIndex, CorpusError> {
    let names: Vec<&str> = header
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let h = h.trim();
            if i == 0 {
                h.trim_start_matches('\u{feff}')
            } else {
                h
            }
        })
        .collect();
    let mut positions = Vec::with_capacity(wanted.len());
    let mut missing = Vec::new();
    for want in wanted {
        match names.iter().position(|n| n == want) {
            Some(p) => positions.push(p),
            None => missing.push(want.to_string()),
        }
    }
    if missing.is_empty() {
        Ok(HeaderIndex {
            positions,
            width: names.len(),
        })
    } else {
        Err(CorpusError::Schema { missing })
    }
}

enum CountError {
    Negative,
    Invalid,
}

fn parse_count(cell: &str) -> Result<Option<u64>, CountError> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    if let Ok(v) = cell.parse::<i64>() {
        return if v < 0 {
            Err(CountError::Negative)
        } else {
            Ok(Some(v as u64))
        };
    }
    // Spreadsheet exports sometimes write whole counts as "12.0".
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 => {
            if v < 0.0 {
                Err(CountError::Negative)
            } else if v <= u64::MAX as f64 {
                Ok(Some(v as u64))
            } else {
                Err(CountError::Invalid)
            }
        }
        _ => Err(CountError::Invalid),
    }
}

fn parse_timestamp(cell: &str, format: &str) -> Option<NaiveDateTime> {
    let cell = cell.trim();
    let dt = NaiveDateTime::parse_from_str(cell, format)
        .ok()
        .or_else(|| {
            NaiveDate::parse_from_str(cell, format)
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
        })?;
    dt.with_second(0).and_then(|d| d.with_nanosecond(0))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn non_empty(s: String) -> Option<String> {
    if s.trim().is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Parses the seven-column tweet CSV.
///
/// Returns the accepted records in file order and one issue per rejected row,
/// so `records.len() + issues.len()` equals the number of logical data rows.
/// Blank lines are not rows.
pub fn parse_tweet_csv(
    source: impl Read,
    config: &CorpusConfig,
) -> Result<(Vec<TweetRecord>, Vec<IngestIssue>), CorpusError> {
    let text = decode(source)?;
    let mut rdr = reader(&text);
    let mut raw = ByteRecord::new();
    if !rdr.read_byte_record(&mut raw)? {
        return Err(CorpusError::Schema {
            missing: TWEET_COLUMNS.iter().map(|c| c.to_string()).collect(),
        });
    }
    let header = StringRecord::from_byte_record(raw.clone()).expect("input was validated as UTF-8");
    let index = locate_columns(&header, &TWEET_COLUMNS)?;

    let mut records = Vec::new();
    let mut issues = Vec::new();
    while rdr.read_byte_record(&mut raw)? {
        let line = raw.position().map_or(0, |p| p.line());
        let row =
            StringRecord::from_byte_record(raw.clone()).expect("input was validated as UTF-8");
        match tweet_from_row(&row, &index, config, line) {
            Ok(rec) => records.push(rec),
            Err(issue) => issues.push(issue),
        }
    }
    Ok((records, issues))
}

fn tweet_from_row(
    row: &StringRecord,
    index: &HeaderIndex,
    config: &CorpusConfig,
    line: u64,
) -> Result<TweetRecord, IngestIssue> {
    if row.len() != index.width {
        return Err(IngestIssue::new(
            line,
            IssueKind::MalformedRow,
            format!("expected {} fields, found {}", index.width, row.len()),
        ));
    }
    let cell = |i: usize| &row[index.positions[i]];
    let repair = |s: &str| {
        if config.strip_artifacts {
            strip_encoding_artifact(s)
        } else {
            s.to_string()
        }
    };

    let date_time = parse_timestamp(cell(0), &config.timestamp_format).ok_or_else(|| {
        IngestIssue::new(
            line,
            IssueKind::BadTimestamp,
            format!(
                "cannot parse {:?} with format {:?}",
                cell(0),
                config.timestamp_format
            ),
        )
    })?;

    let mut counts = [0u64; 2];
    for (slot, (col, name)) in counts
        .iter_mut()
        .zip([(4, "retweet_count"), (5, "favourite_count")])
    {
        *slot = match parse_count(cell(col)) {
            Ok(Some(v)) => v,
            Ok(None) => {
                return Err(IngestIssue::new(
                    line,
                    IssueKind::MalformedRow,
                    format!("{name} is blank"),
                ))
            }
            Err(CountError::Negative) => {
                return Err(IngestIssue::new(
                    line,
                    IssueKind::NegativeCount,
                    format!("{name} is negative: {:?}", cell(col)),
                ))
            }
            Err(CountError::Invalid) => {
                return Err(IngestIssue::new(
                    line,
                    IssueKind::MalformedRow,
                    format!("{name} is not an integer: {:?}", cell(col)),
                ))
            }
        };
    }

    let text = repair(cell(1));
    if text.trim().is_empty() {
        return Err(IngestIssue::new(
            line,
            IssueKind::EmptyText,
            "text is empty",
        ));
    }

    Ok(TweetRecord {
        date_time,
        text,
        username: repair(cell(2)),
        user_location: non_empty(repair(cell(3))),
        retweet_count: counts[0],
        favourite_count: counts[1],
        place_raw: non_empty(cell(6).to_string()),
    })
}

/// Writes records in the canonical seven-column layout. The output re-parses
/// to the same records under the same config.
pub fn write_tweet_csv<W: Write>(
    records: &[TweetRecord],
    config: &CorpusConfig,
    sink: W,
) -> Result<(), CorpusError> {
    let mut wtr = WriterBuilder::new().from_writer(sink);
    wtr.write_record(TWEET_COLUMNS)?;
    for r in records {
        wtr.write_record([
            r.date_time
                .format(&config.timestamp_format)
                .to_string()
                .as_str(),
            &r.text,
            &r.username,
            r.user_location.as_deref().unwrap_or(""),
            &r.retweet_count.to_string(),
            &r.favourite_count.to_string(),
            r.place_raw.as_deref().unwrap_or(""),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `line_number,kind,detail` rows.
pub fn write_issues_csv<W: Write>(issues: &[IngestIssue], sink: W) -> Result<(), CorpusError> {
    let mut wtr = WriterBuilder::new().from_writer(sink);
    wtr.write_record(["line_number", "kind", "detail"])?;
    for i in issues {
        wtr.write_record([
            i.line_number.to_string().as_str(),
            i.kind.as_str(),
            &i.detail,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn parse_epi_date(cell: &str) -> Option<NaiveDate> {
    let cell = cell.trim();
    NaiveDate::parse_from_str(cell, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(cell, "%Y%m%d"))
        .ok()
}

/// Parses a state-level epidemiological history CSV. Columns not named in
/// `mapping` are ignored; blank numeric cells become `None`.
pub fn parse_epi_csv(
    source: impl Read,
    mapping: &ColumnMapping,
) -> Result<(Vec<EpiRecord>, Vec<IngestIssue>), CorpusError> {
    let wanted = [
        mapping.date.as_str(),
        mapping.state.as_str(),
        mapping.positive.as_str(),
        mapping.hospitalized.as_str(),
        mapping.death.as_str(),
        mapping.recovered.as_str(),
    ];
    let text = decode(source)?;
    let mut rdr = reader(&text);
    let mut raw = ByteRecord::new();
    if !rdr.read_byte_record(&mut raw)? {
        return Err(CorpusError::Schema {
            missing: wanted.iter().map(|c| c.to_string()).collect(),
        });
    }
    let header = StringRecord::from_byte_record(raw.clone()).expect("input was validated as UTF-8");
    let index = locate_columns(&header, &wanted)?;

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    let mut issues = Vec::new();
    while rdr.read_byte_record(&mut raw)? {
        let line = raw.position().map_or(0, |p| p.line());
        let row =
            StringRecord::from_byte_record(raw.clone()).expect("input was validated as UTF-8");
        match epi_from_row(&row, &index, &wanted, line) {
            Ok(rec) => {
                if seen.insert((rec.date, rec.state.clone())) {
                    records.push(rec);
                } else {
                    issues.push(IngestIssue::new(
                        line,
                        IssueKind::DuplicateKey,
                        format!("duplicate (date, state) = ({}, {})", rec.date, rec.state),
                    ));
                }
            }
            Err(issue) => issues.push(issue),
        }
    }
    Ok((records, issues))
}

fn epi_from_row(
    row: &StringRecord,
    index: &HeaderIndex,
    names: &[&str; 6],
    line: u64,
) -> Result<EpiRecord, IngestIssue> {
    if row.len() != index.width {
        return Err(IngestIssue::new(
            line,
            IssueKind::MalformedRow,
            format!("expected {} fields, found {}", index.width, row.len()),
        ));
    }
    let cell = |i: usize| &row[index.positions[i]];

    let date = parse_epi_date(cell(0)).ok_or_else(|| {
        IngestIssue::new(
            line,
            IssueKind::BadTimestamp,
            format!("cannot parse date {:?}", cell(0)),
        )
    })?;
    let state = cell(1).trim().to_ascii_uppercase();
    if state.len() != 2 || !state.bytes().all(|b| b.is_ascii_uppercase()) {
        return Err(IngestIssue::new(
            line,
            IssueKind::MalformedRow,
            format!("state {:?} is not a 2-letter code", cell(1)),
        ));
    }

    let mut values = [None; 4];
    for (k, slot) in values.iter_mut().enumerate() {
        let col = k + 2;
        *slot = match parse_count(cell(col)) {
            Ok(v) => v,
            Err(CountError::Negative) => {
                return Err(IngestIssue::new(
                    line,
                    IssueKind::NegativeCount,
                    format!("{} is negative: {:?}", names[col], cell(col)),
                ))
            }
            Err(CountError::Invalid) => {
                return Err(IngestIssue::new(
                    line,
                    IssueKind::MalformedRow,
                    format!("{} is not an integer: {:?}", names[col], cell(col)),
                ))
            }
        };
    }
    let [positive_cum, hospitalized_cum, death_cum, recovered_cum] = values;
    Ok(EpiRecord {
        date,
        state,
        positive_cum,
        hospitalized_cum,
        death_cum,
        recovered_cum,
    })
}
