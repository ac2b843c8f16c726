//! Lexicon polarity scoring and per-keyword percentage reports.

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use log::warn;
use rayon::prelude::*;
use regex::Regex;
use thiserror::Error;

use crate::corpus::TweetRecord;
use crate::textprep::{clean_for_sentiment, tokenize};

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon_en.tsv");

static SINGLE_TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\w+$").unwrap());

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: expected `term<TAB>polarity`")]
    Malformed { line: usize },
    #[error("line {line}: term {term:?} is not a single word token")]
    BadTerm { line: usize, term: String },
    #[error("line {line}: polarity {value:?} is not a number in [-1, 1]")]
    BadPolarity { line: usize, value: String },
}

/// Term to polarity map. Keys are lowercase single tokens as produced by
/// [`tokenize`]; values lie in `[-1, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON)
            .expect("bundled lexicon is well formed")
            .0
    }

    /// Parses `term<TAB>polarity` lines. Blank lines and `#` comments are
    /// skipped. A repeated term overrides the earlier entry; each override is
    /// returned as a warning message.
    pub fn parse(text: &str) -> Result<(Self, Vec<String>), LexiconError> {
        let mut entries = HashMap::new();
        let mut warnings = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (term, value) = raw
                .split_once('\t')
                .ok_or(LexiconError::Malformed { line })?;
            let term = term.trim().to_lowercase();
            if !SINGLE_TOKEN.is_match(&term) {
                return Err(LexiconError::BadTerm { line, term });
            }
            let polarity =
                parse_polarity(value.trim()).ok_or_else(|| LexiconError::BadPolarity {
                    line,
                    value: value.trim().to_string(),
                })?;
            if entries.insert(term.clone(), polarity).is_some() {
                let msg = format!("line {line}: duplicate term {term:?}, later entry wins");
                warn!("{msg}");
                warnings.push(msg);
            }
        }
        Ok((Self { entries }, warnings))
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: AsRef<str>,
    {
        let mut map = HashMap::new();
        for (idx, (term, polarity)) in entries.into_iter().enumerate() {
            let term = term.as_ref().to_lowercase();
            if !SINGLE_TOKEN.is_match(&term) {
                return Err(LexiconError::BadTerm {
                    line: idx + 1,
                    term,
                });
            }
            if !(-1.0..=1.0).contains(&polarity) {
                return Err(LexiconError::BadPolarity {
                    line: idx + 1,
                    value: polarity.to_string(),
                });
            }
            map.insert(term, polarity);
        }
        Ok(Self { entries: map })
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplies every polarity by `factor`, clamping into `[-1, 1]`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), (v * factor).clamp(-1.0, 1.0)))
                .collect(),
        }
    }
}

fn parse_polarity(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && (-1.0..=1.0).contains(&v)).then_some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Lexicon terms found in `text`, in token order, with their polarities.
pub fn matched_terms(text: &str, lexicon: &Lexicon) -> Vec<(String, f64)> {
    tokenize(text)
        .into_iter()
        .filter_map(|t| lexicon.get(&t).map(|p| (t, p)))
        .collect()
}

/// Mean polarity of the tokens of `text` that appear in `lexicon`, or `0.0`
/// when none do.
///
/// Matched polarities are summed in ascending order, so the result does not
/// depend on word order in the text.
pub fn score(text: &str, lexicon: &Lexicon) -> f64 {
    let mut matched: Vec<f64> = tokenize(text)
        .iter()
        .filter_map(|t| lexicon.get(t))
        .collect();
    if matched.is_empty() {
        return 0.0;
    }
    matched.sort_by(f64::total_cmp);
    let sum: f64 = matched.iter().sum();
    (sum / matched.len() as f64).clamp(-1.0, 1.0)
}

/// Sign of the polarity; exactly zero is neutral.
pub fn classify(polarity: f64) -> SentimentLabel {
    if polarity > 0.0 {
        SentimentLabel::Positive
    } else if polarity < 0.0 {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

/// Cleans, scores and classifies a raw tweet body.
pub fn label_text(raw: &str, lexicon: &Lexicon) -> SentimentLabel {
    classify(score(&clean_for_sentiment(raw), lexicon))
}

/// How the neutral share is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeutralFormula {
    /// `100 * (total - positive - negative) / total`; shares sum to 100.
    #[default]
    Complement,
    /// `100 * (total - positive + negative) / total`, a legacy formula kept
    /// only for comparing with older reports. The shares do not sum to 100
    /// when there are negatives.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentReport {
    pub keyword: String,
    pub total: u64,
    pub n_positive: u64,
    pub n_negative: u64,
    pub n_neutral: u64,
    pub pct_positive: f64,
    pub pct_negative: f64,
    pub pct_neutral: f64,
}

/// Per-label counts. Merging is exact integer addition, so any split of the
/// corpus gives the same totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCounts {
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: SentimentLabel) {
        match label {
            SentimentLabel::Positive => self.positive += 1,
            SentimentLabel::Negative => self.negative += 1,
            SentimentLabel::Neutral => self.neutral += 1,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            positive: self.positive + other.positive,
            negative: self.negative + other.negative,
            neutral: self.neutral + other.neutral,
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative + self.neutral
    }
}

impl FromIterator<SentimentLabel> for LabelCounts {
    fn from_iter<T: IntoIterator<Item = SentimentLabel>>(iter: T) -> Self {
        let mut c = Self::default();
        for l in iter {
            c.add(l);
        }
        c
    }
}

impl SentimentReport {
    pub fn from_counts(keyword: &str, counts: LabelCounts, formula: NeutralFormula) -> Self {
        let total = counts.total();
        let pct = |n: f64| {
            if total == 0 {
                0.0
            } else {
                100.0 * n / total as f64
            }
        };
        let neutral_numerator = match formula {
            NeutralFormula::Complement => (total - counts.positive - counts.negative) as f64,
            NeutralFormula::AsPrinted => {
                total as f64 - counts.positive as f64 + counts.negative as f64
            }
        };
        Self {
            keyword: keyword.to_string(),
            total,
            n_positive: counts.positive,
            n_negative: counts.negative,
            n_neutral: counts.neutral,
            pct_positive: pct(counts.positive as f64),
            pct_negative: pct(counts.negative as f64),
            pct_neutral: pct(neutral_numerator),
        }
    }
}

/// Classifies every tweet and returns the label shares for `keyword`.
pub fn report(tweets: &[TweetRecord], keyword: &str, lexicon: &Lexicon) -> SentimentReport {
    report_with(tweets, keyword, lexicon, NeutralFormula::Complement)
}

pub fn report_with(
    tweets: &[TweetRecord],
    keyword: &str,
    lexicon: &Lexicon,
    formula: NeutralFormula,
) -> SentimentReport {
    let counts = tweets
        .par_iter()
        .fold(LabelCounts::default, |mut acc, t| {
            acc.add(label_text(&t.text, lexicon));
            acc
        })
        .reduce(LabelCounts::default, LabelCounts::merge);
    SentimentReport::from_counts(keyword, counts, formula)
}

/// The first `n` tweets, in corpus order, whose label equals `label`.
pub fn top_examples<'a>(
    tweets: &'a [TweetRecord],
    label: SentimentLabel,
    n: usize,
    lexicon: &Lexicon,
) -> Vec<&'a TweetRecord> {
    tweets
        .iter()
        .filter(|t| label_text(&t.text, lexicon) == label)
        .take(n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn lex(entries: &[(&str, f64)]) -> Lexicon {
        Lexicon::from_entries(entries.iter().copied()).unwrap()
    }

    fn tweet(text: &str) -> TweetRecord {
        TweetRecord {
            date_time: NaiveDate::from_ymd_opt(2020, 12, 1)
                .unwrap()
                .and_hms_opt(12, 0, 0)
                .unwrap(),
            text: text.into(),
            username: "u".into(),
            user_location: None,
            retweet_count: 0,
            favourite_count: 0,
            place_raw: None,
        }
    }

    #[test]
    fn score_examples() {
        assert_eq!(
            score(
                "great wonderful",
                &lex(&[("great", 1.0), ("wonderful", 1.0)])
            ),
            1.0
        );
        assert_eq!(score("xyzzy", &Lexicon::bundled()), 0.0);
        assert_eq!(
            score("good bad", &lex(&[("good", 0.5), ("bad", -0.5)])),
            0.0
        );
        assert_eq!(score("Good GOOD meh", &lex(&[("good", 0.5)])), 0.5);
    }

    #[test]
    fn classify_thresholds() {
        assert_eq!(classify(0.5), SentimentLabel::Positive);
        assert_eq!(classify(0.0), SentimentLabel::Neutral);
        assert_eq!(classify(-0.0), SentimentLabel::Neutral);
        assert_eq!(classify(-0.01), SentimentLabel::Negative);
    }

    #[test]
    fn report_arithmetic() {
        let lx = lex(&[("good", 1.0), ("bad", -1.0)]);
        let mut corpus = Vec::new();
        corpus.extend((0..3).map(|_| tweet("good")));
        corpus.extend((0..2).map(|_| tweet("bad")));
        corpus.extend((0..5).map(|_| tweet("meh")));
        let r = report(&corpus, "k", &lx);
        assert_eq!(
            (r.n_positive, r.n_negative, r.n_neutral, r.total),
            (3, 2, 5, 10)
        );
        assert_eq!(
            (r.pct_positive, r.pct_negative, r.pct_neutral),
            (30.0, 20.0, 50.0)
        );

        let printed = report_with(&corpus, "k", &lx, NeutralFormula::AsPrinted);
        assert_eq!(printed.pct_neutral, 90.0);
    }

    #[test]
    fn report_empty_and_all_neutral() {
        let r = report(&[], "k", &Lexicon::bundled());
        assert_eq!(r.total, 0);
        assert_eq!(
            (r.pct_positive, r.pct_negative, r.pct_neutral),
            (0.0, 0.0, 0.0)
        );

        let corpus: Vec<_> = ["qwerty", "zxcv asdf", "@good http://good"]
            .iter()
            .map(|t| tweet(t))
            .collect();
        let r = report(&corpus, "k", &lex(&[("good", 1.0)]));
        assert_eq!(
            (r.pct_positive, r.pct_negative, r.pct_neutral),
            (0.0, 0.0, 100.0)
        );
    }

    #[test]
    fn top_examples_order_and_truncation() {
        let lx = lex(&[("good", 1.0), ("bad", -1.0)]);
        let corpus: Vec<_> = ["good 1", "meh", "good 2", "bad", "good 3"]
            .iter()
            .map(|t| tweet(t))
            .collect();
        let pos = top_examples(&corpus, SentimentLabel::Positive, 5, &lx);
        let texts: Vec<_> = pos.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["good 1", "good 2", "good 3"]);
        let first = top_examples(&corpus, SentimentLabel::Positive, 1, &lx);
        assert_eq!(first[0].text, "good 1");
        let neutral_only: Vec<_> = ["meh", "nah"].iter().map(|t| tweet(t)).collect();
        assert!(top_examples(&neutral_only, SentimentLabel::Negative, 3, &lx).is_empty());
    }

    #[test]
    fn lexicon_file_parsing() {
        let (lx, warnings) =
            Lexicon::parse("# header\nGood\t0.5\n\nbad\t-0.75\ngood\t0.25\n").unwrap();
        assert_eq!(lx.len(), 2);
        assert_eq!(lx.get("good"), Some(0.25));
        assert_eq!(warnings.len(), 1);
        assert_eq!(
            Lexicon::parse("good 0.5\n").unwrap_err(),
            LexiconError::Malformed { line: 1 }
        );
        assert!(matches!(
            Lexicon::parse("good\t1.5\n"),
            Err(LexiconError::BadPolarity { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::parse("fake news\t-0.5\n"),
            Err(LexiconError::BadTerm { line: 1, .. })
        ));
    }

    #[test]
    fn bundled_lexicon_loads() {
        let lx = Lexicon::bundled();
        assert!(lx.len() > 150);
        assert!(lx.get("great").unwrap() > 0.0);
        assert!(lx.get("hoax").unwrap() < 0.0);
        assert_eq!(lx.get("covid"), None);
    }
}
