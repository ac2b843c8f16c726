//! Keyword slicing of the tweet corpus and the epidemiological time-series
//! side of the analysis: daily differencing, lagged correlation, hotspot
//! ranking and a level-only exponential smoothing forecast.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{Days, NaiveDate};
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{EpiRecord, TweetRecord};
use crate::placeparse::parse_place;
use crate::textprep::tokenize;

/// Row label for tweets whose state could not be resolved.
pub const UNRESOLVED: &str = "UNRESOLVED";

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("query window is inverted: since {since} is after until {until}")]
    InvertedWindow { since: NaiveDate, until: NaiveDate },
    #[error("language {0:?} is not a 2-letter code")]
    BadLanguage(String),
    #[error("series dates must be strictly increasing; {0} is out of order or repeated")]
    UnorderedDates(NaiveDate),
    #[error("forecast needs at least {min} points, series has {got}")]
    TooShort { min: usize, got: usize },
    #[error("smoothing factor {0} is outside (0, 1]")]
    BadAlpha(f64),
    #[error("forecast horizon must be at least 1 day")]
    ZeroHorizon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordQuery {
    pub search_words: String,
    pub exclude_retweets: bool,
    pub since: NaiveDate,
    pub until: NaiveDate,
    /// Recorded for provenance. Tweet records carry no language, so this does
    /// not filter anything.
    pub language: Option<String>,
}

impl KeywordQuery {
    pub fn new(
        search_words: impl Into<String>,
        since: NaiveDate,
        until: NaiveDate,
    ) -> Result<Self, AnalyticsError> {
        if since > until {
            return Err(AnalyticsError::InvertedWindow { since, until });
        }
        Ok(Self {
            search_words: search_words.into(),
            exclude_retweets: false,
            since,
            until,
            language: None,
        })
    }

    /// A query with no date restriction.
    pub fn unbounded(search_words: impl Into<String>) -> Self {
        Self::new(search_words, NaiveDate::MIN, NaiveDate::MAX).expect("MIN <= MAX")
    }

    pub fn excluding_retweets(mut self, exclude: bool) -> Self {
        self.exclude_retweets = exclude;
        self
    }

    pub fn with_language(mut self, lang: &str) -> Result<Self, AnalyticsError> {
        if lang.len() != 2 || !lang.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(AnalyticsError::BadLanguage(lang.to_string()));
        }
        self.language = Some(lang.to_ascii_lowercase());
        Ok(self)
    }

    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.search_words)
    }

    fn admits(&self, tweet: &TweetRecord, tokens: &HashSet<String>, wanted: &[String]) -> bool {
        let day = tweet.date();
        day >= self.since
            && day <= self.until
            && !(self.exclude_retweets && tweet.is_retweet())
            && wanted.iter().all(|w| tokens.contains(w))
    }
}

/// Tweets whose tokens include every query token, inside the date window and,
/// optionally, not retweets. Corpus order is kept.
pub fn keyword_filter(tweets: &[TweetRecord], query: &KeywordQuery) -> Vec<TweetRecord> {
    let wanted = query.tokens();
    tweets
        .iter()
        .filter(|t| {
            let tokens: HashSet<String> = tokenize(&t.text).into_iter().collect();
            query.admits(t, &tokens, &wanted)
        })
        .cloned()
        .collect()
}

/// Token sets computed once per tweet, for running many queries over the same
/// corpus.
pub struct TweetIndex<'a> {
    tweets: &'a [TweetRecord],
    tokens: Vec<HashSet<String>>,
}

impl<'a> TweetIndex<'a> {
    pub fn new(tweets: &'a [TweetRecord]) -> Self {
        let tokens = tweets
            .par_iter()
            .map(|t| tokenize(&t.text).into_iter().collect())
            .collect();
        Self { tweets, tokens }
    }

    /// Positions of the tweets [`keyword_filter`] would keep.
    pub fn matching(&self, query: &KeywordQuery) -> Vec<usize> {
        let wanted = query.tokens();
        (0..self.tweets.len())
            .filter(|&i| query.admits(&self.tweets[i], &self.tokens[i], &wanted))
            .collect()
    }

    pub fn tweets(&self) -> &'a [TweetRecord] {
        self.tweets
    }
}

/// Dated values with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    label: String,
    points: Vec<(NaiveDate, f64)>,
}

impl TimeSeries {
    pub fn new(
        label: impl Into<String>,
        points: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, AnalyticsError> {
        if let Some(w) = points.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(AnalyticsError::UnorderedDates(w[1].0));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }

    pub fn from_map(label: impl Into<String>, map: BTreeMap<NaiveDate, f64>) -> Self {
        Self {
            label: label.into(),
            points: map.into_iter().collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by(|p| p.0.cmp(&date))
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correction {
    /// Negative day-over-day differences (data corrections) become zero.
    #[default]
    ClampZero,
    KeepNegative,
}

/// First differences of a cumulative series. The first point is kept as is.
pub fn cumulative_to_daily(series: &TimeSeries, correction: Correction) -> TimeSeries {
    let mut prev: Option<f64> = None;
    let points = series
        .points
        .iter()
        .map(|&(d, v)| {
            let diff = match prev {
                None => v,
                Some(p) => v - p,
            };
            prev = Some(v);
            let diff = match correction {
                Correction::ClampZero if diff < 0.0 => 0.0,
                _ => diff,
            };
            (d, diff)
        })
        .collect();
    TimeSeries {
        label: series.label.clone(),
        points,
    }
}

/// Pearson correlation of `a(d)` against `b(d + lag_days)` over the dates
/// where both exist.
///
/// `None` when fewer than three dates align or either side is constant.
pub fn correlate(a: &TimeSeries, b: &TimeSeries, lag_days: i64) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .points
        .iter()
        .filter_map(|&(d, x)| shift(d, lag_days).and_then(|d2| b.get(d2)).map(|y| (x, y)))
        .unzip();
    pearson(&xs, &ys)
}

fn shift(d: NaiveDate, days: i64) -> Option<NaiveDate> {
    if days >= 0 {
        d.checked_add_days(Days::new(days as u64))
    } else {
        d.checked_sub_days(Days::new(days.unsigned_abs()))
    }
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 3 || is_constant(xs) || is_constant(ys) {
        return None;
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    r.is_finite().then(|| r.clamp(-1.0, 1.0))
}

fn is_constant(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] == w[1])
}

/// Level-only exponential smoothing: `L_0 = y_0`,
/// `L_i = alpha * y_i + (1 - alpha) * L_{i-1}`. The final level is repeated
/// for `horizon_days` consecutive days after the last input date.
pub fn forecast(
    series: &TimeSeries,
    horizon_days: usize,
    alpha: f64,
) -> Result<TimeSeries, AnalyticsError> {
    if series.len() < 2 {
        return Err(AnalyticsError::TooShort {
            min: 2,
            got: series.len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(AnalyticsError::BadAlpha(alpha));
    }
    if horizon_days == 0 {
        return Err(AnalyticsError::ZeroHorizon);
    }
    let mut values = series.values();
    let first = values.next().expect("len >= 2");
    let (mut lo, mut hi) = (first, first);
    let mut level = first;
    for y in values {
        lo = lo.min(y);
        hi = hi.max(y);
        if y != level {
            level = alpha * y + (1.0 - alpha) * level;
        }
    }
    // The level is a convex combination of the inputs; keep rounding from
    // pushing it outside their range.
    let level = level.clamp(lo, hi);
    let last = series.points.last().expect("len >= 2").0;
    let points = (1..=horizon_days as u64)
        .map_while(|k| last.checked_add_days(Days::new(k)).map(|d| (d, level)))
        .collect();
    Ok(TimeSeries {
        label: format!("{} forecast", series.label),
        points,
    })
}

/// Epidemiological measure tracked per state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Cases,
    Hospitalizations,
    Deaths,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Cases, Metric::Hospitalizations, Metric::Deaths];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Cases => "cases",
            Metric::Hospitalizations => "hospitalizations",
            Metric::Deaths => "deaths",
        }
    }

    pub fn cumulative(self, r: &EpiRecord) -> Option<u64> {
        match self {
            Metric::Cases => r.positive_cum,
            Metric::Hospitalizations => r.hospitalized_cum,
            Metric::Deaths => r.death_cum,
        }
    }
}

/// Cumulative series per state for one metric, skipping absent cells.
pub fn state_cumulative(epi: &[EpiRecord], metric: Metric) -> BTreeMap<String, TimeSeries> {
    let mut by_state: BTreeMap<String, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    for r in epi {
        if let Some(v) = metric.cumulative(r) {
            by_state
                .entry(r.state.clone())
                .or_default()
                .insert(r.date, v as f64);
        }
    }
    by_state
        .into_iter()
        .map(|(s, m)| {
            let label = format!("{s} {}", metric.as_str());
            (s, TimeSeries::from_map(label, m))
        })
        .collect()
}

/// Daily new values summed over all states.
pub fn national_daily(epi: &[EpiRecord], metric: Metric, correction: Correction) -> TimeSeries {
    let mut total: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    for series in state_cumulative(epi, metric).values() {
        for &(d, v) in cumulative_to_daily(series, correction).points() {
            *total.entry(d).or_default() += v;
        }
    }
    TimeSeries::from_map(metric.as_str(), total)
}

/// Tweets per calendar day, with zero-count days filled in between the first
/// and last tweet.
pub fn daily_tweet_counts<'a>(
    tweets: impl IntoIterator<Item = &'a TweetRecord>,
    label: &str,
) -> TimeSeries {
    let mut counts: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    for t in tweets {
        *counts.entry(t.date()).or_default() += 1.0;
    }
    if let (Some(&first), Some(&last)) = (counts.keys().next(), counts.keys().next_back()) {
        for d in first.iter_days().take_while(|d| *d <= last) {
            counts.entry(d).or_insert(0.0);
        }
    }
    TimeSeries::from_map(label, counts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HotspotRow {
    pub state: String,
    pub misinformation_tweet_count: u64,
    pub retweet_sum: u64,
    pub peak_daily_cases: u64,
    pub peak_daily_deaths: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HotspotOptions {
    pub correction: Correction,
    /// Fall back to the free-text user location when the place object does
    /// not resolve to a state.
    pub user_location_fallback: bool,
}

/// Ranks states by keyword-matching tweet volume.
///
/// Order: tweet count descending, then retweet sum descending, then state
/// code ascending. Tweets without a resolvable US state are pooled in one
/// [`UNRESOLVED`] row.
pub fn hotspot_rank(
    tweets: &[TweetRecord],
    epi: &[EpiRecord],
    query: &KeywordQuery,
) -> Vec<HotspotRow> {
    hotspot_rank_with(tweets, epi, query, HotspotOptions::default())
}

pub fn hotspot_rank_with(
    tweets: &[TweetRecord],
    epi: &[EpiRecord],
    query: &KeywordQuery,
    options: HotspotOptions,
) -> Vec<HotspotRow> {
    let filtered = keyword_filter(tweets, query);
    rank_filtered(filtered.iter(), epi, options)
}

/// Ranking over an already filtered set of tweets.
pub fn rank_filtered<'a>(
    filtered: impl IntoIterator<Item = &'a TweetRecord>,
    epi: &[EpiRecord],
    options: HotspotOptions,
) -> Vec<HotspotRow> {
    let mut groups: HashMap<String, (u64, u64)> = HashMap::new();
    for t in filtered {
        let key = resolve_state(t, options.user_location_fallback)
            .unwrap_or_else(|| UNRESOLVED.to_string());
        let g = groups.entry(key).or_default();
        g.0 += 1;
        g.1 += t.retweet_count;
    }
    let peak_cases = peak_daily(epi, Metric::Cases, options.correction);
    let peak_deaths = peak_daily(epi, Metric::Deaths, options.correction);
    let mut rows: Vec<HotspotRow> = groups
        .into_iter()
        .map(|(state, (count, retweets))| HotspotRow {
            peak_daily_cases: peak_cases.get(&state).copied().unwrap_or(0),
            peak_daily_deaths: peak_deaths.get(&state).copied().unwrap_or(0),
            state,
            misinformation_tweet_count: count,
            retweet_sum: retweets,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.misinformation_tweet_count
            .cmp(&a.misinformation_tweet_count)
            .then(b.retweet_sum.cmp(&a.retweet_sum))
            .then_with(|| a.state.cmp(&b.state))
    });
    rows
}

fn peak_daily(epi: &[EpiRecord], metric: Metric, correction: Correction) -> HashMap<String, u64> {
    state_cumulative(epi, metric)
        .into_iter()
        .map(|(state, cum)| {
            let peak = cumulative_to_daily(&cum, correction)
                .values()
                .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
                .unwrap_or(0.0)
                .max(0.0);
            (state, peak as u64)
        })
        .collect()
}

const US_STATES: [(&str, &str); 56] = [
    ("AL", "Alabama"),
    ("AK", "Alaska"),
    ("AS", "American Samoa"),
    ("AZ", "Arizona"),
    ("AR", "Arkansas"),
    ("CA", "California"),
    ("CO", "Colorado"),
    ("CT", "Connecticut"),
    ("DE", "Delaware"),
    ("DC", "District of Columbia"),
    ("FL", "Florida"),
    ("GA", "Georgia"),
    ("GU", "Guam"),
    ("HI", "Hawaii"),
    ("ID", "Idaho"),
    ("IL", "Illinois"),
    ("IN", "Indiana"),
    ("IA", "Iowa"),
    ("KS", "Kansas"),
    ("KY", "Kentucky"),
    ("LA", "Louisiana"),
    ("ME", "Maine"),
    ("MD", "Maryland"),
    ("MA", "Massachusetts"),
    ("MI", "Michigan"),
    ("MN", "Minnesota"),
    ("MS", "Mississippi"),
    ("MO", "Missouri"),
    ("MT", "Montana"),
    ("NE", "Nebraska"),
    ("NV", "Nevada"),
    ("NH", "New Hampshire"),
    ("NJ", "New Jersey"),
    ("NM", "New Mexico"),
    ("NY", "New York"),
    ("NC", "North Carolina"),
    ("ND", "North Dakota"),
    ("MP", "Northern Mariana Islands"),
    ("OH", "Ohio"),
    ("OK", "Oklahoma"),
    ("OR", "Oregon"),
    ("PA", "Pennsylvania"),
    ("PR", "Puerto Rico"),
    ("RI", "Rhode Island"),
    ("SC", "South Carolina"),
    ("SD", "South Dakota"),
    ("TN", "Tennessee"),
    ("TX", "Texas"),
    ("UT", "Utah"),
    ("VT", "Vermont"),
    ("VI", "Virgin Islands"),
    ("VA", "Virginia"),
    ("WA", "Washington"),
    ("WV", "West Virginia"),
    ("WI", "Wisconsin"),
    ("WY", "Wyoming"),
];

/// Maps a US state code or name to its 2-letter code.
pub fn us_state_code(s: &str) -> Option<&'static str> {
    let s = s.trim();
    US_STATES
        .iter()
        .find(|(code, name)| *code == s || name.eq_ignore_ascii_case(s))
        .map(|(code, _)| *code)
}

fn is_us_country(s: &str) -> bool {
    matches!(
        s.trim().to_ascii_lowercase().as_str(),
        "usa" | "us" | "united states" | "united states of america"
    )
}

fn resolve_pair(city: Option<&str>, state: Option<&str>) -> Option<String> {
    let state = state?;
    if let Some(code) = us_state_code(state) {
        return Some(code.to_string());
    }
    // Admin-level places read "Arizona, USA".
    if is_us_country(state) {
        return city.and_then(us_state_code).map(str::to_string);
    }
    None
}

/// The US state a tweet is attributed to, from its place object and
/// optionally its user location.
pub fn resolve_state(tweet: &TweetRecord, user_location_fallback: bool) -> Option<String> {
    let from_place = parse_place(tweet.place_raw.as_deref()).and_then(|p| {
        if p.country_code.as_deref().is_some_and(|c| c != "US") {
            return None;
        }
        resolve_pair(p.city.as_deref(), p.state.as_deref())
    });
    if from_place.is_some() || !user_location_fallback {
        return from_place;
    }
    let loc = tweet.user_location.as_deref()?;
    match loc.rsplit_once(',') {
        Some((c, s)) => resolve_pair(Some(c), Some(s)),
        None => resolve_pair(None, Some(loc)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, m, day).unwrap()
    }

    fn series(vals: &[f64]) -> TimeSeries {
        TimeSeries::new(
            "s",
            vals.iter()
                .enumerate()
                .map(|(i, &v)| (d(11, 1) + Days::new(i as u64), v))
                .collect(),
        )
        .unwrap()
    }

    fn tweet(day: u32, text: &str, retweets: u64, place: Option<&str>) -> TweetRecord {
        TweetRecord {
            date_time: d(11, day).and_hms_opt(10, 0, 0).unwrap(),
            text: text.into(),
            username: "u".into(),
            user_location: None,
            retweet_count: retweets,
            favourite_count: 0,
            place_raw: place.map(str::to_string),
        }
    }

    fn place(full_name: &str) -> String {
        format!(r#"{{"place_type": "city", "full_name": "{full_name}", "country_code": "US"}}"#)
    }

    #[test]
    fn series_rejects_unordered_dates() {
        assert_eq!(
            TimeSeries::new("x", vec![(d(11, 2), 1.0), (d(11, 2), 2.0)]),
            Err(AnalyticsError::UnorderedDates(d(11, 2)))
        );
        assert!(TimeSeries::new("x", vec![(d(11, 3), 1.0), (d(11, 2), 2.0)]).is_err());
    }

    #[test]
    fn daily_differences() {
        let daily = cumulative_to_daily(&series(&[5.0, 7.0, 7.0, 10.0]), Correction::ClampZero);
        assert_eq!(daily.values().collect::<Vec<_>>(), vec![5.0, 2.0, 0.0, 3.0]);
        let clamp = cumulative_to_daily(&series(&[5.0, 4.0]), Correction::ClampZero);
        assert_eq!(clamp.values().collect::<Vec<_>>(), vec![5.0, 0.0]);
        let keep = cumulative_to_daily(&series(&[5.0, 4.0]), Correction::KeepNegative);
        assert_eq!(keep.values().collect::<Vec<_>>(), vec![5.0, -1.0]);
        assert!(cumulative_to_daily(&series(&[]), Correction::ClampZero).is_empty());
        assert_eq!(
            daily.points().iter().map(|p| p.0).collect::<Vec<_>>(),
            series(&[0.0; 4])
                .points()
                .iter()
                .map(|p| p.0)
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn correlation_closed_forms() {
        let a = series(&[1.0, 3.0, 2.0, 5.0]);
        let neg = series(&[-1.0, -3.0, -2.0, -5.0]);
        assert!((correlate(&a, &a, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((correlate(&a, &neg, 0).unwrap() + 1.0).abs() < 1e-12);
        let b = series(&[2.0, 4.0, 6.0]);
        let c = series(&[1.0, 2.0, 3.0]);
        assert!((correlate(&c, &b, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_undefined_cases() {
        let a = series(&[1.0, 2.0]);
        assert_eq!(correlate(&a, &a, 0), None);
        let flat = series(&[0.1, 0.1, 0.1, 0.1]);
        let b = series(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(correlate(&flat, &b, 0), None);
        assert_eq!(correlate(&b, &b, 10), None);
    }

    #[test]
    fn correlation_lag_alignment() {
        // b is a shifted one day later than a.
        let a = series(&[1.0, 5.0, 2.0, 8.0, 3.0]);
        let b = TimeSeries::new(
            "b",
            a.points()
                .iter()
                .map(|&(dt, v)| (dt + Days::new(1), v))
                .collect(),
        )
        .unwrap();
        assert!((correlate(&a, &b, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(correlate(&a, &b, 0).unwrap() < 1.0);
        assert!((correlate(&b, &a, -1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forecast_examples() {
        let f = forecast(&series(&[3.5, 3.5, 3.5]), 2, 0.3).unwrap();
        assert_eq!(f.values().collect::<Vec<_>>(), vec![3.5, 3.5]);
        assert_eq!(f.points()[0].0, d(11, 4));
        assert_eq!(f.points()[1].0, d(11, 5));
        let f = forecast(&series(&[1.0, 5.0]), 1, 1.0).unwrap();
        assert_eq!(f.values().collect::<Vec<_>>(), vec![5.0]);
        let f = forecast(&series(&[0.0, 4.0]), 1, 0.5).unwrap();
        assert_eq!(f.values().collect::<Vec<_>>(), vec![2.0]);
    }

    #[test]
    fn forecast_errors() {
        assert_eq!(
            forecast(&series(&[1.0]), 1, 0.5),
            Err(AnalyticsError::TooShort { min: 2, got: 1 })
        );
        assert_eq!(
            forecast(&series(&[1.0, 2.0]), 1, 0.0),
            Err(AnalyticsError::BadAlpha(0.0))
        );
        assert!(forecast(&series(&[1.0, 2.0]), 1, 1.5).is_err());
        assert_eq!(
            forecast(&series(&[1.0, 2.0]), 0, 0.5),
            Err(AnalyticsError::ZeroHorizon)
        );
    }

    #[test]
    fn keyword_filter_examples() {
        let tweets = vec![
            tweet(1, "It is a hoax", 0, None),
            tweet(1, "stay safe", 0, None),
            tweet(2, "masks work", 0, None),
        ];
        let q = KeywordQuery::unbounded("hoax");
        assert_eq!(keyword_filter(&tweets, &q), vec![tweets[0].clone()]);

        let q = KeywordQuery::new("hoax", d(12, 25), d(12, 25)).unwrap();
        assert!(keyword_filter(&tweets, &q).is_empty());

        let t = vec![tweet(1, "COVID19 hoax!", 0, None)];
        assert!(keyword_filter(&t, &KeywordQuery::unbounded("covid hoax")).is_empty());
        let t = vec![tweet(1, "COVID-19 is a HOAX!", 0, None)];
        assert_eq!(
            keyword_filter(&t, &KeywordQuery::unbounded("COVID-19 hoax")).len(),
            1
        );
    }

    #[test]
    fn keyword_filter_window_and_retweets() {
        let tweets = vec![
            tweet(1, "hoax one", 0, None),
            tweet(2, "RT @someone: hoax two", 0, None),
            tweet(3, "hoax three", 0, None),
        ];
        let q = KeywordQuery::new("hoax", d(11, 1), d(11, 2))
            .unwrap()
            .excluding_retweets(true);
        let kept = keyword_filter(&tweets, &q);
        assert_eq!(kept, vec![tweets[0].clone()]);
        let idx = TweetIndex::new(&tweets);
        assert_eq!(idx.matching(&q), vec![0]);
        assert!(KeywordQuery::new("x", d(11, 2), d(11, 1)).is_err());
    }

    #[test]
    fn hotspot_all_unresolved() {
        let tweets = vec![tweet(1, "hoax", 3, None), tweet(2, "hoax", 4, None)];
        let rows = hotspot_rank(&tweets, &[], &KeywordQuery::unbounded("hoax"));
        assert_eq!(
            rows,
            vec![HotspotRow {
                state: UNRESOLVED.into(),
                misinformation_tweet_count: 2,
                retweet_sum: 7,
                peak_daily_cases: 0,
                peak_daily_deaths: 0,
            }]
        );
    }

    #[test]
    fn hotspot_ordering_and_peaks() {
        let az = place("Phoenix, AZ");
        let va = place("Richmond, VA");
        let tweets = vec![
            tweet(1, "hoax", 1, Some(&va)),
            tweet(1, "hoax", 0, Some(&az)),
            tweet(2, "hoax", 0, Some(&az)),
        ];
        let epi = vec![
            EpiRecord {
                date: d(11, 1),
                state: "AZ".into(),
                positive_cum: Some(100),
                hospitalized_cum: None,
                death_cum: Some(5),
                recovered_cum: None,
            },
            EpiRecord {
                date: d(11, 2),
                state: "AZ".into(),
                positive_cum: Some(400),
                hospitalized_cum: None,
                death_cum: Some(6),
                recovered_cum: None,
            },
        ];
        let rows = hotspot_rank(&tweets, &epi, &KeywordQuery::unbounded("hoax"));
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].state, "AZ");
        assert_eq!(rows[0].misinformation_tweet_count, 2);
        assert_eq!(rows[0].peak_daily_cases, 300);
        assert_eq!(rows[0].peak_daily_deaths, 5);
        assert_eq!(rows[1].state, "VA");
        assert_eq!(rows[1].peak_daily_cases, 0);
    }

    #[test]
    fn hotspot_tie_breaks() {
        let tx = place("Austin, TX");
        let ca = place("Fresno, CA");
        let ny = place("Albany, NY");
        let tweets = vec![
            tweet(1, "hoax", 1, Some(&tx)),
            tweet(1, "hoax", 9, Some(&ca)),
            tweet(1, "hoax", 1, Some(&ny)),
        ];
        let rows = hotspot_rank(&tweets, &[], &KeywordQuery::unbounded("hoax"));
        let order: Vec<_> = rows.iter().map(|r| r.state.as_str()).collect();
        assert_eq!(order, vec!["CA", "NY", "TX"]);
    }

    #[test]
    fn state_resolution() {
        let t = tweet(
            1,
            "x",
            0,
            Some(r#"{"full_name": "Arizona, USA", "country_code": "US"}"#),
        );
        assert_eq!(resolve_state(&t, false).as_deref(), Some("AZ"));
        let t = tweet(
            1,
            "x",
            0,
            Some(r#"{"full_name": "Vancouver, BC", "country_code": "CA"}"#),
        );
        assert_eq!(resolve_state(&t, false), None);
        let mut t = tweet(1, "x", 0, None);
        t.user_location = Some("Mexico, MO".into());
        assert_eq!(resolve_state(&t, false), None);
        assert_eq!(resolve_state(&t, true).as_deref(), Some("MO"));
        t.user_location = Some("Tweets are personal".into());
        assert_eq!(resolve_state(&t, true), None);
    }

    #[test]
    fn national_series_and_tweet_counts() {
        let rec = |day, state: &str, pos| EpiRecord {
            date: d(11, day),
            state: state.into(),
            positive_cum: Some(pos),
            hospitalized_cum: None,
            death_cum: None,
            recovered_cum: None,
        };
        let epi = vec![
            rec(1, "AZ", 10),
            rec(2, "AZ", 15),
            rec(1, "VA", 1),
            rec(2, "VA", 3),
        ];
        let nat = national_daily(&epi, Metric::Cases, Correction::ClampZero);
        assert_eq!(nat.values().collect::<Vec<_>>(), vec![11.0, 7.0]);
        assert!(national_daily(&epi, Metric::Deaths, Correction::ClampZero).is_empty());

        let tweets = vec![
            tweet(1, "a", 0, None),
            tweet(1, "b", 0, None),
            tweet(4, "c", 0, None),
        ];
        let counts = daily_tweet_counts(&tweets, "t");
        assert_eq!(
            counts.values().collect::<Vec<_>>(),
            vec![2.0, 0.0, 0.0, 1.0]
        );
    }
}
