use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;

use misinfo_core::analytics::{
    correlate as pearson_at_lag, daily_tweet_counts, forecast as smooth_forecast, national_daily,
    rank_filtered, HotspotOptions, Metric, TimeSeries, TweetIndex,
};
use misinfo_core::corpus::{
    parse_epi_csv, parse_tweet_csv, write_issues_csv, write_tweet_csv, ColumnMapping, CorpusConfig,
    CorpusError, EpiRecord, IngestIssue, TweetRecord,
};
use misinfo_core::sentiment::{
    label_text, LabelCounts, Lexicon, NeutralFormula, SentimentLabel, SentimentReport,
};
use misinfo_core::textprep::{clean_corpus_text, CleanConfig, StopwordList};

use crate::svg::{LineChart, Trace};
use crate::table::{fmt_num, slug, write_file, Table};
use crate::{check_readable, CliError, PlotArgs, RunConfig};

fn corpus_error(path: &Path, e: CorpusError) -> CliError {
    match e {
        CorpusError::Io(io) => CliError::Input(format!("{}: {io}", path.display())),
        other => CliError::Schema(format!("{}: {other}", path.display())),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn corpus_config(cfg: &RunConfig) -> CorpusConfig {
    CorpusConfig {
        timestamp_format: cfg.args.timestamp_format.clone(),
        strip_artifacts: !cfg.args.no_strip_artifacts,
    }
}

fn read_tweets(
    cfg: &RunConfig,
    path: &Path,
) -> Result<(Vec<TweetRecord>, Vec<IngestIssue>), CliError> {
    parse_tweet_csv(open(path)?, &corpus_config(cfg)).map_err(|e| corpus_error(path, e))
}

fn read_epi(path: &Path) -> Result<(Vec<EpiRecord>, Vec<IngestIssue>), CliError> {
    parse_epi_csv(open(path)?, &ColumnMapping::default()).map_err(|e| corpus_error(path, e))
}

fn warn_skipped(err: &mut dyn Write, path: &Path, issues: &[IngestIssue]) {
    if !issues.is_empty() {
        let _ = writeln!(
            err,
            "warning: {}: skipped {} row(s); run `ingest` for details",
            path.display(),
            issues.len()
        );
    }
}

fn load_tweets(cfg: &RunConfig, err: &mut dyn Write) -> Result<Vec<TweetRecord>, CliError> {
    let path = cfg.require_tweets()?;
    let (tweets, issues) = read_tweets(cfg, path)?;
    warn_skipped(err, path, &issues);
    Ok(tweets)
}

fn load_epi(path: &Path, err: &mut dyn Write) -> Result<Vec<EpiRecord>, CliError> {
    let (epi, issues) = read_epi(path)?;
    warn_skipped(err, path, &issues);
    Ok(epi)
}

fn load_lexicon(cfg: &RunConfig, err: &mut dyn Write) -> Result<Lexicon, CliError> {
    let Some(path) = &cfg.args.lexicon else {
        return Ok(Lexicon::bundled());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let (lexicon, warnings) =
        Lexicon::parse(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    for w in warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    if lexicon.is_empty() {
        return Err(CliError::Schema(format!(
            "{}: lexicon has no entries",
            path.display()
        )));
    }
    Ok(lexicon)
}

fn load_stopwords(cfg: &RunConfig) -> Result<StopwordList, CliError> {
    let Some(path) = &cfg.args.stopwords else {
        return Ok(StopwordList::english());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    StopwordList::parse(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn write_series(dir: &Path, stem: &str, series: &TimeSeries) -> Result<(), CliError> {
    let mut t = Table::new(["date", "value"]);
    for &(d, v) in series.points() {
        t.push(vec![d.to_string(), fmt_num(v)]);
    }
    write_file(
        &dir.join("series").join(format!("{stem}.csv")),
        &t.to_csv()?,
    )
}

/// `ingest`: validate inputs and write canonical copies plus issue files.
pub fn ingest(cfg: &RunConfig, out: &mut dyn Write, _err: &mut dyn Write) -> Result<(), CliError> {
    let path = cfg.require_tweets()?;
    let (tweets, issues) = read_tweets(cfg, path)?;
    let epi = match &cfg.args.epi {
        Some(p) => Some(read_epi(p)?),
        None => None,
    };
    let stopwords = load_stopwords(cfg)?;

    let dir = cfg.out_dir();
    let corpus_cfg = corpus_config(cfg);
    let mut buf = Vec::new();
    write_tweet_csv(&tweets, &corpus_cfg, &mut buf).map_err(CliError::output)?;
    write_file(&dir.join("tweets.csv"), &buf)?;
    let mut buf = Vec::new();
    write_issues_csv(&issues, &mut buf).map_err(CliError::output)?;
    write_file(&dir.join("issues.csv"), &buf)?;

    let clean_cfg = CleanConfig::with_stopwords(stopwords);
    let cleaned: Vec<String> = tweets
        .par_iter()
        .map(|t| clean_corpus_text(&t.text, &clean_cfg))
        .collect();
    let mut t = Table::new(["record", "date_time", "clean_text"]);
    for (i, (tw, c)) in tweets.iter().zip(cleaned).enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            tw.date_time.format("%Y-%m-%d %H:%M").to_string(),
            c,
        ]);
    }
    t.write(dir, "cleaned_text", crate::Format::Csv)?;

    let _ = writeln!(
        out,
        "{}, {}",
        plural(tweets.len(), "record"),
        plural(issues.len(), "issue")
    );

    if let Some((records, epi_issues)) = epi {
        let mut t = Table::new([
            "date",
            "state",
            "positive",
            "hospitalizedCumulative",
            "death",
            "recovered",
        ]);
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &records {
            t.push(vec![
                r.date.to_string(),
                r.state.clone(),
                opt(r.positive_cum),
                opt(r.hospitalized_cum),
                opt(r.death_cum),
                opt(r.recovered_cum),
            ]);
        }
        t.write(dir, "epi", crate::Format::Csv)?;
        let mut buf = Vec::new();
        write_issues_csv(&epi_issues, &mut buf).map_err(CliError::output)?;
        write_file(&dir.join("epi_issues.csv"), &buf)?;
        let _ = writeln!(
            out,
            "epi: {}, {}",
            plural(records.len(), "record"),
            plural(epi_issues.len(), "issue")
        );
    }
    Ok(())
}

struct KeywordSentiment {
    report: SentimentReport,
    positive: Vec<usize>,
    negative: Vec<usize>,
}

/// `sentiment`: one report row per keyword plus the first example tweets of
/// each polarity.
pub fn sentiment(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let tweets = load_tweets(cfg, err)?;
    let lexicon = load_lexicon(cfg, err)?;
    let formula = if cfg.args.printed_neutral_formula {
        NeutralFormula::AsPrinted
    } else {
        NeutralFormula::Complement
    };

    let labels: Vec<SentimentLabel> = tweets
        .par_iter()
        .map(|t| label_text(&t.text, &lexicon))
        .collect();
    let index = TweetIndex::new(&tweets);
    let n_examples = cfg.args.examples;

    let results: Vec<KeywordSentiment> = cfg
        .keywords
        .par_iter()
        .map(|kw| {
            let hits = index.matching(&cfg.query(kw));
            let counts: LabelCounts = hits.iter().map(|&i| labels[i]).collect();
            let pick = |want| {
                hits.iter()
                    .copied()
                    .filter(|&i| labels[i] == want)
                    .take(n_examples)
                    .collect()
            };
            KeywordSentiment {
                report: SentimentReport::from_counts(kw, counts, formula),
                positive: pick(SentimentLabel::Positive),
                negative: pick(SentimentLabel::Negative),
            }
        })
        .collect();

    let mut reports = Table::new([
        "keyword",
        "total",
        "n_positive",
        "n_negative",
        "n_neutral",
        "pct_positive",
        "pct_negative",
        "pct_neutral",
    ]);
    let mut examples = Table::new(["keyword", "label", "rank", "text"]);
    for r in &results {
        let rep = &r.report;
        reports.push(vec![
            rep.keyword.clone(),
            rep.total.to_string(),
            rep.n_positive.to_string(),
            rep.n_negative.to_string(),
            rep.n_neutral.to_string(),
            fmt_num(rep.pct_positive),
            fmt_num(rep.pct_negative),
            fmt_num(rep.pct_neutral),
        ]);
        for (label, idxs) in [("positive", &r.positive), ("negative", &r.negative)] {
            for (rank, &i) in idxs.iter().enumerate() {
                examples.push(vec![
                    rep.keyword.clone(),
                    label.to_string(),
                    (rank + 1).to_string(),
                    tweets[i].text.clone(),
                ]);
            }
        }
        let _ = writeln!(
            out,
            "{}: {}, {}% positive, {}% negative, {}% neutral",
            rep.keyword,
            plural(rep.total as usize, "tweet"),
            fmt_num(rep.pct_positive),
            fmt_num(rep.pct_negative),
            fmt_num(rep.pct_neutral)
        );
    }
    reports.write(cfg.out_dir(), "sentiment_report", cfg.args.format)?;
    examples.write(cfg.out_dir(), "sentiment_examples", cfg.args.format)?;
    Ok(())
}

fn windowed(epi: Vec<EpiRecord>, since: NaiveDate, until: NaiveDate) -> Vec<EpiRecord> {
    epi.into_iter()
        .filter(|r| r.date >= since && r.date <= until)
        .collect()
}

/// `correlate`: Pearson coefficient of daily keyword volume against each
/// national daily metric at every lag in the window.
pub fn correlate(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let tweets = load_tweets(cfg, err)?;
    let epi = load_epi(cfg.require_epi()?, err)?;
    let correction = cfg.args.correction.into();
    let metrics: Vec<(Metric, TimeSeries)> = Metric::ALL
        .iter()
        .map(|&m| (m, national_daily(&epi, m, correction)))
        .collect();

    let index = TweetIndex::new(&tweets);
    let volume: Vec<(String, TimeSeries)> = cfg
        .keywords
        .iter()
        .map(|kw| {
            let hits = index.matching(&cfg.query(kw));
            let series = daily_tweet_counts(hits.iter().map(|&i| &tweets[i]), kw);
            (kw.clone(), series)
        })
        .collect();

    let w = cfg.args.lag_window as i64;
    let lags: Vec<i64> = (-w..=w).collect();
    let mut headers = vec!["keyword".to_string(), "metric".to_string()];
    headers.extend(lags.iter().map(|l| format!("lag_{l}")));
    let mut table = Table::new(headers);
    let mut defined = 0usize;
    for (kw, vol) in &volume {
        for (metric, series) in &metrics {
            let mut row = vec![kw.clone(), metric.as_str().to_string()];
            for &lag in &lags {
                match pearson_at_lag(vol, series, lag) {
                    Some(r) => {
                        defined += 1;
                        row.push(fmt_num(r));
                    }
                    None => row.push(String::new()),
                }
            }
            table.push(row);
        }
    }
    if defined == 0 {
        let _ = writeln!(
            err,
            "warning: no lag produced a defined correlation (too few overlapping dates or constant series)"
        );
    }
    let dir = cfg.out_dir();
    table.write(dir, "correlation", cfg.args.format)?;

    // Wide table of every series on the union of their dates.
    let mut columns: Vec<(String, &TimeSeries)> = volume
        .iter()
        .map(|(kw, s)| (format!("tweets_{}", slug(kw)), s))
        .collect();
    columns.extend(metrics.iter().map(|(m, s)| (m.as_str().to_string(), s)));
    let mut dates: Vec<NaiveDate> = columns
        .iter()
        .flat_map(|(_, s)| s.points().iter().map(|p| p.0))
        .collect();
    dates.sort();
    dates.dedup();
    let mut headers = vec!["date".to_string()];
    headers.extend(columns.iter().map(|(n, _)| n.clone()));
    let mut aligned = Table::new(headers);
    for d in dates {
        let mut row = vec![d.to_string()];
        row.extend(
            columns
                .iter()
                .map(|(_, s)| s.get(d).map(fmt_num).unwrap_or_default()),
        );
        aligned.push(row);
    }
    aligned.write(dir, "aligned_series", crate::Format::Csv)?;
    for (name, s) in &columns {
        write_series(dir, name, s)?;
    }
    let _ = writeln!(
        out,
        "{} keyword(s) x {} metrics x {} lags, {} defined",
        volume.len(),
        metrics.len(),
        lags.len(),
        defined
    );
    Ok(())
}

/// `hotspots`: per-keyword state ranking.
pub fn hotspots(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let tweets = load_tweets(cfg, err)?;
    let epi = match &cfg.args.epi {
        Some(p) => load_epi(p, err)?,
        None => Vec::new(),
    };
    let options = HotspotOptions {
        correction: cfg.args.correction.into(),
        user_location_fallback: cfg.args.user_location_fallback,
    };
    let index = TweetIndex::new(&tweets);
    let mut table = Table::new([
        "keyword",
        "rank",
        "state",
        "misinformation_tweet_count",
        "retweet_sum",
        "peak_daily_cases",
        "peak_daily_deaths",
    ]);
    for kw in &cfg.keywords {
        let hits = index.matching(&cfg.query(kw));
        let rows = rank_filtered(hits.iter().map(|&i| &tweets[i]), &epi, options);
        let _ = writeln!(
            out,
            "{kw}: {} across {}",
            plural(hits.len(), "tweet"),
            plural(rows.len(), "group")
        );
        for (rank, r) in rows.into_iter().enumerate() {
            table.push(vec![
                kw.clone(),
                (rank + 1).to_string(),
                r.state,
                r.misinformation_tweet_count.to_string(),
                r.retweet_sum.to_string(),
                r.peak_daily_cases.to_string(),
                r.peak_daily_deaths.to_string(),
            ]);
        }
    }
    table.write(cfg.out_dir(), "hotspots", cfg.args.format)?;
    Ok(())
}

/// `forecast`: smoothing forecast of national daily cases and deaths.
pub fn forecast(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let epi = windowed(load_epi(cfg.require_epi()?, err)?, cfg.since, cfg.until);
    let correction = cfg.args.correction.into();
    let dir = cfg.out_dir();
    let mut table = Table::new(["metric", "date", "value"]);
    for metric in [Metric::Cases, Metric::Deaths] {
        let history = national_daily(&epi, metric, correction);
        match smooth_forecast(&history, cfg.args.horizon, cfg.args.alpha) {
            Ok(f) => {
                for &(d, v) in f.points() {
                    table.push(vec![metric.as_str().to_string(), d.to_string(), fmt_num(v)]);
                }
                write_series(dir, metric.as_str(), &history)?;
                write_series(dir, &format!("forecast_{}", metric.as_str()), &f)?;
                let level = f.points().first().map_or(0.0, |p| p.1);
                let _ = writeln!(
                    out,
                    "{}: level {} for {} day(s)",
                    metric.as_str(),
                    fmt_num(level),
                    f.len()
                );
            }
            Err(e) => {
                let _ = writeln!(err, "warning: {}: {e}", metric.as_str());
            }
        }
    }
    table.write(dir, "forecast", cfg.args.format)?;
    Ok(())
}

fn read_series_csv(path: &Path) -> Result<Vec<(NaiveDate, f64)>, CliError> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let bad = |msg: String| CliError::Schema(format!("{}: {msg}", path.display()));
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    if headers.len() < 2 || &headers[0] != "date" {
        return Err(bad("expected a `date,value` header".into()));
    }
    let mut points = BTreeMap::new();
    for row in rdr.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let date = NaiveDate::parse_from_str(row.get(0).unwrap_or(""), "%Y-%m-%d")
            .map_err(|e| bad(format!("bad date {:?}: {e}", row.get(0).unwrap_or(""))))?;
        let cell = row.get(1).unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        let v: f64 = cell
            .parse()
            .map_err(|_| bad(format!("bad value {cell:?}")))?;
        points.insert(date, v);
    }
    Ok(points.into_iter().collect())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into())
}

/// `plot`: one SVG line chart per series CSV, plus a combined national chart
/// when the cases/hospitalizations/deaths series are among the inputs.
pub fn plot(args: &PlotArgs, out: &mut dyn Write, _err: &mut dyn Write) -> Result<(), CliError> {
    let paths: Vec<PathBuf> = if args.series.is_empty() {
        let dir = args.out.join("series");
        let entries = std::fs::read_dir(&dir)
            .map_err(|e| CliError::Input(format!("series directory {}: {e}", dir.display())))?;
        let mut v: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        v.sort();
        v
    } else {
        for p in &args.series {
            check_readable(p)?;
        }
        args.series.clone()
    };

    let mut loaded = Vec::with_capacity(paths.len());
    for p in &paths {
        loaded.push((stem(p), read_series_csv(p)?));
    }
    let charts = args.out.join("charts");
    for (name, points) in &loaded {
        let chart = LineChart {
            title: name.clone(),
            y_label: "value".into(),
            traces: vec![Trace {
                label: name.clone(),
                points: points.clone(),
            }],
        };
        write_file(
            &charts.join(format!("{name}.svg")),
            chart.render().as_bytes(),
        )?;
    }
    let national: Vec<Trace> = Metric::ALL
        .iter()
        .filter_map(|m| {
            loaded
                .iter()
                .find(|(n, _)| n == m.as_str())
                .map(|(n, p)| Trace {
                    label: n.clone(),
                    points: p.clone(),
                })
        })
        .collect();
    let mut written = loaded.len();
    if !national.is_empty() {
        let chart = LineChart {
            title: "National daily cases, hospitalizations and deaths".into(),
            y_label: "daily count".into(),
            traces: national,
        };
        write_file(&charts.join("national.svg"), chart.render().as_bytes())?;
        written += 1;
    }
    let _ = writeln!(
        out,
        "{} written to {}",
        plural(written, "chart"),
        charts.display()
    );
    Ok(())
}
