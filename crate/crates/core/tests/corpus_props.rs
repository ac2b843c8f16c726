use chrono::NaiveDate;
use csv::WriterBuilder;
use misinfo_core::corpus::{
    parse_epi_csv, parse_tweet_csv, strip_encoding_artifact, write_tweet_csv, ColumnMapping,
    CorpusConfig, TweetRecord, TWEET_COLUMNS,
};
use proptest::prelude::*;

fn field_text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z ,.!?#@']{0,30}",
        "b'[a-z ,]{0,10}'",
        "\"[a-z]{1,5}\"[,\n ]{0,3}[a-z]{0,5}",
        "[\\PC\n]{0,20}",
    ]
}

fn parsed_record() -> impl Strategy<Value = TweetRecord> {
    (
        (2000i32..2030, 1u32..=12, 1u32..=28, 0u32..24, 0u32..60),
        field_text(),
        field_text(),
        proptest::option::of(field_text()),
        0u64..1_000_000,
        0u64..1_000_000,
        proptest::option::of("\\{\"full_name\": \"[A-Za-z]{1,8}, [A-Z]{2}\"\\}"),
    )
        .prop_filter_map(
            "text must survive repair",
            |((y, mo, d, h, mi), text, user, loc, rt, fav, place)| {
                let text = strip_encoding_artifact(&text);
                if text.trim().is_empty() {
                    return None;
                }
                Some(TweetRecord {
                    date_time: NaiveDate::from_ymd_opt(y, mo, d)?.and_hms_opt(h, mi, 0)?,
                    text,
                    username: strip_encoding_artifact(&user),
                    user_location: loc
                        .map(|l| strip_encoding_artifact(&l))
                        .filter(|l| !l.trim().is_empty()),
                    retweet_count: rt,
                    favourite_count: fav,
                    place_raw: place,
                })
            },
        )
}

/// A data row that may or may not be valid.
fn any_row() -> impl Strategy<Value = Vec<String>> {
    (
        prop_oneof![
            Just("12/2/2020 23:51".to_string()),
            Just("1/15/2021 0:05".to_string()),
            Just("yesterday".to_string()),
        ],
        prop_oneof![field_text(), Just(String::new()), Just("b''".to_string())],
        prop_oneof![
            Just("0".to_string()),
            Just("17".to_string()),
            Just("-1".to_string()),
            Just("x".to_string()),
            Just(String::new()),
        ],
        0usize..9,
    )
        .prop_map(|(date, text, count, width)| {
            let mut row = vec![
                date,
                text,
                "user".into(),
                "loc".into(),
                count,
                "3".into(),
                String::new(),
            ];
            row.resize(width.max(1), "pad".into());
            row
        })
}

fn render(rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(TWEET_COLUMNS).unwrap();
    for r in rows {
        w.write_record(r).unwrap();
    }
    w.into_inner().unwrap()
}

proptest! {
    #[test]
    fn round_trip(records in prop::collection::vec(parsed_record(), 0..20)) {
        let cfg = CorpusConfig::default();
        let mut buf = Vec::new();
        write_tweet_csv(&records, &cfg, &mut buf).unwrap();
        let (back, issues) = parse_tweet_csv(&buf[..], &cfg).unwrap();
        prop_assert!(issues.is_empty(), "{:?}", issues);
        prop_assert_eq!(back, records);
    }

    #[test]
    fn conservation_and_determinism(rows in prop::collection::vec(any_row(), 0..30)) {
        let src = render(&rows);
        let cfg = CorpusConfig::default();
        let (recs, issues) = parse_tweet_csv(&src[..], &cfg).unwrap();
        prop_assert_eq!(recs.len() + issues.len(), rows.len());
        let again = parse_tweet_csv(&src[..], &cfg).unwrap();
        prop_assert_eq!(&again.0, &recs);
        prop_assert_eq!(&again.1, &issues);
        // Issue lines are increasing and point inside the file.
        let lines = src.iter().filter(|&&b| b == b'\n').count() as u64;
        prop_assert!(issues.windows(2).all(|w| w[0].line_number < w[1].line_number));
        prop_assert!(issues.iter().all(|i| i.line_number >= 2 && i.line_number <= lines));
    }

    #[test]
    fn epi_conservation(rows in prop::collection::vec(
        (0u32..5, prop::sample::select(vec!["VA", "AZ", "Virginia"]), prop::sample::select(vec!["", "5", "-3", "4.0", "n/a"])),
        0..40,
    )) {
        let mut text = String::from("date,state,positive,hospitalizedCumulative,death,recovered\n");
        for (day, state, val) in &rows {
            text.push_str(&format!("2020-11-{:02},{state},{val},,{val},\n", day + 1));
        }
        let (recs, issues) = parse_epi_csv(text.as_bytes(), &ColumnMapping::default()).unwrap();
        prop_assert_eq!(recs.len() + issues.len(), rows.len());
        let mut keys: Vec<_> = recs.iter().map(|r| (r.date, r.state.clone())).collect();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), recs.len());
    }

    #[test]
    fn strip_is_idempotent(s in prop_oneof!["\\PC{0,12}", "[a-z]'(b'){0,3}[a-z ]{0,6}'{0,4}"]) {
        let once = strip_encoding_artifact(&s);
        prop_assert_eq!(strip_encoding_artifact(&once), once);
    }
}
