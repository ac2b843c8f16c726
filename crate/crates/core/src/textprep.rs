//! Tweet text cleaning and tokenization.
//!
//! Two cleaners exist. [`clean_corpus_text`] is the aggressive one used for
//! corpus exploration: it lowercases, strips links, mentions, hashtags,
//! digits, markup, stopwords and punctuation. [`clean_for_sentiment`] is the
//! light one used before lexicon scoring; it keeps hashtag bodies, digits and
//! letter case.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

static URL_SPAN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"http\S*").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#\w+").unwrap());
static DIGITS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").unwrap());
// `.` does not cross newlines, so a tag span is bounded by its line.
static ANGLE_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<.*>").unwrap());
static NON_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\W+").unwrap());

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StopwordError {
    #[error("line {line}: stopword {word:?} contains whitespace")]
    Whitespace { line: usize, word: String },
}

/// A set of lowercase, whitespace-free words removed by [`clean_corpus_text`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl StopwordList {
    /// The bundled 179-word English list.
    pub fn english() -> Self {
        Self::parse(BUNDLED_STOPWORDS).expect("bundled stopword list is well formed")
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses a stopword file: one word per line, `#` comment lines and blank
    /// lines ignored. Entries are lowercased.
    pub fn parse(text: &str) -> Result<Self, StopwordError> {
        let mut words = BTreeSet::new();
        for (idx, line) in text.lines().enumerate() {
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            if word.chars().any(char::is_whitespace) {
                return Err(StopwordError::Whitespace {
                    line: idx + 1,
                    word: word.to_string(),
                });
            }
            words.insert(word.to_lowercase());
        }
        Ok(Self { words })
    }

    /// Builds a list from words, lowercasing each. Words containing whitespace
    /// are rejected.
    pub fn from_words<I, S>(words: I) -> Result<Self, StopwordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for (idx, w) in words.into_iter().enumerate() {
            let w = w.as_ref();
            if w.is_empty() {
                continue;
            }
            if w.chars().any(char::is_whitespace) {
                return Err(StopwordError::Whitespace {
                    line: idx + 1,
                    word: w.to_string(),
                });
            }
            set.insert(w.to_lowercase());
        }
        Ok(Self { words: set })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

/// Per-stage switches for [`clean_corpus_text`], in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageToggles {
    pub lowercase: bool,
    pub urls: bool,
    pub mentions: bool,
    pub hashtags: bool,
    pub digits: bool,
    pub angle_tags: bool,
    pub stopwords: bool,
    pub punctuation: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            lowercase: true,
            urls: true,
            mentions: true,
            hashtags: true,
            digits: true,
            angle_tags: true,
            stopwords: true,
            punctuation: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanConfig {
    pub stopwords: StopwordList,
    pub stages: StageToggles,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            stopwords: StopwordList::english(),
            stages: StageToggles::default(),
        }
    }
}

impl CleanConfig {
    pub fn with_stopwords(stopwords: StopwordList) -> Self {
        Self {
            stopwords,
            stages: StageToggles::default(),
        }
    }
}

fn clean_pass(text: &str, config: &CleanConfig) -> String {
    let st = &config.stages;
    let mut s = if st.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    if st.urls {
        s = URL_SPAN.replace_all(&s, " ").into_owned();
    }
    if st.mentions {
        s = MENTION.replace_all(&s, " ").into_owned();
    }
    if st.hashtags {
        s = HASHTAG.replace_all(&s, " ").into_owned();
    }
    if st.digits {
        s = DIGITS.replace_all(&s, " ").into_owned();
    }
    if st.angle_tags {
        s = ANGLE_TAG.replace_all(&s, " ").into_owned();
    }
    if st.stopwords {
        s = s
            .split_whitespace()
            .filter(|w| !config.stopwords.contains(w))
            .collect::<Vec<_>>()
            .join(" ");
    }
    if st.punctuation {
        s.retain(|c| !c.is_ascii_punctuation());
        s = s.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    s
}

/// Aggressive corpus cleaner.
///
/// Stages run in a fixed order: lowercase, URL spans, `@mentions`,
/// `#hashtags`, digit runs, `<...>` spans, stopwords, then punctuation removal
/// with whitespace collapsing. Deleting punctuation can splice new tokens
/// together (`"i.s"` becomes `"is"`), so the pipeline is re-run until the text
/// stops changing. Every pass either leaves the text alone or removes at
/// least one non-whitespace character, which bounds the loop.
pub fn clean_corpus_text(text: &str, config: &CleanConfig) -> String {
    let mut current = clean_pass(text, config);
    for _ in 0..=current.chars().count() {
        let next = clean_pass(&current, config);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Light cleaner applied before sentiment scoring.
///
/// Drops `@mentions` and URL spans, turns every character that is not a
/// letter, digit or whitespace into a separator, then re-joins the words with
/// single spaces.
pub fn clean_for_sentiment(text: &str) -> String {
    let s = MENTION.replace_all(text, " ");
    let s = URL_SPAN.replace_all(&s, " ");
    let s: String = s
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect();
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercases `text` and splits it on runs of non-word characters. Empty
/// tokens at the string boundaries are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    NON_WORD
        .split(&lowered)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stop(words: &[&str]) -> CleanConfig {
        CleanConfig::with_stopwords(StopwordList::from_words(words.iter().copied()).unwrap())
    }

    #[test]
    fn bundled_list_has_179_lowercase_entries() {
        let list = StopwordList::english();
        assert_eq!(list.len(), 179);
        assert!(list.iter().all(|w| w.to_lowercase() == w));
        assert!(list.contains("is") && list.contains("don't") && list.contains("wouldn't"));
    }

    #[test]
    fn stopword_file_parsing() {
        let list = StopwordList::parse("# comment\nThe\n\n  and \n").unwrap();
        assert_eq!(list.iter().collect::<Vec<_>>(), vec!["and", "the"]);
        assert_eq!(
            StopwordList::parse("ok\nnot ok\n"),
            Err(StopwordError::Whitespace {
                line: 2,
                word: "not ok".into()
            })
        );
    }

    #[test]
    fn corpus_clean_examples() {
        assert_eq!(clean_corpus_text("", &stop(&[])), "");
        assert_eq!(
            clean_corpus_text("COVID19 IS A HOAX", &stop(&["is", "a"])),
            "covid hoax"
        );
        assert_eq!(
            clean_corpus_text(
                "Check https://t.co/abc @user #plandemic 123!",
                &stop(&["is", "a"])
            ),
            "check"
        );
    }

    #[test]
    fn corpus_clean_angle_span_is_greedy_per_line() {
        let cfg = stop(&[]);
        assert_eq!(clean_corpus_text("a <b> c <d> e", &cfg), "a e");
        assert_eq!(clean_corpus_text("a <b\nc> d", &cfg), "a b c d");
    }

    #[test]
    fn punctuation_splice_is_recleaned() {
        let cfg = stop(&["is"]);
        assert_eq!(clean_corpus_text("fake i.s news", &cfg), "fake news");
        assert_eq!(clean_corpus_text("ht.tp x", &cfg), "x");
    }

    #[test]
    fn toggles_disable_stages() {
        let mut cfg = stop(&[]);
        cfg.stages.hashtags = false;
        cfg.stages.punctuation = false;
        assert_eq!(clean_corpus_text("so #fake", &cfg), "so #fake");
        cfg.stages = StageToggles::default();
        cfg.stages.lowercase = false;
        assert_eq!(clean_corpus_text("Hoax", &cfg), "Hoax");
    }

    #[test]
    fn sentiment_clean_examples() {
        assert_eq!(clean_for_sentiment(""), "");
        assert_eq!(
            clean_for_sentiment("@user COVID-19 is a hoax! https://x.co/1"),
            "COVID 19 is a hoax"
        );
        assert_eq!(clean_for_sentiment("plain words"), "plain words");
        assert_eq!(clean_for_sentiment("#Hoax 2020"), "Hoax 2020");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("covid hoax"), vec!["covid", "hoax"]);
        assert_eq!(tokenize("It's a-hoax"), vec!["it", "s", "a", "hoax"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("!!!").is_empty());
        assert_eq!(tokenize("snake_case Word"), vec!["snake_case", "word"]);
    }
}
