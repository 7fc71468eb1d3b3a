use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::period::TimePeriod;
use crate::preprocess::{filter_vocabulary, FilterConfig, ProcessedDocument, WordCounts};

/// Which token representation a table is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Surface,
    #[default]
    Lemma,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Surface => "surface",
            Level::Lemma => "lemma",
        }
    }

    pub(crate) fn stream(self, doc: &ProcessedDocument) -> &[String] {
        match self {
            Level::Surface => &doc.surfaces,
            Level::Lemma => &doc.lemmas,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "surface" => Ok(Level::Surface),
            "lemma" => Ok(Level::Lemma),
            other => Err(Error::param(format!("unknown level `{other}` (surface|lemma)"))),
        }
    }
}

/// Filtered per-period word frequencies.
///
/// `token_total` is the number of in-vocabulary tokens, so normalized
/// frequencies sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub period: TimePeriod,
    pub level: Level,
    pub entries: WordCounts,
    pub token_total: u64,
}

impl Vocabulary {
    pub fn new(period: TimePeriod, level: Level, entries: WordCounts) -> Self {
        let token_total = entries.values().sum();
        Vocabulary {
            period,
            level,
            entries,
            token_total,
        }
    }

    pub fn empty(period: TimePeriod, level: Level) -> Self {
        Self::new(period, level, WordCounts::new())
    }

    /// Counts the level's tokens over `docs` and applies the threshold rule
    /// with N = `raw_token_count`.
    pub fn from_documents(
        period: TimePeriod,
        level: Level,
        docs: &[ProcessedDocument],
        raw_token_count: u64,
        filter: &FilterConfig,
    ) -> Self {
        let counts = count_tokens(docs, level);
        Self::new(period, level, filter_vocabulary(&counts, raw_token_count, filter))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.entries.get(word).copied().unwrap_or(0)
    }

    pub fn relative_frequency(&self, word: &str) -> f64 {
        if self.token_total == 0 {
            0.0
        } else {
            self.frequency(word) as f64 / self.token_total as f64
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Entries by descending frequency, ties lexicographic.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.entries.iter().map(|(w, &f)| (w.as_str(), f)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Entry-wise sum; the result spans both periods.
    pub fn merged(&self, other: &Vocabulary) -> Vocabulary {
        let mut entries = self.entries.clone();
        for (w, f) in &other.entries {
            *entries.entry(w.clone()).or_insert(0) += f;
        }
        Vocabulary {
            period: self.period.span(&other.period),
            level: self.level,
            entries,
            token_total: self.token_total + other.token_total,
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("#period={} #tokens={}\n", self.period, self.token_total);
        for (w, f) in self.ranked() {
            out.push_str(w);
            out.push('\t');
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse_tsv(content: &str, level: Level, origin: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let (period, token_total) = parse_header(lines.next().unwrap_or(""), origin)?;
        let mut entries = WordCounts::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (w, f) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::format(origin, format!("bad vocabulary line `{line}`")))?;
            let f = f
                .parse()
                .map_err(|_| Error::format(origin, format!("bad frequency in `{line}`")))?;
            entries.insert(w.to_string(), f);
        }
        Ok(Vocabulary {
            period,
            level,
            entries,
            token_total,
        })
    }
}

pub(crate) fn count_tokens(docs: &[ProcessedDocument], level: Level) -> WordCounts {
    let mut counts = WordCounts::new();
    for doc in docs {
        for w in level.stream(doc) {
            match counts.get_mut(w) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(w.clone(), 1);
                }
            }
        }
    }
    counts
}

/// Parses `#period=START-END #tokens=T`.
pub(crate) fn parse_header(line: &str, origin: &Path) -> Result<(TimePeriod, u64)> {
    let bad = || Error::format(origin, format!("bad header `{line}`"));
    let mut period = None;
    let mut tokens = None;
    for field in line.split_whitespace() {
        if let Some(p) = field.strip_prefix("#period=") {
            period = Some(p.parse::<TimePeriod>().map_err(|_| bad())?);
        } else if let Some(t) = field.strip_prefix("#tokens=") {
            tokens = Some(t.parse::<u64>().map_err(|_| bad())?);
        }
    }
    Ok((period.ok_or_else(bad)?, tokens.ok_or_else(bad)?))
}
