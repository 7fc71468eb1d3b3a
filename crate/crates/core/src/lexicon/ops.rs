//! Vocabulary and n-gram creators and the count/frequency/pattern queries.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ngram::{check_order, NgramTable};
use super::vocabulary::{Level, Vocabulary};
use crate::corpus::{Corpus, CorpusNode, DiachronicCorpus};
use crate::error::{Error, Result};
use crate::operation::{Creator, Operation, PerPeriod, PeriodOperation, TimeSeries, ValueKind};
use crate::period::TimePeriod;
use crate::preprocess::{filter_vocabulary, FilterConfig};

/// Builds the lemma and surface vocabularies of each leaf. Without an
/// explicit config the leaf's own filter settings apply.
#[derive(Debug, Clone, Default)]
pub struct CreateVocabulary {
    pub filter: Option<FilterConfig>,
}

impl Creator for CreateVocabulary {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()> {
        let filter = self.filter.clone().unwrap_or_else(|| corpus.filter().clone());
        filter.validate()?;
        let docs = corpus.processed()?;
        let raw = corpus.stats().token_count_raw;
        let period = corpus.period();
        let lemma = Vocabulary::from_documents(period, Level::Lemma, docs, raw, &filter);
        let surface = Vocabulary::from_documents(period, Level::Surface, docs, raw, &filter);
        corpus.artifacts.vocabulary = Some(lemma);
        corpus.artifacts.surface_vocabulary = Some(surface);
        Ok(())
    }
}

/// Builds n-gram tables restricted to the vocabulary of the same level.
#[derive(Debug, Clone)]
pub struct CreateNgrams {
    pub orders: Vec<usize>,
    pub levels: Vec<Level>,
}

impl Default for CreateNgrams {
    fn default() -> Self {
        CreateNgrams {
            orders: vec![1, 2, 3],
            levels: vec![Level::Surface, Level::Lemma],
        }
    }
}

impl Creator for CreateNgrams {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()> {
        for &order in &self.orders {
            check_order(order)?;
        }
        let mut tables = Vec::new();
        for &level in &self.levels {
            let vocab = corpus.vocabulary_at(level)?;
            let docs = corpus.processed()?;
            for &order in &self.orders {
                tables.push(NgramTable::from_documents(
                    corpus.period(),
                    order,
                    level,
                    docs,
                    Some(vocab),
                )?);
            }
        }
        for t in tables {
            corpus.artifacts.ngrams.insert((t.order, t.level), t);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Exists {
    pub word: String,
}

impl PeriodOperation for Exists {
    type Value = bool;
    fn kind(&self) -> ValueKind {
        ValueKind::Boolean
    }
    fn on_period(&self, corpus: &Corpus) -> Result<bool> {
        Ok(corpus.vocabulary()?.contains(&self.word))
    }
}

/// Raw counts, or counts divided by the period's in-vocabulary token total.
#[derive(Debug, Clone)]
pub struct Frequency {
    pub word: String,
    pub normalize: bool,
    pub level: Level,
}

impl Frequency {
    pub fn new(word: impl Into<String>, normalize: bool) -> Self {
        Frequency {
            word: word.into(),
            normalize,
            level: Level::Lemma,
        }
    }
}

impl PeriodOperation for Frequency {
    type Value = f64;
    fn kind(&self) -> ValueKind {
        ValueKind::Frequency
    }
    fn on_period(&self, corpus: &Corpus) -> Result<f64> {
        let v = corpus.vocabulary_at(self.level)?;
        Ok(if self.normalize {
            v.relative_frequency(&self.word)
        } else {
            v.frequency(&self.word) as f64
        })
    }
}

/// Applies an explicit frequency threshold to each period's vocabulary.
#[derive(Debug, Clone)]
pub struct FilterFrequency {
    pub threshold: u64,
}

impl PeriodOperation for FilterFrequency {
    type Value = Vocabulary;
    fn kind(&self) -> ValueKind {
        ValueKind::Set
    }
    fn on_period(&self, corpus: &Corpus) -> Result<Vocabulary> {
        let v = corpus.vocabulary()?;
        let entries = v
            .entries
            .iter()
            .filter(|(_, &f)| f >= self.threshold)
            .map(|(w, &f)| (w.clone(), f))
            .collect();
        Ok(Vocabulary::new(v.period, v.level, entries))
    }
}

/// Re-filters raw counts with a different config; exposed for experiments.
pub fn refilter(vocab: &Vocabulary, raw_tokens: u64, cfg: &FilterConfig) -> Vocabulary {
    Vocabulary::new(vocab.period, vocab.level, filter_vocabulary(&vocab.entries, raw_tokens, cfg))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UniqueWordCount;

impl PeriodOperation for UniqueWordCount {
    type Value = u64;
    fn kind(&self) -> ValueKind {
        ValueKind::Count
    }
    fn on_period(&self, corpus: &Corpus) -> Result<u64> {
        Ok(corpus.vocabulary()?.len() as u64)
    }
}

/// Mean character length over unique words; 0 for an empty vocabulary.
#[derive(Debug, Clone, Copy, Default)]
pub struct AverageWordLength;

pub fn average_word_length(vocab: &Vocabulary) -> f64 {
    if vocab.is_empty() {
        return 0.0;
    }
    let total: usize = vocab.words().map(|w| w.chars().count()).sum();
    total as f64 / vocab.len() as f64
}

impl PeriodOperation for AverageWordLength {
    type Value = f64;
    fn kind(&self) -> ValueKind {
        ValueKind::Ratio
    }
    fn on_period(&self, corpus: &Corpus) -> Result<f64> {
        Ok(average_word_length(corpus.vocabulary()?))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NgramCount {
    pub order: usize,
    pub level: Level,
}

impl PeriodOperation for NgramCount {
    type Value = u64;
    fn kind(&self) -> ValueKind {
        ValueKind::Count
    }
    fn on_period(&self, corpus: &Corpus) -> Result<u64> {
        Ok(corpus.ngrams(self.order, self.level)?.total())
    }
}

/// Entry-wise sum of the vocabularies in range.
#[derive(Debug, Clone, Default)]
pub struct MergeVocabulary {
    pub range: Option<TimePeriod>,
}

impl MergeVocabulary {
    fn merge(leaves: &[&Corpus]) -> Result<Vocabulary> {
        let mut iter = leaves.iter();
        let first = iter.next().ok_or_else(|| Error::param("nothing to merge"))?;
        let mut merged = first.vocabulary()?.clone();
        for leaf in iter {
            merged = merged.merged(leaf.vocabulary()?);
        }
        Ok(merged)
    }
}

impl Operation for MergeVocabulary {
    type Output = Vocabulary;
    fn on_corpus(&self, corpus: &Corpus) -> Result<Vocabulary> {
        Self::merge(&CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Vocabulary> {
        Self::merge(&corpus.leaves_in(self.range)?)
    }
}

/// Words present in every period in range.
#[derive(Debug, Clone, Default)]
pub struct CommonWords {
    pub range: Option<TimePeriod>,
}

impl CommonWords {
    fn intersect(leaves: &[&Corpus]) -> Result<BTreeSet<String>> {
        let mut iter = leaves.iter();
        let first = iter.next().ok_or_else(|| Error::param("empty range"))?;
        let mut common: BTreeSet<String> = first.vocabulary()?.entries.keys().cloned().collect();
        for leaf in iter {
            let v = leaf.vocabulary()?;
            common.retain(|w| v.contains(w));
        }
        Ok(common)
    }
}

impl Operation for CommonWords {
    type Output = BTreeSet<String>;
    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        Self::intersect(&CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        Self::intersect(&corpus.leaves_in(self.range)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Prefix,
    Suffix,
    Substring,
}

impl std::str::FromStr for MatchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(MatchKind::Prefix),
            "suffix" => Ok(MatchKind::Suffix),
            "substring" | "morpheme" => Ok(MatchKind::Substring),
            other => Err(Error::param(format!(
                "unknown match kind `{other}` (prefix|suffix|substring)"
            ))),
        }
    }
}

/// Words of each period that start with, end with or contain a pattern.
#[derive(Debug, Clone)]
pub struct WordsMatching {
    pub kind: MatchKind,
    pub pattern: String,
}

impl WordsMatching {
    pub fn matches(&self, word: &str) -> bool {
        match self.kind {
            MatchKind::Prefix => word.starts_with(&self.pattern),
            MatchKind::Suffix => word.ends_with(&self.pattern),
            MatchKind::Substring => word.contains(&self.pattern),
        }
    }
}

fn check_pattern(pattern: &str) -> Result<()> {
    if pattern.is_empty() {
        Err(Error::param("pattern must not be empty"))
    } else {
        Ok(())
    }
}

impl PeriodOperation for WordsMatching {
    type Value = BTreeSet<String>;
    fn kind(&self) -> ValueKind {
        ValueKind::Set
    }
    fn on_period(&self, corpus: &Corpus) -> Result<Self::Value> {
        check_pattern(&self.pattern)?;
        Ok(corpus
            .vocabulary()?
            .words()
            .filter(|w| self.matches(w))
            .map(str::to_string)
            .collect())
    }
}

/// Token-weighted occurrences of a character pattern, raw and per million
/// in-vocabulary tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternCount {
    pub raw: u64,
    pub per_million: f64,
}

pub fn pattern_count(vocab: &Vocabulary, occurrences: impl Fn(&str) -> usize) -> PatternCount {
    let raw: u64 = vocab
        .entries
        .iter()
        .map(|(w, &f)| occurrences(w) as u64 * f)
        .sum();
    let per_million = if vocab.token_total == 0 {
        0.0
    } else {
        raw as f64 * 1e6 / vocab.token_total as f64
    };
    PatternCount { raw, per_million }
}

#[derive(Debug, Clone)]
pub struct MorphemeFrequency {
    pub pattern: String,
    pub level: Level,
}

impl MorphemeFrequency {
    pub fn new(pattern: impl Into<String>) -> Self {
        MorphemeFrequency {
            pattern: pattern.into(),
            level: Level::Lemma,
        }
    }
}

impl PeriodOperation for MorphemeFrequency {
    type Value = PatternCount;
    fn kind(&self) -> ValueKind {
        ValueKind::Frequency
    }
    fn on_period(&self, corpus: &Corpus) -> Result<PatternCount> {
        check_pattern(&self.pattern)?;
        let pattern = self.pattern.as_str();
        Ok(pattern_count(corpus.vocabulary_at(self.level)?, |w| w.matches(pattern).count()))
    }
}

/// Per-period summary of the vocabulary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabMetrics {
    pub unique_word_count: TimeSeries<u64>,
    pub average_word_length: TimeSeries<f64>,
    /// `None` when the n-gram tables of that order were not built.
    pub ngram_count: Option<TimeSeries<u64>>,
    pub common_words: BTreeSet<String>,
}

pub fn vocab_metrics(
    node: &CorpusNode,
    range: Option<TimePeriod>,
    ngram_order: usize,
) -> Result<VocabMetrics> {
    check_order(ngram_order)?;
    let ngram_count = match node.perform(&PerPeriod::within(
        NgramCount {
            order: ngram_order,
            level: Level::Lemma,
        },
        range,
    )) {
        Ok(s) => Some(s),
        Err(Error::MissingArtifact { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(VocabMetrics {
        unique_word_count: node.perform(&PerPeriod::within(UniqueWordCount, range))?,
        average_word_length: node.perform(&PerPeriod::within(AverageWordLength, range))?,
        ngram_count,
        common_words: node.perform(&CommonWords { range })?,
    })
}
