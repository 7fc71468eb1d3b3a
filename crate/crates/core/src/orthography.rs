//! Writing-convention signals: word-final consonant variants (kitab/kitap,
//! Ahmed/Ahmet) and circumflexed vowels.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusNode, DiachronicCorpus};
use crate::error::{Error, Result};
use crate::lexicon::{pattern_count, Level, PatternCount, Vocabulary};
use crate::operation::{Operation, TimeSeries, ValueKind};
use crate::period::TimePeriod;
use crate::report::{csv_field, format_real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairClass {
    #[serde(rename = "b-p")]
    BP,
    #[serde(rename = "d-t")]
    DT,
    #[serde(rename = "c-ç")]
    CC,
    /// Soft `g` or `ğ` against hard `k`.
    #[serde(rename = "g-k")]
    GK,
}

impl PairClass {
    /// The classes analysed unless asked otherwise; c-ç and g-k are rare.
    pub const DEFAULT: [PairClass; 2] = [PairClass::BP, PairClass::DT];

    pub fn as_str(self) -> &'static str {
        match self {
            PairClass::BP => "b-p",
            PairClass::DT => "d-t",
            PairClass::CC => "c-ç",
            PairClass::GK => "g-k",
        }
    }

    pub fn soft_letters(self) -> &'static [char] {
        match self {
            PairClass::BP => &['b'],
            PairClass::DT => &['d'],
            PairClass::CC => &['c'],
            PairClass::GK => &['g', 'ğ'],
        }
    }

    pub fn hard_letter(self) -> char {
        match self {
            PairClass::BP => 'p',
            PairClass::DT => 't',
            PairClass::CC => 'ç',
            PairClass::GK => 'k',
        }
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b-p" | "bp" | "b" => Ok(PairClass::BP),
            "d-t" | "dt" | "d" => Ok(PairClass::DT),
            "c-ç" | "c-c" | "c" => Ok(PairClass::CC),
            "g-k" | "g-ğ/k" | "g" => Ok(PairClass::GK),
            other => Err(Error::param(format!(
                "unknown variant class `{other}` (b-p|d-t|c-ç|g-k)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariantPair {
    pub soft_form: String,
    pub hard_form: String,
    pub pair_class: PairClass,
}

pub fn default_exclusions() -> BTreeSet<String> {
    BTreeSet::from(["et".to_string()])
}

/// Pairs every word ending in a soft letter of `class` with its hard-letter
/// spelling when both occur in `vocab`. A pair is skipped when either form is
/// excluded.
pub fn detect_variant_pairs(vocab: &Vocabulary, class: PairClass, exclusions: &BTreeSet<String>) -> Vec<VariantPair> {
    let hard = class.hard_letter();
    let mut pairs = Vec::new();
    for word in vocab.words() {
        let Some(last) = word.chars().last() else { continue };
        if !class.soft_letters().contains(&last) {
            continue;
        }
        let stem = &word[..word.len() - last.len_utf8()];
        if stem.is_empty() {
            continue;
        }
        let counterpart = format!("{stem}{hard}");
        if exclusions.contains(word) || exclusions.contains(&counterpart) {
            continue;
        }
        if vocab.contains(&counterpart) {
            pairs.push(VariantPair {
                soft_form: word.to_string(),
                hard_form: counterpart,
                pair_class: class,
            });
        }
    }
    pairs.sort();
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndingRatio {
    pub soft_total: u64,
    pub hard_total: u64,
    /// Σ freq(soft) / Σ freq(hard); `None` when no hard form occurs.
    pub ratio: Option<f64>,
    /// Same ratio over word types present in the period.
    pub type_ratio: Option<f64>,
}

pub fn ending_ratio_in(vocab: &Vocabulary, pairs: &[VariantPair]) -> EndingRatio {
    let soft_total: u64 = pairs.iter().map(|p| vocab.frequency(&p.soft_form)).sum();
    let hard_total: u64 = pairs.iter().map(|p| vocab.frequency(&p.hard_form)).sum();
    let soft_types = pairs.iter().filter(|p| vocab.contains(&p.soft_form)).count();
    let hard_types = pairs.iter().filter(|p| vocab.contains(&p.hard_form)).count();
    let ratio = |a: f64, b: f64| if b == 0.0 { None } else { Some(a / b) };
    EndingRatio {
        soft_total,
        hard_total,
        ratio: ratio(soft_total as f64, hard_total as f64),
        type_ratio: ratio(soft_types as f64, hard_types as f64),
    }
}

fn merged_at(leaves: &[&Corpus], level: Level) -> Result<Vocabulary> {
    let mut iter = leaves.iter();
    let first = iter.next().ok_or_else(|| Error::param("empty range"))?;
    let mut merged = first.vocabulary_at(level)?.clone();
    for leaf in iter {
        merged = merged.merged(leaf.vocabulary_at(level)?);
    }
    Ok(merged)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndingRatioReport {
    pub class: PairClass,
    pub pairs: Vec<VariantPair>,
    pub series: TimeSeries<EndingRatio>,
}

impl EndingRatioReport {
    /// `period,class,soft_total,hard_total,ratio`; an undefined ratio is an empty cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,class,soft_total,hard_total,ratio\n");
        for e in &self.series.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.period,
                self.class,
                e.value.soft_total,
                e.value.hard_total,
                e.value.ratio.map(format_real).unwrap_or_default()
            ));
        }
        out
    }

    pub fn pairs_csv(&self) -> String {
        let mut out = String::from("soft_form,hard_form,class\n");
        for p in &self.pairs {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&p.soft_form),
                csv_field(&p.hard_form),
                p.pair_class
            ));
        }
        out
    }
}

/// Per-period soft/hard ratio over pairs detected in the merged vocabulary
/// of the range.
#[derive(Debug, Clone)]
pub struct EndingRatioOp {
    pub class: PairClass,
    pub range: Option<TimePeriod>,
    pub level: Level,
    pub exclusions: BTreeSet<String>,
}

impl EndingRatioOp {
    pub fn new(class: PairClass) -> Self {
        EndingRatioOp {
            class,
            range: None,
            level: Level::Surface,
            exclusions: default_exclusions(),
        }
    }

    fn run(&self, leaves: Vec<&Corpus>) -> Result<EndingRatioReport> {
        let merged = merged_at(&leaves, self.level)?;
        let pairs = detect_variant_pairs(&merged, self.class, &self.exclusions);
        if pairs.is_empty() {
            return Err(Error::Validation(format!(
                "no {} variant pairs found in the {} vocabulary",
                self.class, self.level
            )));
        }
        let mut series = TimeSeries::new(ValueKind::Ratio);
        for leaf in leaves {
            series.push(leaf.period(), ending_ratio_in(leaf.vocabulary_at(self.level)?, &pairs));
        }
        Ok(EndingRatioReport {
            class: self.class,
            pairs,
            series,
        })
    }
}

impl Operation for EndingRatioOp {
    type Output = EndingRatioReport;
    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        self.run(CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.run(corpus.leaves_in(self.range)?)
    }
}

pub const CIRCUMFLEX_LETTERS: [char; 6] = ['â', 'î', 'û', 'Â', 'Î', 'Û'];

pub fn circumflex_count(word: &str, letters: &[char]) -> usize {
    word.chars().filter(|c| letters.contains(c)).count()
}

/// Circumflexed letters weighted by token frequency, raw and per million tokens.
pub fn circumflex_frequency(vocab: &Vocabulary, letters: &[char]) -> PatternCount {
    pattern_count(vocab, |w| circumflex_count(w, letters))
}

#[derive(Debug, Clone)]
pub struct CircumflexOp {
    pub range: Option<TimePeriod>,
    pub level: Level,
    pub letters: Vec<char>,
}

impl Default for CircumflexOp {
    fn default() -> Self {
        CircumflexOp {
            range: None,
            level: Level::Surface,
            letters: CIRCUMFLEX_LETTERS.to_vec(),
        }
    }
}

impl CircumflexOp {
    fn run(&self, leaves: Vec<&Corpus>) -> Result<TimeSeries<PatternCount>> {
        let mut series = TimeSeries::new(ValueKind::Frequency);
        for leaf in leaves {
            series.push(leaf.period(), circumflex_frequency(leaf.vocabulary_at(self.level)?, &self.letters));
        }
        Ok(series)
    }
}

impl Operation for CircumflexOp {
    type Output = TimeSeries<PatternCount>;
    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        self.run(CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.run(corpus.leaves_in(self.range)?)
    }
}

pub fn circumflex_csv(series: &TimeSeries<PatternCount>) -> String {
    let mut out = String::from("period,circumflex_raw,circumflex_per_million\n");
    for e in &series.entries {
        out.push_str(&format!("{},{},{}\n", e.period, e.value.raw, format_real(e.value.per_million)));
    }
    out
}
