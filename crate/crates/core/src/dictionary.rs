//! Modern ↔ old word pairs and lexical-replacement analyses.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusNode;
use crate::error::{Error, Result};
use crate::lexicon::Frequency;
use crate::operation::{PerPeriod, TimeSeries};
use crate::period::TimePeriod;
use crate::report::{csv_field, format_real};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryEntry {
    pub modern: String,
    #[serde(rename = "old")]
    pub old_forms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub senses: Option<Vec<String>>,
}

pub const SAMPLE_DICTIONARY: &str = include_str!("../data/sample_dictionary.json");

/// Parses and validates a dictionary: every field non-empty, and no
/// (modern, old) pair listed twice anywhere in the file.
pub fn load_dictionary(json: &str) -> Result<Vec<DictionaryEntry>> {
    let entries: Vec<DictionaryEntry> = serde_json::from_str(json).map_err(|source| Error::Json {
        context: "dictionary".into(),
        source,
    })?;
    let mut seen: HashMap<(String, String), (usize, usize)> = HashMap::new();
    for (i, entry) in entries.iter().enumerate() {
        if entry.modern.trim().is_empty() {
            return Err(Error::Validation(format!("dictionary entry {i}: empty `modern` field")));
        }
        if entry.old_forms.is_empty() {
            return Err(Error::Validation(format!(
                "dictionary entry {i} (`{}`): `old` must list at least one form",
                entry.modern
            )));
        }
        for (j, old) in entry.old_forms.iter().enumerate() {
            if old.trim().is_empty() {
                return Err(Error::Validation(format!(
                    "dictionary entry {i} (`{}`): old form {j} is empty",
                    entry.modern
                )));
            }
            let key = (entry.modern.clone(), old.clone());
            if let Some((pi, pj)) = seen.insert(key, (i, j)) {
                return Err(Error::Validation(format!(
                    "duplicate pair ({}, {old}) at entry {pi} form {pj} and entry {i} form {j}",
                    entry.modern
                )));
            }
        }
    }
    Ok(entries)
}

pub fn sample_dictionary() -> Vec<DictionaryEntry> {
    load_dictionary(SAMPLE_DICTIONARY).expect("bundled dictionary is valid")
}

pub fn dictionary_to_json(entries: &[DictionaryEntry]) -> String {
    serde_json::to_string_pretty(entries).expect("entries serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplacementSeries {
    pub modern: String,
    pub old: String,
    pub modern_series: TimeSeries<f64>,
    pub old_series: TimeSeries<f64>,
}

/// Normalized lemma frequencies of both words per period.
pub fn replacement_series(
    node: &CorpusNode,
    modern: &str,
    old: &str,
    range: Option<TimePeriod>,
) -> Result<ReplacementSeries> {
    Ok(ReplacementSeries {
        modern: modern.to_string(),
        old: old.to_string(),
        modern_series: node.perform(&PerPeriod::within(Frequency::new(modern, true), range))?,
        old_series: node.perform(&PerPeriod::within(Frequency::new(old, true), range))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverRule {
    /// Modern strictly ahead, and never behind afterwards.
    #[default]
    Sustained,
    /// Modern strictly ahead for the first time.
    FirstTouch,
}

impl fmt::Display for CrossoverRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossoverRule::Sustained => "sustained",
            CrossoverRule::FirstTouch => "first-touch",
        })
    }
}

impl FromStr for CrossoverRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sustained" => Ok(CrossoverRule::Sustained),
            "first-touch" => Ok(CrossoverRule::FirstTouch),
            other => Err(Error::param(format!(
                "unknown crossover rule `{other}` (sustained|first-touch)"
            ))),
        }
    }
}

impl ReplacementSeries {
    pub fn crossover(&self, rule: CrossoverRule) -> Option<TimePeriod> {
        let pairs: Vec<(TimePeriod, f64, f64)> = self
            .modern_series
            .entries
            .iter()
            .zip(&self.old_series.entries)
            .map(|(m, o)| (m.period, m.value, o.value))
            .collect();
        (0..pairs.len())
            .find(|&i| {
                let (_, m, o) = pairs[i];
                m > o
                    && match rule {
                        CrossoverRule::FirstTouch => true,
                        CrossoverRule::Sustained => pairs[i + 1..].iter().all(|&(_, m, o)| m >= o),
                    }
            })
            .map(|i| pairs[i].0)
    }

    /// `period,modern,old,modern_freq,old_freq`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period,modern,old,modern_freq,old_freq\n");
        for (m, o) in self.modern_series.entries.iter().zip(&self.old_series.entries) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                m.period,
                csv_field(&self.modern),
                csv_field(&self.old),
                format_real(m.value),
                format_real(o.value)
            ));
        }
        out
    }
}

pub fn crossover_period(
    node: &CorpusNode,
    modern: &str,
    old: &str,
    range: Option<TimePeriod>,
    rule: CrossoverRule,
) -> Result<Option<TimePeriod>> {
    Ok(replacement_series(node, modern, old, range)?.crossover(rule))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub modern: String,
    pub old: String,
    pub crossover: Option<TimePeriod>,
}

/// Crossover of every (modern, old) pair of a dictionary.
pub fn dictionary_crossovers(
    node: &CorpusNode,
    entries: &[DictionaryEntry],
    range: Option<TimePeriod>,
    rule: CrossoverRule,
) -> Result<Vec<CrossoverRow>> {
    let mut rows = Vec::new();
    for entry in entries {
        for old in &entry.old_forms {
            rows.push(CrossoverRow {
                modern: entry.modern.clone(),
                old: old.clone(),
                crossover: crossover_period(node, &entry.modern, old, range, rule)?,
            });
        }
    }
    Ok(rows)
}

/// `modern,old,crossover`; no crossover is an empty cell.
pub fn crossovers_csv(rows: &[CrossoverRow]) -> String {
    let mut out = String::from("modern,old,crossover\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&r.modern),
            csv_field(&r.old),
            r.crossover.map(|p| p.to_string()).unwrap_or_default()
        ));
    }
    out
}
