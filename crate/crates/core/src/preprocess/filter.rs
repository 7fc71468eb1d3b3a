use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word → frequency, ordered for deterministic output.
pub type WordCounts = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub threshold_divisor: u64,
    pub alphabetic_only: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            threshold_divisor: 10_000_000,
            alphabetic_only: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threshold_divisor == 0 {
            return Err(Error::param("threshold_divisor must be positive"));
        }
        Ok(())
    }
}

/// Minimum frequency a word needs in a period of `token_count` tokens:
/// ⌈token_count / threshold_divisor⌉.
pub fn frequency_threshold(token_count: u64, cfg: &FilterConfig) -> u64 {
    token_count.div_ceil(cfg.threshold_divisor.max(1))
}

pub fn is_alphabetic_word(word: &str) -> bool {
    !word.is_empty() && word.chars().all(char::is_alphabetic)
}

/// Drops words below the period threshold and, when configured, words with
/// any non-alphabetic character.
pub fn filter_vocabulary(counts: &WordCounts, token_count: u64, cfg: &FilterConfig) -> WordCounts {
    let threshold = frequency_threshold(token_count, cfg);
    counts
        .iter()
        .filter(|(w, &f)| f >= threshold && (!cfg.alphabetic_only || is_alphabetic_word(w)))
        .map(|(w, &f)| (w.clone(), f))
        .collect()
}
