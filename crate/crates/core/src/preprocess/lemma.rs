use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of leading characters kept by the fallback stemmer.
pub const F5_PREFIX_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaOrigin {
    Analyzer,
    F5Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma {
    pub text: String,
    pub origin: LemmaOrigin,
}

/// A morphological analyzer that may or may not find a stem for a surface form.
pub trait Analyzer: Send + Sync {
    fn stem(&self, surface: &str) -> Option<String>;
}

/// Exact-match surface → lemma table. An empty table always defers to the
/// fallback stemmer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupAnalyzer {
    table: HashMap<String, String>,
}

impl LookupAnalyzer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        LookupAnalyzer {
            table: pairs
                .into_iter()
                .map(|(s, l)| (s.into(), l.into()))
                .collect(),
        }
    }

    /// Parses a two-column, headerless UTF-8 TSV of `surface<TAB>lemma`.
    pub fn parse_tsv(content: &str) -> std::result::Result<Self, String> {
        let mut table = HashMap::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(s), Some(l), None) if !s.is_empty() && !l.is_empty() => {
                    table.insert(s.to_string(), l.to_string());
                }
                _ => return Err(format!("line {}: expected `surface<TAB>lemma`", lineno + 1)),
            }
        }
        Ok(LookupAnalyzer { table })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&content).map_err(|reason| Error::format(path, reason))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Analyzer for LookupAnalyzer {
    fn stem(&self, surface: &str) -> Option<String> {
        self.table.get(surface).cloned()
    }
}

/// Lowercases with Turkish dotted/dotless i rules (İ → i, I → ı).
pub fn turkish_lowercase(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            'İ' => out.push('i'),
            'I' => out.push('ı'),
            _ => out.extend(c.to_lowercase()),
        }
    }
    out
}

/// First five characters (not bytes) of the lowercased surface.
pub fn f5_stem(surface: &str) -> String {
    turkish_lowercase(surface).chars().take(F5_PREFIX_LEN).collect()
}

/// Looks the surface up as written, then lowercased; falls back to F5.
pub fn lemmatize(surface: &str, analyzer: &dyn Analyzer) -> Lemma {
    let lowered = turkish_lowercase(surface);
    let found = analyzer
        .stem(surface)
        .or_else(|| (lowered != surface).then(|| analyzer.stem(&lowered)).flatten());
    match found {
        Some(text) => Lemma {
            text,
            origin: LemmaOrigin::Analyzer,
        },
        None => Lemma {
            text: lowered.chars().take(F5_PREFIX_LEN).collect(),
            origin: LemmaOrigin::F5Fallback,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f5_on_long_word() {
        let lemma = lemmatize("müstenittir", &LookupAnalyzer::new());
        assert_eq!(lemma.text, "müste");
        assert_eq!(lemma.origin, LemmaOrigin::F5Fallback);
    }

    #[test]
    fn short_word_passes_through() {
        let lemma = lemmatize("ev", &LookupAnalyzer::new());
        assert_eq!(lemma, Lemma { text: "ev".into(), origin: LemmaOrigin::F5Fallback });
    }

    #[test]
    fn lookup_hit() {
        let analyzer = LookupAnalyzer::from_pairs([("milletindir", "millet")]);
        let lemma = lemmatize("milletindir", &analyzer);
        assert_eq!(lemma, Lemma { text: "millet".into(), origin: LemmaOrigin::Analyzer });
        // capitalized form falls through to the lowercased lookup
        assert_eq!(lemmatize("Milletindir", &analyzer).text, "millet");
    }

    #[test]
    fn f5_counts_characters_not_bytes() {
        let stem = f5_stem("âbidevî");
        assert_eq!(stem, "âbide");
        assert_eq!(stem.chars().count(), 5);
        assert_eq!(f5_stem("İSTANBUL"), "istan");
        assert_eq!(f5_stem("IRMAK"), "ırmak");
    }

    #[test]
    fn tsv_parsing() {
        let an = LookupAnalyzer::parse_tsv("kitabı\tkitap\n\ntelevizyonu\ttelevizyon\n").unwrap();
        assert_eq!(an.len(), 2);
        assert_eq!(an.stem("kitabı").as_deref(), Some("kitap"));
        assert!(LookupAnalyzer::parse_tsv("only-one-column\n").is_err());
    }
}
