//! Text normalization, tokenization, frequency filtering and lemmatization.

mod filter;
mod lemma;
mod normalize;
mod tokenize;

pub use filter::{filter_vocabulary, frequency_threshold, is_alphabetic_word, FilterConfig, WordCounts};
pub use lemma::{
    f5_stem, lemmatize, turkish_lowercase, Analyzer, Lemma, LemmaOrigin, LookupAnalyzer,
    F5_PREFIX_LEN,
};
pub use normalize::{normalize_text, normalize_with, NormalizeConfig};
pub use tokenize::{split_surfaces, tokenize, Token};

/// One document after normalization, tokenization and lemmatization.
/// `surfaces` (lowercased) and `lemmas` are parallel, one entry per token.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProcessedDocument {
    pub id: String,
    pub surfaces: Vec<String>,
    pub lemmas: Vec<String>,
}

impl ProcessedDocument {
    pub fn token_count(&self) -> usize {
        self.surfaces.len()
    }
}

/// Runs the full per-document pipeline on raw text.
pub fn preprocess_document(
    id: &str,
    raw: &str,
    normalize: &NormalizeConfig,
    analyzer: &dyn Analyzer,
) -> ProcessedDocument {
    let text = normalize_with(raw, normalize);
    let mut surfaces = Vec::new();
    let mut lemmas = Vec::new();
    for surface in split_surfaces(&text) {
        lemmas.push(lemmatize(surface, analyzer).text);
        surfaces.push(turkish_lowercase(surface));
    }
    ProcessedDocument {
        id: id.to_string(),
        surfaces,
        lemmas,
    }
}
