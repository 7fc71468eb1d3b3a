//! Similarity and association queries over one period's artifacts.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::cooccurrence::CooccurrenceMatrix;
use super::ppmi::PpmiMatrix;
use super::set::{cosine, row_norms, EmbeddingSet, Provenance};
use super::sparse::VocabIndex;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::operation::{PeriodOperation, ValueKind};
use crate::period::TimePeriod;
use nalgebra::RowDVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub score: f64,
}

/// Highest score first; equal scores in lexicographic order.
pub(crate) fn rank(mut items: Vec<Neighbor>, k: usize) -> Vec<Neighbor> {
    items.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.word.cmp(&b.word))
    });
    items.truncate(k);
    items
}

fn lookup(vocab: &VocabIndex, word: &str, period: TimePeriod) -> Result<usize> {
    vocab.id(word).ok_or_else(|| Error::OutOfVocabulary {
        word: word.to_string(),
        period: period.to_string(),
    })
}

pub(crate) fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    Ok(())
}

pub fn similarity(set: &EmbeddingSet, u: &str, v: &str) -> Result<f64> {
    Ok(cosine(&set.vector(u)?, &set.vector(v)?))
}

/// Ranks every row of `set` by cosine against `query`, skipping `exclude`.
pub fn nearest(set: &EmbeddingSet, query: &RowDVector<f64>, k: usize, exclude: Option<&str>) -> Result<Vec<Neighbor>> {
    check_k(k)?;
    let qn = query.norm();
    let norms = row_norms(&set.matrix);
    let items = set
        .vocab
        .words()
        .iter()
        .enumerate()
        .filter(|(_, w)| Some(w.as_str()) != exclude)
        .map(|(i, w)| {
            let denom = qn * norms[i];
            let score = if denom == 0.0 {
                0.0
            } else {
                set.matrix.row(i).dot(query) / denom
            };
            Neighbor { word: w.clone(), score }
        })
        .collect();
    Ok(rank(items, k))
}

/// Top-`k` words by cosine, excluding the query word.
pub fn most_similar(set: &EmbeddingSet, word: &str, k: usize) -> Result<Vec<Neighbor>> {
    let v = set.vector(word)?;
    nearest(set, &v, k, Some(word))
}

/// Top-`k` words by PPMI with `word`, excluding `word` itself.
pub fn collocations(ppmi: &PpmiMatrix, word: &str, k: usize) -> Result<Vec<Neighbor>> {
    check_k(k)?;
    let u = lookup(&ppmi.vocab, word, ppmi.period)?;
    let items = ppmi
        .values
        .row(u)
        .filter(|&(v, _)| v != u)
        .map(|(v, score)| Neighbor {
            word: ppmi.vocab.word(v).to_string(),
            score,
        })
        .collect();
    Ok(rank(items, k))
}

pub fn association(ppmi: &PpmiMatrix, u: &str, v: &str) -> Result<f64> {
    let a = lookup(&ppmi.vocab, u, ppmi.period)?;
    let b = lookup(&ppmi.vocab, v, ppmi.period)?;
    Ok(ppmi.value(a, b))
}

pub fn cofrequency(cooc: &CooccurrenceMatrix, u: &str, v: &str) -> Result<u64> {
    lookup(&cooc.vocab, u, cooc.period)?;
    lookup(&cooc.vocab, v, cooc.period)?;
    Ok(cooc.cofrequency(u, v))
}

#[derive(Debug, Clone)]
pub struct Similarity {
    pub u: String,
    pub v: String,
    pub kind: Provenance,
}

impl PeriodOperation for Similarity {
    type Value = f64;
    fn kind(&self) -> ValueKind {
        ValueKind::Ratio
    }
    fn on_period(&self, corpus: &Corpus) -> Result<f64> {
        similarity(corpus.embeddings(self.kind)?, &self.u, &self.v)
    }
}

#[derive(Debug, Clone)]
pub struct MostSimilar {
    pub word: String,
    pub k: usize,
    pub kind: Provenance,
}

impl PeriodOperation for MostSimilar {
    type Value = Vec<Neighbor>;
    fn kind(&self) -> ValueKind {
        ValueKind::Ranking
    }
    fn on_period(&self, corpus: &Corpus) -> Result<Vec<Neighbor>> {
        most_similar(corpus.embeddings(self.kind)?, &self.word, self.k)
    }
}

#[derive(Debug, Clone)]
pub struct Collocations {
    pub word: String,
    pub k: usize,
}

impl PeriodOperation for Collocations {
    type Value = Vec<Neighbor>;
    fn kind(&self) -> ValueKind {
        ValueKind::Ranking
    }
    fn on_period(&self, corpus: &Corpus) -> Result<Vec<Neighbor>> {
        collocations(corpus.ppmi()?, &self.word, self.k)
    }
}

#[derive(Debug, Clone)]
pub struct Association {
    pub u: String,
    pub v: String,
}

impl PeriodOperation for Association {
    type Value = f64;
    fn kind(&self) -> ValueKind {
        ValueKind::Ratio
    }
    fn on_period(&self, corpus: &Corpus) -> Result<f64> {
        association(corpus.ppmi()?, &self.u, &self.v)
    }
}

#[derive(Debug, Clone)]
pub struct CoFrequency {
    pub u: String,
    pub v: String,
}

impl PeriodOperation for CoFrequency {
    type Value = u64;
    fn kind(&self) -> ValueKind {
        ValueKind::Count
    }
    fn on_period(&self, corpus: &Corpus) -> Result<u64> {
        cofrequency(corpus.cooccurrence()?, &self.u, &self.v)
    }
}
