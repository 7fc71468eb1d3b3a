use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use super::sparse::{CsrMatrix, VocabIndex};
use crate::error::{Error, Result};
use crate::lexicon::Vocabulary;
use crate::period::TimePeriod;
use crate::preprocess::ProcessedDocument;

pub const DEFAULT_WINDOW: usize = 2;

/// Symmetric word-by-word counts under an unweighted window.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    pub period: TimePeriod,
    pub vocab: VocabIndex,
    pub counts: CsrMatrix<u64>,
    pub window: usize,
    pub row_totals: Vec<u64>,
    pub col_totals: Vec<u64>,
    pub grand_total: u64,
}

/// Word order used for every matrix of a period: descending frequency, ties lexicographic.
pub fn vocab_index(vocab: &Vocabulary) -> VocabIndex {
    VocabIndex::from(
        vocab
            .ranked()
            .into_iter()
            .map(|(w, _)| w.to_string())
            .collect::<Vec<_>>(),
    )
}

fn count_document(ids: &[Option<usize>], window: usize, acc: &mut HashMap<(usize, usize), u64>) {
    for (i, wi) in ids.iter().enumerate() {
        let Some(wi) = *wi else { continue };
        for wj in ids.iter().skip(i + 1).take(window).flatten() {
            *acc.entry((wi, *wj)).or_insert(0) += 1;
            *acc.entry((*wj, wi)).or_insert(0) += 1;
        }
    }
}

fn merge(mut a: HashMap<(usize, usize), u64>, b: HashMap<(usize, usize), u64>) -> HashMap<(usize, usize), u64> {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

impl CooccurrenceMatrix {
    /// Counts, for every position i and every j with 1 ≤ |i − j| ≤ window in
    /// the same document, one (w_i, w_j) event. Token positions are those of
    /// the full lemma stream; out-of-vocabulary tokens occupy a position but
    /// contribute no events.
    pub fn count(
        period: TimePeriod,
        docs: &[ProcessedDocument],
        vocabulary: &Vocabulary,
        window: usize,
    ) -> Result<Self> {
        if window < 1 {
            return Err(Error::param("co-occurrence window must be at least 1"));
        }
        let vocab = vocab_index(vocabulary);
        let cells = docs
            .par_iter()
            .fold(HashMap::new, |mut acc, doc| {
                let ids: Vec<Option<usize>> = doc.lemmas.iter().map(|l| vocab.id(l)).collect();
                count_document(&ids, window, &mut acc);
                acc
            })
            .reduce(HashMap::new, merge);
        let n = vocab.len();
        let triplets = cells.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Ok(Self::from_counts(period, vocab, CsrMatrix::from_triplets(n, n, triplets), window))
    }

    pub fn from_counts(period: TimePeriod, vocab: VocabIndex, counts: CsrMatrix<u64>, window: usize) -> Self {
        let mut row_totals = vec![0; counts.n_rows()];
        let mut col_totals = vec![0; counts.n_cols()];
        for (r, c, v) in counts.iter() {
            row_totals[r] += v;
            col_totals[c] += v;
        }
        let grand_total = row_totals.iter().sum();
        CooccurrenceMatrix {
            period,
            vocab,
            counts,
            window,
            row_totals,
            col_totals,
            grand_total,
        }
    }

    /// Raw count of (u, v); 0 for out-of-vocabulary words.
    pub fn cofrequency(&self, u: &str, v: &str) -> u64 {
        match (self.vocab.id(u), self.vocab.id(v)) {
            (Some(i), Some(j)) => self.counts.get(i, j).unwrap_or(0),
            _ => 0,
        }
    }

    /// Coordinate TSV: `#period=… #window=…` header then `row<TAB>col<TAB>count`.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#period={} #window={}\n", self.period, self.window);
        for (r, c, v) in self.counts.iter() {
            out.push_str(&format!("{}\t{}\t{}\n", self.vocab.word(r), self.vocab.word(c), v));
        }
        out
    }

    /// Parses [`Self::to_tsv`] output against a known word order.
    pub fn parse_tsv(content: &str, vocab: VocabIndex, origin: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let header = lines.next().unwrap_or("");
        let (period, window) = parse_matrix_header(header, "#window=", origin)?;
        let mut triplets = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (r, c, v) = split_coordinate(line, &vocab, origin)?;
            let v = v
                .parse()
                .map_err(|_| Error::format(origin, format!("bad count in `{line}`")))?;
            triplets.push((r, c, v));
        }
        let n = vocab.len();
        Ok(Self::from_counts(period, vocab, CsrMatrix::from_triplets(n, n, triplets), window as usize))
    }
}

pub(crate) fn parse_matrix_header(line: &str, key: &str, origin: &Path) -> Result<(TimePeriod, f64)> {
    let bad = || Error::format(origin, format!("bad header `{line}`"));
    let mut period = None;
    let mut value = None;
    for field in line.split_whitespace() {
        if let Some(p) = field.strip_prefix("#period=") {
            period = Some(p.parse::<TimePeriod>().map_err(|_| bad())?);
        } else if let Some(v) = field.strip_prefix(key) {
            value = Some(v.parse::<f64>().map_err(|_| bad())?);
        }
    }
    Ok((period.ok_or_else(bad)?, value.ok_or_else(bad)?))
}

pub(crate) fn split_coordinate<'a>(
    line: &'a str,
    vocab: &VocabIndex,
    origin: &Path,
) -> Result<(usize, usize, &'a str)> {
    let mut cols = line.split('\t');
    let (Some(r), Some(c), Some(v), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
        return Err(Error::format(origin, format!("bad coordinate line `{line}`")));
    };
    let id = |w: &str| {
        vocab
            .id(w)
            .ok_or_else(|| Error::format(origin, format!("`{w}` is not in the vocabulary")))
    };
    Ok((id(r)?, id(c)?, v))
}
