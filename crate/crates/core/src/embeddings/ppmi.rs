use std::path::Path;

use super::cooccurrence::{parse_matrix_header, split_coordinate, CooccurrenceMatrix};
use super::sparse::{CsrMatrix, VocabIndex};
use crate::error::{Error, Result};
use crate::period::TimePeriod;

pub const DEFAULT_ALPHA: f64 = 0.75;

/// Positive pointwise mutual information with a smoothed context distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PpmiMatrix {
    pub period: TimePeriod,
    pub vocab: VocabIndex,
    pub values: CsrMatrix<f64>,
    pub alpha: f64,
}

/// PPMI(u, v) = max(ln(p(u, v) / (p(u) · p_α(v))), 0) with
/// p(u, v) = #(u, v) / G, p(u) = row(u) / G and
/// p_α(v) = col(v)^α / Σ_w col(w)^α. Only positive cells are stored.
pub fn build_ppmi(cooc: &CooccurrenceMatrix, alpha: f64) -> Result<PpmiMatrix> {
    if cooc.grand_total == 0 {
        return Err(Error::param(format!(
            "period {} has no co-occurrences; PPMI is undefined",
            cooc.period
        )));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param(format!("smoothing exponent must be positive (got {alpha})")));
    }
    let total = cooc.grand_total as f64;
    let smoothed: Vec<f64> = cooc.col_totals.iter().map(|&c| (c as f64).powf(alpha)).collect();
    let smoothed_sum: f64 = smoothed.iter().sum();
    let mut triplets = Vec::with_capacity(cooc.counts.nnz());
    for (u, v, count) in cooc.counts.iter() {
        let joint = count as f64 / total;
        let marginal = cooc.row_totals[u] as f64 / total;
        let context = smoothed[v] / smoothed_sum;
        let pmi = (joint / (marginal * context)).ln();
        if pmi > 0.0 {
            triplets.push((u, v, pmi));
        }
    }
    let n = cooc.vocab.len();
    Ok(PpmiMatrix {
        period: cooc.period,
        vocab: cooc.vocab.clone(),
        values: CsrMatrix::from_triplets(n, n, triplets),
        alpha,
    })
}

impl PpmiMatrix {
    pub fn value(&self, u: usize, v: usize) -> f64 {
        self.values.get(u, v).unwrap_or(0.0)
    }

    /// Coordinate TSV: `#period=… #alpha=…` header then `row<TAB>col<TAB>value`,
    /// values written in shortest round-trip form.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#period={} #alpha={}\n", self.period, self.alpha);
        for (r, c, v) in self.values.iter() {
            out.push_str(&format!("{}\t{}\t{}\n", self.vocab.word(r), self.vocab.word(c), v));
        }
        out
    }

    pub fn parse_tsv(content: &str, vocab: VocabIndex, origin: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let (period, alpha) = parse_matrix_header(lines.next().unwrap_or(""), "#alpha=", origin)?;
        let mut triplets = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (r, c, v) = split_coordinate(line, &vocab, origin)?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::format(origin, format!("bad value in `{line}`")))?;
            triplets.push((r, c, v));
        }
        let n = vocab.len();
        Ok(PpmiMatrix {
            period,
            vocab,
            values: CsrMatrix::from_triplets(n, n, triplets),
            alpha,
        })
    }
}
