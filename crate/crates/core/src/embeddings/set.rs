use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use super::sparse::VocabIndex;
use crate::error::{Error, Result};
use crate::period::TimePeriod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Svd,
    Cbow,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Svd => "svd",
            Provenance::Cbow => "cbow",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(Provenance::Svd),
            "cbow" => Ok(Provenance::Cbow),
            other => Err(Error::param(format!("unknown embedding kind `{other}` (svd|cbow)"))),
        }
    }
}

/// Dense word vectors of one period, one row per vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    pub period: TimePeriod,
    pub vocab: VocabIndex,
    pub matrix: DMatrix<f64>,
    pub provenance: Provenance,
    pub seed: Option<u64>,
    /// Context-side vectors (SVD only): C = V Σ^{1/2}.
    pub context: Option<DMatrix<f64>>,
}

impl EmbeddingSet {
    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, word: &str) -> Result<RowDVector<f64>> {
        let id = self.vocab.id(word).ok_or_else(|| Error::OutOfVocabulary {
            word: word.to_string(),
            period: self.period.to_string(),
        })?;
        Ok(self.matrix.row(id).into_owned())
    }

    pub fn file_name(provenance: Provenance) -> String {
        format!("embeddings_{provenance}.txt")
    }

    /// Header `dim=<d> vocab=<n> provenance=<kind> period=<START-END>`, then
    /// one `lemma v1 … vd` line per word in shortest round-trip notation.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "dim={} vocab={} provenance={} period={}\n",
            self.dim(),
            self.len(),
            self.provenance,
            self.period
        );
        for (i, w) in self.vocab.words().iter().enumerate() {
            out.push_str(w);
            for v in self.matrix.row(i).iter() {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(content: &str, origin: &Path) -> Result<Self> {
        let mut lines = content.lines();
        let header = lines.next().unwrap_or("");
        let bad = |why: String| Error::format(origin, why);
        let (mut dim, mut n, mut prov, mut period) = (None, None, None, None);
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("dim", v)) => dim = v.parse::<usize>().ok(),
                Some(("vocab", v)) => n = v.parse::<usize>().ok(),
                Some(("provenance", v)) => prov = v.parse::<Provenance>().ok(),
                Some(("period", v)) => period = v.parse::<TimePeriod>().ok(),
                _ => {}
            }
        }
        let (Some(dim), Some(n), Some(provenance), Some(period)) = (dim, n, prov, period) else {
            return Err(bad(format!("bad embedding header `{header}`")));
        };
        let mut words = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n * dim);
        for line in lines.filter(|l| !l.is_empty()) {
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or_default().to_string();
            let before = data.len();
            for p in parts {
                data.push(p.parse::<f64>().map_err(|_| bad(format!("bad value `{p}` for `{word}`")))?);
            }
            if data.len() - before != dim {
                return Err(bad(format!("`{word}` has {} values, expected {dim}", data.len() - before)));
            }
            words.push(word);
        }
        if words.len() != n {
            return Err(bad(format!("expected {n} words, found {}", words.len())));
        }
        Ok(EmbeddingSet {
            period,
            vocab: VocabIndex::from(words),
            matrix: DMatrix::from_row_slice(n, dim, &data),
            provenance,
            seed: None,
            context: None,
        })
    }
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &RowDVector<f64>, b: &RowDVector<f64>) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        a.dot(b) / (na * nb)
    }
}

/// Row norms, cached for repeated nearest-neighbour scans.
pub(crate) fn row_norms(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.norm()))
}
