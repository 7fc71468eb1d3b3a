//! Orthogonal Procrustes alignment between period embedding spaces, and the
//! cross-period queries built on it.
//!
//! Vectors are rows, so an aligned vector is `v · R`.

use std::path::Path;

use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DiachronicCorpus};
use crate::embeddings::{cosine, nearest, EmbeddingSet, Neighbor, Provenance};
use crate::error::{Error, Result};
use crate::operation::{Operation, TimeSeries, ValueKind};
use crate::period::TimePeriod;
use crate::report::format_fixed;

/// An orthogonal map from `source_period`'s space into `target_period`'s.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTransform {
    pub source_period: TimePeriod,
    pub target_period: TimePeriod,
    pub r: DMatrix<f64>,
    pub shared_vocab: Vec<String>,
    /// Fewer shared words than dimensions: the fit is not unique.
    pub underdetermined: bool,
}

/// Rows of `source` and `target` for the words both contain, in `source` order.
pub fn shared_rows(source: &EmbeddingSet, target: &EmbeddingSet) -> (Vec<String>, DMatrix<f64>, DMatrix<f64>) {
    let words: Vec<String> = source
        .vocab
        .words()
        .iter()
        .filter(|w| target.vocab.contains(w))
        .cloned()
        .collect();
    let d = source.dim();
    let mut a = DMatrix::zeros(words.len(), d);
    let mut b = DMatrix::zeros(words.len(), d);
    for (i, w) in words.iter().enumerate() {
        a.set_row(i, &source.matrix.row(source.vocab.id(w).expect("shared")));
        b.set_row(i, &target.matrix.row(target.vocab.id(w).expect("shared")));
    }
    (words, a, b)
}

/// ‖A·R − B‖_F
pub fn residual(a: &DMatrix<f64>, b: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    (a * r - b).norm()
}

/// Polar factor U·Vᵀ of the SVD of `m`.
fn polar(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Internal("SVD produced no U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Internal("SVD produced no Vᵀ".into()))?;
    Ok(u * v_t)
}

/// The orthogonal R minimizing ‖A·R − B‖_F for row-aligned A, B.
///
/// Both orientations of the cross-covariance (AᵀB and BᵀA) are solved and
/// the one with the smaller objective is kept, so the result does not depend
/// on which convention a caller had in mind.
pub fn procrustes(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::param(format!(
            "cannot align matrices of shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if a.nrows() == 0 {
        return Err(Error::param("alignment needs at least one shared row"));
    }
    let standard = polar(&(a.transpose() * b))?;
    let swapped = polar(&(b.transpose() * a))?;
    if residual(a, b, &swapped) < residual(a, b, &standard) {
        Ok(swapped)
    } else {
        Ok(standard)
    }
}

/// Fits R so that `source · R ≈ target` on the shared vocabulary.
pub fn procrustes_align(source: &EmbeddingSet, target: &EmbeddingSet) -> Result<AlignmentTransform> {
    if source.dim() != target.dim() {
        return Err(Error::param(format!(
            "embedding dimensions differ: {} has {}, {} has {}",
            source.period,
            source.dim(),
            target.period,
            target.dim()
        )));
    }
    let (shared, a, b) = shared_rows(source, target);
    if shared.is_empty() {
        return Err(Error::param(format!(
            "periods {} and {} share no vocabulary",
            source.period, target.period
        )));
    }
    let r = procrustes(&a, &b)?;
    Ok(AlignmentTransform {
        source_period: source.period,
        target_period: target.period,
        underdetermined: shared.len() < source.dim(),
        r,
        shared_vocab: shared,
    })
}

impl AlignmentTransform {
    pub fn identity(period: TimePeriod, dim: usize) -> Self {
        AlignmentTransform {
            source_period: period,
            target_period: period,
            r: DMatrix::identity(dim, dim),
            shared_vocab: Vec::new(),
            underdetermined: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn apply(&self, v: &RowDVector<f64>) -> RowDVector<f64> {
        v * &self.r
    }

    /// `self` followed by `next` (self.target must equal next.source).
    pub fn then(&self, next: &AlignmentTransform) -> Result<AlignmentTransform> {
        if self.target_period != next.source_period {
            return Err(Error::param(format!(
                "cannot compose {}→{} with {}→{}",
                self.source_period, self.target_period, next.source_period, next.target_period
            )));
        }
        Ok(AlignmentTransform {
            source_period: self.source_period,
            target_period: next.target_period,
            r: &self.r * &next.r,
            shared_vocab: Vec::new(),
            underdetermined: self.underdetermined || next.underdetermined,
        })
    }

    pub fn inverse(&self) -> AlignmentTransform {
        AlignmentTransform {
            source_period: self.target_period,
            target_period: self.source_period,
            r: self.r.transpose(),
            shared_vocab: self.shared_vocab.clone(),
            underdetermined: self.underdetermined,
        }
    }

    /// max |RᵀR − I|
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim();
        (self.r.transpose() * &self.r - DMatrix::<f64>::identity(d, d)).amax()
    }

    pub fn file_name(&self) -> String {
        format!("{}__{}.txt", self.source_period, self.target_period)
    }

    /// `d=<d> from=<p> to=<p>` then d rows of d reals.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "d={} from={} to={}\n",
            self.dim(),
            self.source_period,
            self.target_period
        );
        for row in self.r.row_iter() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(content: &str, origin: &Path) -> Result<Self> {
        let bad = |reason: String| Error::format(origin, reason);
        let mut lines = content.lines();
        let header = lines.next().ok_or_else(|| bad("empty transform file".into()))?;
        let (mut d, mut from, mut to) = (None, None, None);
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("d", v)) => d = v.parse::<usize>().ok(),
                Some(("from", v)) => from = v.parse::<TimePeriod>().ok(),
                Some(("to", v)) => to = v.parse::<TimePeriod>().ok(),
                _ => return Err(bad(format!("unexpected header field `{field}`"))),
            }
        }
        let (Some(d), Some(from), Some(to)) = (d, from, to) else {
            return Err(bad("header must be `d=<d> from=<period> to=<period>`".into()));
        };
        let mut data = Vec::with_capacity(d * d);
        for (i, line) in lines.enumerate().take(d) {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
            if row.len() != d {
                return Err(bad(format!("row {} has {} values, expected {d}", i + 1, row.len())));
            }
            data.extend(row);
        }
        if data.len() != d * d {
            return Err(bad(format!("expected {d} rows")));
        }
        Ok(AlignmentTransform {
            source_period: from,
            target_period: to,
            r: DMatrix::from_row_slice(d, d, &data),
            shared_vocab: Vec::new(),
            underdetermined: false,
        })
    }
}

/// Consecutive-period transforms over an ordered list of leaves; the map
/// between any two periods is the composition of the steps between them.
#[derive(Debug, Clone)]
pub struct AlignmentChain {
    pub periods: Vec<TimePeriod>,
    /// `steps[i]` maps `periods[i + 1]` into `periods[i]`.
    pub steps: Vec<AlignmentTransform>,
    dim: usize,
}

impl AlignmentChain {
    pub fn fit(sets: &[&EmbeddingSet]) -> Result<Self> {
        let first = sets.first().ok_or_else(|| Error::param("no embedding sets to align"))?;
        let steps = sets
            .windows(2)
            .map(|pair| procrustes_align(pair[1], pair[0]))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlignmentChain {
            periods: sets.iter().map(|s| s.period).collect(),
            steps,
            dim: first.dim(),
        })
    }

    fn index(&self, period: TimePeriod) -> Result<usize> {
        self.periods
            .iter()
            .position(|&p| p == period)
            .ok_or_else(|| Error::UnknownPeriod(period.to_string()))
    }

    /// The transform taking `from`-space vectors into `to`-space.
    pub fn transform(&self, from: TimePeriod, to: TimePeriod) -> Result<AlignmentTransform> {
        let (i, j) = (self.index(from)?, self.index(to)?);
        let mut acc = AlignmentTransform::identity(from, self.dim);
        if i > j {
            for k in (j..i).rev() {
                acc = acc.then(&self.steps[k])?;
            }
        } else {
            for k in i..j {
                acc = acc.then(&self.steps[k].inverse())?;
            }
        }
        Ok(acc)
    }
}

fn leaf_embeddings<'a>(leaves: &[&'a Corpus], kind: Provenance) -> Result<Vec<&'a EmbeddingSet>> {
    leaves.iter().map(|l| l.embeddings(kind)).collect()
}

fn span_between<'a>(leaves: &[&'a Corpus], a: TimePeriod, b: TimePeriod) -> Result<Vec<&'a Corpus>> {
    let pos = |p: TimePeriod| {
        leaves
            .iter()
            .position(|l| l.period() == p)
            .ok_or_else(|| Error::UnknownPeriod(p.to_string()))
    };
    let (i, j) = (pos(a)?, pos(b)?);
    Ok(leaves[i.min(j)..=i.max(j)].to_vec())
}

/// Neighbours in `base`'s space of a word taken from `target`'s space.
/// The query word is kept in the ranking.
#[derive(Debug, Clone)]
pub struct AlignedMostSimilar {
    pub word: String,
    pub k: usize,
    pub target: TimePeriod,
    pub base: TimePeriod,
    pub kind: Provenance,
}

impl AlignedMostSimilar {
    fn run(&self, leaves: &[&Corpus]) -> Result<Vec<Neighbor>> {
        let span = span_between(leaves, self.target, self.base)?;
        let sets = leaf_embeddings(&span, self.kind)?;
        let chain = AlignmentChain::fit(&sets)?;
        let target = sets.iter().find(|s| s.period == self.target).expect("in span");
        let base = sets.iter().find(|s| s.period == self.base).expect("in span");
        let v = target.vector(&self.word)?;
        let mapped = chain.transform(self.target, self.base)?.apply(&v);
        nearest(base, &mapped, self.k, None)
    }
}

impl Operation for AlignedMostSimilar {
    type Output = Vec<Neighbor>;

    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        self.run(&[corpus])
    }

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.run(&corpus.leaves())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePoint {
    /// 1 − cosine to the starting period; `None` when the word is missing.
    pub distance: Option<f64>,
    pub out_of_vocabulary: bool,
}

/// Cosine distance of a word's aligned vector from its starting-period vector.
#[derive(Debug, Clone)]
pub struct SemanticChange {
    pub word: String,
    pub range: Option<TimePeriod>,
    pub kind: Provenance,
}

impl SemanticChange {
    fn run(&self, leaves: Vec<&Corpus>) -> Result<TimeSeries<ChangePoint>> {
        let sets = leaf_embeddings(&leaves, self.kind)?;
        let chain = AlignmentChain::fit(&sets)?;
        let start = sets[0];
        let origin = start.vector(&self.word).ok();
        let mut series = TimeSeries::new(ValueKind::Ratio);
        for set in &sets {
            let point = match (&origin, set.vector(&self.word)) {
                (Some(o), Ok(v)) => {
                    let mapped = chain.transform(set.period, start.period)?.apply(&v);
                    ChangePoint {
                        distance: Some((1.0 - cosine(&mapped, o)).max(0.0)),
                        out_of_vocabulary: false,
                    }
                }
                _ => ChangePoint {
                    distance: None,
                    out_of_vocabulary: true,
                },
            };
            series.push(set.period, point);
        }
        Ok(series)
    }
}

impl Operation for SemanticChange {
    type Output = TimeSeries<ChangePoint>;

    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        self.run(crate::corpus::CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.run(corpus.leaves_in(self.range)?)
    }
}

/// `rank,lemma,cosine` rows for a neighbour list; cosines to six decimals.
pub fn neighbors_csv(neighbors: &[Neighbor]) -> String {
    let mut out = String::from("rank,lemma,cosine\n");
    for (i, n) in neighbors.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            crate::report::csv_field(&n.word),
            format_fixed(n.score, 6)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::VocabIndex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(period: TimePeriod, words: &[&str], m: DMatrix<f64>) -> EmbeddingSet {
        EmbeddingSet {
            period,
            vocab: VocabIndex::from(words.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
            matrix: m,
            provenance: Provenance::Svd,
            seed: None,
            context: None,
        }
    }

    fn p(y: i32) -> TimePeriod {
        TimePeriod::decade_of(y)
    }

    #[test]
    fn self_alignment_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DMatrix::from_fn(10, 4, |_, _| rng.gen_range(-1.0..1.0));
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let a = set(p(1930), &refs, m.clone());
        let b = set(p(1940), &refs, m);
        let t = procrustes_align(&a, &b).unwrap();
        assert!((t.r - DMatrix::<f64>::identity(4, 4)).amax() < 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = set(p(1930), &["x"], DMatrix::zeros(1, 2));
        let b = set(p(1940), &["x"], DMatrix::zeros(1, 3));
        assert!(procrustes_align(&a, &b).is_err());
        let c = set(p(1940), &["y"], DMatrix::zeros(1, 2));
        assert!(procrustes_align(&a, &c).is_err());
    }

    #[test]
    fn chain_composes_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let words: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let sets: Vec<EmbeddingSet> = [1930, 1940, 1950]
            .iter()
            .map(|&y| set(p(y), &refs, DMatrix::from_fn(8, 3, |_, _| rng.gen_range(-1.0..1.0))))
            .collect();
        let refs: Vec<&EmbeddingSet> = sets.iter().collect();
        let chain = AlignmentChain::fit(&refs).unwrap();
        let fwd = chain.transform(p(1950), p(1930)).unwrap();
        let back = chain.transform(p(1930), p(1950)).unwrap();
        assert!((&fwd.r * &back.r - DMatrix::<f64>::identity(3, 3)).amax() < 1e-10);
        assert!(fwd.orthogonality_error() < 1e-8);
        let same = chain.transform(p(1940), p(1940)).unwrap();
        assert_eq!(same.r, DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn transform_text_round_trip() {
        let t = AlignmentTransform {
            source_period: p(1980),
            target_period: p(1930),
            r: DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            shared_vocab: vec![],
            underdetermined: false,
        };
        let text = t.to_text();
        assert!(text.starts_with("d=2 from=1980-1989 to=1930-1939\n"));
        let back = AlignmentTransform::parse_text(&text, Path::new("t.txt")).unwrap();
        assert_eq!(back, t);
    }
}
