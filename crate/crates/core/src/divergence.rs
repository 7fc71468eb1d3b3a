//! Jaccard and Jensen-Shannon comparisons between period vocabularies.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusNode, DiachronicCorpus};
use crate::error::{Error, Result};
use crate::lexicon::Vocabulary;
use crate::operation::{Operation, TimeSeries, ValueKind};
use crate::period::TimePeriod;
use crate::report::{csv_field, format_real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Jaccard,
    Jsd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceMatrix {
    pub periods: Vec<TimePeriod>,
    pub values: Vec<Vec<f64>>,
    pub metric: Metric,
}

impl DivergenceMatrix {
    /// Fills the upper triangle with `cell` and mirrors it.
    fn build(
        vocabs: &[&Vocabulary],
        metric: Metric,
        cell: impl Fn(&Vocabulary, &Vocabulary) -> Result<f64>,
    ) -> Result<Self> {
        let n = vocabs.len();
        let mut values = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = cell(vocabs[i], vocabs[j])?;
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        Ok(DivergenceMatrix {
            periods: vocabs.iter().map(|v| v.period).collect(),
            values,
            metric,
        })
    }

    pub fn get(&self, a: TimePeriod, b: TimePeriod) -> Option<f64> {
        let i = self.periods.iter().position(|&p| p == a)?;
        let j = self.periods.iter().position(|&p| p == b)?;
        Some(self.values[i][j])
    }

    /// Period labels as header row and first column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("period");
        for p in &self.periods {
            out.push(',');
            out.push_str(&p.to_string());
        }
        out.push('\n');
        for (p, row) in self.periods.iter().zip(&self.values) {
            out.push_str(&p.to_string());
            for v in row {
                out.push(',');
                out.push_str(&format_real(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// |A ∩ B| / |A ∪ B| over the vocabulary word sets.
pub fn jaccard(a: &Vocabulary, b: &Vocabulary) -> Result<f64> {
    let inter = a.words().filter(|w| b.contains(w)).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return Err(Error::UndefinedJaccard {
            a: a.period.to_string(),
            b: b.period.to_string(),
        });
    }
    Ok(inter as f64 / union as f64)
}

fn check_nonempty(v: &Vocabulary) -> Result<()> {
    if v.token_total == 0 {
        Err(Error::EmptyVocabulary(v.period.to_string()))
    } else {
        Ok(())
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Aligned (p, q) probabilities over the union vocabulary, in word order.
fn union_distribution<'a>(a: &'a Vocabulary, b: &'a Vocabulary) -> Vec<(&'a str, f64, f64)> {
    let ta = a.token_total as f64;
    let tb = b.token_total as f64;
    let mut out: Vec<(&str, f64, f64)> = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.entries.iter().peekable();
    let mut ib = b.entries.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((wa, &fa)), Some((wb, &fb))) => match wa.cmp(wb) {
                std::cmp::Ordering::Less => {
                    out.push((wa.as_str(), fa as f64 / ta, 0.0));
                    ia.next();
                }
                std::cmp::Ordering::Greater => {
                    out.push((wb.as_str(), 0.0, fb as f64 / tb));
                    ib.next();
                }
                std::cmp::Ordering::Equal => {
                    out.push((wa.as_str(), fa as f64 / ta, fb as f64 / tb));
                    ia.next();
                    ib.next();
                }
            },
            (Some((wa, &fa)), None) => {
                out.push((wa.as_str(), fa as f64 / ta, 0.0));
                ia.next();
            }
            (None, Some((wb, &fb))) => {
                out.push((wb.as_str(), 0.0, fb as f64 / tb));
                ib.next();
            }
            (None, None) => break,
        }
    }
    out
}

/// JSD in bits: H(m) − (H(p) + H(q)) / 2 with m = (p + q) / 2.
pub fn jsd(a: &Vocabulary, b: &Vocabulary) -> Result<f64> {
    check_nonempty(a)?;
    check_nonempty(b)?;
    let (mut hm, mut hp, mut hq) = (0.0, 0.0, 0.0);
    for (_, p, q) in union_distribution(a, b) {
        hm -= plogp(0.5 * (p + q));
        hp -= plogp(p);
        hq -= plogp(q);
    }
    // rounding can leave a tiny negative residue for identical inputs
    Ok((hm - 0.5 * (hp + hq)).max(0.0))
}

fn contribution(p: f64, q: f64) -> f64 {
    let m = 0.5 * (p + q);
    let term = |x: f64| if x > 0.0 { x * (x / m).log2() } else { 0.0 };
    0.5 * (term(p) + term(q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub lemma: String,
    /// Negative when the word is relatively more frequent in `period_a`.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributionRanking {
    pub period_a: TimePeriod,
    pub period_b: TimePeriod,
    pub pairs: Vec<Contribution>,
}

impl ContributionRanking {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lemma,contribution,side\n");
        for c in &self.pairs {
            let side = if c.contribution < 0.0 {
                self.period_a
            } else {
                self.period_b
            };
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&c.lemma),
                format_real(c.contribution),
                side
            ));
        }
        out
    }
}

/// Signed per-word JSD terms ranked by magnitude. `top_k = None` keeps the
/// whole union vocabulary.
pub fn jsd_contributions(
    a: &Vocabulary,
    b: &Vocabulary,
    top_k: Option<usize>,
) -> Result<ContributionRanking> {
    if top_k == Some(0) {
        return Err(Error::param("top_k must be at least 1"));
    }
    check_nonempty(a)?;
    check_nonempty(b)?;
    let mut pairs: Vec<Contribution> = union_distribution(a, b)
        .into_iter()
        .map(|(w, p, q)| {
            let c = contribution(p, q);
            Contribution {
                lemma: w.to_string(),
                contribution: if p > q { -c } else { c },
            }
        })
        .collect();
    pairs.sort_by(|x, y| {
        y.contribution
            .abs()
            .total_cmp(&x.contribution.abs())
            .then_with(|| x.lemma.cmp(&y.lemma))
    });
    if let Some(k) = top_k {
        pairs.truncate(k);
    }
    Ok(ContributionRanking {
        period_a: a.period,
        period_b: b.period,
        pairs,
    })
}

fn leaf_vocabs(leaves: &[&Corpus]) -> Result<Vec<Vocabulary>> {
    leaves.iter().map(|l| l.vocabulary().cloned()).collect()
}

fn matrix_for(leaves: Vec<&Corpus>, metric: Metric) -> Result<DivergenceMatrix> {
    let owned = leaf_vocabs(&leaves)?;
    let vocabs: Vec<&Vocabulary> = owned.iter().collect();
    match metric {
        Metric::Jaccard => DivergenceMatrix::build(&vocabs, metric, jaccard),
        Metric::Jsd => DivergenceMatrix::build(&vocabs, metric, jsd),
    }
}

/// Jaccard matrix between the period vocabularies in range.
#[derive(Debug, Clone, Default)]
pub struct VocabularySimilarity {
    pub range: Option<TimePeriod>,
}

impl Operation for VocabularySimilarity {
    type Output = DivergenceMatrix;
    fn on_corpus(&self, corpus: &Corpus) -> Result<DivergenceMatrix> {
        matrix_for(CorpusNode::leaves_in_leaf(corpus, self.range)?, Metric::Jaccard)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<DivergenceMatrix> {
        matrix_for(corpus.leaves_in(self.range)?, Metric::Jaccard)
    }
}

/// JSD matrix between the period vocabularies in range.
#[derive(Debug, Clone, Default)]
pub struct VocabularyDistance {
    pub range: Option<TimePeriod>,
}

impl Operation for VocabularyDistance {
    type Output = DivergenceMatrix;
    fn on_corpus(&self, corpus: &Corpus) -> Result<DivergenceMatrix> {
        matrix_for(CorpusNode::leaves_in_leaf(corpus, self.range)?, Metric::Jsd)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<DivergenceMatrix> {
        matrix_for(corpus.leaves_in(self.range)?, Metric::Jsd)
    }
}

#[derive(Debug, Clone)]
pub struct JsdContributions {
    pub period_a: TimePeriod,
    pub period_b: TimePeriod,
    pub top_k: Option<usize>,
}

impl JsdContributions {
    fn run(&self, leaves: &[&Corpus]) -> Result<ContributionRanking> {
        let find = |p: TimePeriod| {
            leaves
                .iter()
                .find(|l| l.period() == p)
                .ok_or_else(|| Error::UnknownPeriod(p.to_string()))
        };
        jsd_contributions(
            find(self.period_a)?.vocabulary()?,
            find(self.period_b)?.vocabulary()?,
            self.top_k,
        )
    }
}

impl Operation for JsdContributions {
    type Output = ContributionRanking;
    fn on_corpus(&self, corpus: &Corpus) -> Result<ContributionRanking> {
        self.run(&[corpus])
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<ContributionRanking> {
        self.run(&corpus.leaves())
    }
}

/// |V_base ∩ V_t| for the base period and every later period in range.
#[derive(Debug, Clone)]
pub struct SurvivedWords {
    pub base: TimePeriod,
    pub range: Option<TimePeriod>,
}

impl SurvivedWords {
    fn run(&self, leaves: &[&Corpus]) -> Result<TimeSeries<u64>> {
        let base = leaves
            .iter()
            .find(|l| l.period() == self.base)
            .ok_or_else(|| Error::param(format!("base period {} not in range", self.base)))?
            .vocabulary()?;
        let mut series = TimeSeries::new(ValueKind::Count);
        for leaf in leaves.iter().filter(|l| l.period() >= self.base) {
            let v = leaf.vocabulary()?;
            series.push(leaf.period(), base.words().filter(|w| v.contains(w)).count() as u64);
        }
        Ok(series)
    }
}

impl Operation for SurvivedWords {
    type Output = TimeSeries<u64>;
    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        self.run(&CorpusNode::leaves_in_leaf(corpus, self.range)?)
    }
    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.run(&corpus.leaves_in(self.range)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Level;
    use approx::assert_abs_diff_eq;

    fn vocab(year: i32, pairs: &[(&str, u64)]) -> Vocabulary {
        Vocabulary::new(
            TimePeriod::decade_of(year),
            Level::Lemma,
            pairs.iter().map(|&(w, f)| (w.to_string(), f)).collect(),
        )
    }

    #[test]
    fn jaccard_cases() {
        let a = vocab(1930, &[("a", 1), ("b", 1), ("c", 1)]);
        let b = vocab(1980, &[("b", 4), ("c", 1), ("d", 1)]);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &b).unwrap(), 0.5);
        assert_eq!(jaccard(&a, &vocab(1990, &[("z", 1)])).unwrap(), 0.0);
        let e = vocab(1940, &[]);
        assert!(matches!(jaccard(&e, &e), Err(Error::UndefinedJaccard { .. })));
    }

    #[test]
    fn jsd_cases() {
        let p = vocab(1930, &[("a", 1), ("b", 1)]);
        assert_eq!(jsd(&p, &p).unwrap(), 0.0);
        let a = vocab(1930, &[("a", 1)]);
        let b = vocab(1980, &[("b", 1)]);
        assert_eq!(jsd(&a, &b).unwrap(), 1.0);
        // m = {a: .75, b: .25}; H(m) − (1 + 0)/2
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2()) - 0.5;
        assert_abs_diff_eq!(jsd(&p, &a).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(jsd(&p, &a).unwrap(), 0.3113, epsilon = 1e-4);
        assert!(matches!(jsd(&vocab(1940, &[]), &a), Err(Error::EmptyVocabulary(_))));
    }

    #[test]
    fn contributions_of_disjoint_singletons() {
        let a = vocab(1930, &[("a", 1)]);
        let b = vocab(1980, &[("b", 1)]);
        let r = jsd_contributions(&a, &b, None).unwrap();
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.pairs[0], Contribution { lemma: "a".into(), contribution: -0.5 });
        assert_eq!(r.pairs[1], Contribution { lemma: "b".into(), contribution: 0.5 });
        assert!(jsd_contributions(&a, &b, Some(0)).is_err());
        assert_eq!(r.to_csv(), "lemma,contribution,side\na,-0.5000000000,1930-1939\nb,0.5000000000,1980-1989\n");
    }

    #[test]
    fn identical_distributions_contribute_nothing() {
        let p = vocab(1930, &[("a", 3), ("b", 1)]);
        let r = jsd_contributions(&p, &p, None).unwrap();
        assert!(r.pairs.iter().all(|c| c.contribution == 0.0));
    }

    #[test]
    fn matrix_csv_layout() {
        let m = DivergenceMatrix::build(
            &[&vocab(1930, &[("a", 1)]), &vocab(1980, &[("a", 1), ("b", 1)])],
            Metric::Jaccard,
            jaccard,
        )
        .unwrap();
        assert_eq!(
            m.to_csv(),
            "period,1930-1939,1980-1989\n1930-1939,1.0000000000,0.5000000000\n1980-1989,0.5000000000,1.0000000000\n"
        );
    }
}
