//! The operation contract: every analysis defines what it does on a single
//! period leaf and on a composite, and the tree picks the right one.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, CorpusNode, DiachronicCorpus};
use crate::error::Result;
use crate::period::TimePeriod;

/// A read-only analysis over the corpus tree.
pub trait Operation {
    type Output;

    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output>;

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output>;
}

/// Builds an artifact and caches it on each leaf it reaches.
pub trait Creator {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()>;

    fn on_diachronic(&self, corpus: &mut DiachronicCorpus) -> Result<()> {
        for child in corpus.children_mut() {
            child.apply(self)?;
        }
        Ok(())
    }
}

/// An operation that yields one value per period.
pub trait PeriodOperation {
    type Value;

    fn kind(&self) -> ValueKind;

    fn on_period(&self, corpus: &Corpus) -> Result<Self::Value>;
}

/// Lifts a [`PeriodOperation`] to a time series over the leaves covered by
/// `range` (all leaves when unset).
#[derive(Debug, Clone)]
pub struct PerPeriod<P> {
    pub op: P,
    pub range: Option<TimePeriod>,
}

impl<P> PerPeriod<P> {
    pub fn new(op: P) -> Self {
        PerPeriod { op, range: None }
    }

    pub fn within(op: P, range: Option<TimePeriod>) -> Self {
        PerPeriod { op, range }
    }
}

impl<P: PeriodOperation> Operation for PerPeriod<P> {
    type Output = TimeSeries<P::Value>;

    fn on_corpus(&self, corpus: &Corpus) -> Result<Self::Output> {
        let leaves = CorpusNode::leaves_in_leaf(corpus, self.range)?;
        self.collect(leaves)
    }

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<Self::Output> {
        self.collect(corpus.leaves_in(self.range)?)
    }
}

impl<P: PeriodOperation> PerPeriod<P> {
    fn collect(&self, leaves: Vec<&Corpus>) -> Result<TimeSeries<P::Value>> {
        let entries = leaves
            .into_iter()
            .map(|leaf| {
                Ok(SeriesEntry {
                    period: leaf.period(),
                    value: self.op.on_period(leaf)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(TimeSeries {
            entries,
            kind: self.op.kind(),
        })
    }
}

impl CorpusNode {
    pub(crate) fn leaves_in_leaf(corpus: &Corpus, range: Option<TimePeriod>) -> Result<Vec<&Corpus>> {
        match range {
            Some(r) if !r.covers(&corpus.period()) => {
                Err(crate::error::Error::UnknownPeriod(r.to_string()))
            }
            _ => Ok(vec![corpus]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    Count,
    Ratio,
    Frequency,
    Set,
    MatrixRow,
    Boolean,
    Ranking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry<T> {
    pub period: TimePeriod,
    pub value: T,
}

/// Values ordered by period, one entry per queried period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub entries: Vec<SeriesEntry<T>>,
    pub kind: ValueKind,
}

impl<T> TimeSeries<T> {
    pub fn new(kind: ValueKind) -> Self {
        TimeSeries {
            entries: Vec::new(),
            kind,
        }
    }

    pub fn push(&mut self, period: TimePeriod, value: T) {
        self.entries.push(SeriesEntry { period, value });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn periods(&self) -> impl Iterator<Item = TimePeriod> + '_ {
        self.entries.iter().map(|e| e.period)
    }

    pub fn get(&self, period: TimePeriod) -> Option<&T> {
        self.entries.iter().find(|e| e.period == period).map(|e| &e.value)
    }

    /// The value of a one-period series.
    pub fn single(&self) -> Option<&T> {
        match self.entries.as_slice() {
            [only] => Some(&only.value),
            _ => None,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> TimeSeries<U> {
        TimeSeries {
            entries: self
                .entries
                .into_iter()
                .map(|e| SeriesEntry {
                    period: e.period,
                    value: f(e.value),
                })
                .collect(),
            kind: self.kind,
        }
    }
}

/// Total number of documents, summed recursively over the tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct DocumentCount;

impl Operation for DocumentCount {
    type Output = u64;

    fn on_corpus(&self, corpus: &Corpus) -> Result<u64> {
        Ok(corpus.documents().len() as u64)
    }

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<u64> {
        let mut total = 0;
        for child in corpus {
            total += child.perform(self)?;
        }
        Ok(total)
    }
}

/// Total raw token count, summed recursively over the tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenCount;

impl Operation for TokenCount {
    type Output = u64;

    fn on_corpus(&self, corpus: &Corpus) -> Result<u64> {
        Ok(corpus.stats().token_count_raw)
    }

    fn on_diachronic(&self, corpus: &DiachronicCorpus) -> Result<u64> {
        let mut total = 0;
        for child in corpus {
            total += child.perform(self)?;
        }
        Ok(total)
    }
}
