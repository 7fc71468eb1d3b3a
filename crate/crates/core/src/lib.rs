//! Diachronic corpus analytics: period-partitioned corpora, vocabulary
//! statistics, divergence measures, per-period embeddings and their alignment.

pub mod alignment;
pub mod config;
pub mod corpus;
pub mod dictionary;
pub mod divergence;
pub mod embeddings;
pub mod error;
pub mod lexicon;
pub mod operation;
pub mod orthography;
pub mod period;
pub mod preprocess;
pub mod registry;
pub mod report;
pub mod store;

pub use corpus::{Corpus, CorpusNode, DiachronicCorpus};
pub use error::{Error, Result};
pub use operation::{Creator, Operation, PerPeriod, PeriodOperation, TimeSeries, ValueKind};
pub use period::{Bucketing, TimePeriod};
