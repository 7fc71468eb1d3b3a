//! The composite corpus tree: period leaves ([`Corpus`]) grouped under
//! [`DiachronicCorpus`] nodes, and ingestion from a manifest.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embeddings::{CooccurrenceMatrix, EmbeddingSet, PpmiMatrix, Provenance};
use crate::error::{Error, Result};
use crate::lexicon::{Level, NgramTable, Vocabulary};
use crate::operation::{Creator, Operation};
use crate::period::{Bucketing, TimePeriod};
use crate::preprocess::{
    filter_vocabulary, preprocess_document, Analyzer, FilterConfig,
    LookupAnalyzer, NormalizeConfig, ProcessedDocument,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    #[serde(rename = "date")]
    pub publication_date: NaiveDate,
    #[serde(rename = "source")]
    pub source_tag: String,
    pub path: PathBuf,
}

impl DocumentRecord {
    pub fn year(&self) -> i32 {
        self.publication_date.year()
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    date: String,
    #[serde(default)]
    source: String,
    path: Option<PathBuf>,
}

fn parse_date(id: &str, date: &str) -> Result<NaiveDate> {
    let date = date.trim();
    NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .or_else(|_| chrono::DateTime::parse_from_rfc3339(date).map(|d| d.date_naive()))
        .or_else(|_| {
            chrono::NaiveDateTime::parse_from_str(date, "%Y-%m-%dT%H:%M:%S").map(|d| d.date())
        })
        .map_err(|_| Error::InvalidDate {
            id: id.to_string(),
            date: date.to_string(),
        })
}

/// Parses a manifest: a JSON array of `{"id", "date", "source", "path"}`.
/// A missing `path` defaults to `docs/<id>.txt`.
pub fn parse_manifest(json: &str) -> Result<Vec<DocumentRecord>> {
    let raw: Vec<RawRecord> = serde_json::from_str(json).map_err(|source| Error::Json {
        context: "manifest".into(),
        source,
    })?;
    if raw.is_empty() {
        return Err(Error::EmptyManifest);
    }
    let mut seen = HashSet::new();
    raw.into_iter()
        .map(|r| {
            if r.id.is_empty() {
                return Err(Error::Validation("manifest entry with empty id".into()));
            }
            if !seen.insert(r.id.clone()) {
                return Err(Error::Ingest {
                    id: r.id,
                    reason: "duplicate id in manifest".into(),
                });
            }
            let publication_date = parse_date(&r.id, &r.date)?;
            let path = r
                .path
                .unwrap_or_else(|| PathBuf::from(format!("docs/{}.txt", r.id)));
            Ok(DocumentRecord {
                id: r.id,
                publication_date,
                source_tag: r.source,
                path,
            })
        })
        .collect()
}

/// Descriptive statistics of one period (or, aggregated, of a whole corpus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CorpusStats {
    pub document_count: u64,
    pub token_count_raw: u64,
    pub token_count_filtered: u64,
    pub unique_surface_count: u64,
    pub unique_lemma_count: u64,
    pub unique_lemma_count_filtered: u64,
    pub avg_tokens_per_document: f64,
}

impl CorpusStats {
    /// Field labels in report order, paired with their values.
    pub fn table_rows(&self) -> Vec<(&'static str, serde_json::Value)> {
        vec![
            ("The number of documents", self.document_count.into()),
            ("The number of words before filtering", self.token_count_raw.into()),
            ("The number of words after filtering", self.token_count_filtered.into()),
            ("The number of unique surface level words", self.unique_surface_count.into()),
            ("The number of unique stems", self.unique_lemma_count.into()),
            ("The number of unique stems after filtering", self.unique_lemma_count_filtered.into()),
            ("Average token count per document", self.avg_tokens_per_document.into()),
        ]
    }
}

fn average(total: u64, count: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}

/// Statistics over a set of processed documents treated as one unit, with
/// the threshold applied to each `(raw count, lemma counts)` group separately.
fn compute_stats(groups: &[&[ProcessedDocument]], filter: &FilterConfig) -> CorpusStats {
    let mut surfaces = BTreeSet::new();
    let mut lemmas = BTreeSet::new();
    let mut kept = BTreeSet::new();
    let mut stats = CorpusStats::default();
    for docs in groups {
        let raw: u64 = docs.iter().map(|d| d.token_count() as u64).sum();
        let counts = crate::lexicon::count_tokens(docs, Level::Lemma);
        let filtered = filter_vocabulary(&counts, raw, filter);
        stats.document_count += docs.len() as u64;
        stats.token_count_raw += raw;
        stats.token_count_filtered += filtered.values().sum::<u64>();
        for d in docs.iter() {
            surfaces.extend(d.surfaces.iter().cloned());
        }
        lemmas.extend(counts.into_keys());
        kept.extend(filtered.into_keys());
    }
    stats.unique_surface_count = surfaces.len() as u64;
    stats.unique_lemma_count = lemmas.len() as u64;
    stats.unique_lemma_count_filtered = kept.len() as u64;
    stats.avg_tokens_per_document = average(stats.token_count_raw, stats.document_count);
    stats
}

/// Artifacts produced by creator operations and cached on a leaf.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub vocabulary: Option<Vocabulary>,
    pub surface_vocabulary: Option<Vocabulary>,
    pub ngrams: BTreeMap<(usize, Level), NgramTable>,
    pub cooccurrence: Option<CooccurrenceMatrix>,
    pub ppmi: Option<PpmiMatrix>,
    pub embeddings: BTreeMap<Provenance, EmbeddingSet>,
}

/// A leaf of the tree: every document of one time period.
#[derive(Debug, Clone)]
pub struct Corpus {
    period: TimePeriod,
    documents: Vec<DocumentRecord>,
    stats: CorpusStats,
    filter: FilterConfig,
    processed: Option<Vec<ProcessedDocument>>,
    pub artifacts: Artifacts,
}

impl Corpus {
    /// A leaf whose documents have already been preprocessed.
    pub fn from_processed(
        period: TimePeriod,
        documents: Vec<DocumentRecord>,
        processed: Vec<ProcessedDocument>,
        filter: FilterConfig,
    ) -> Self {
        let stats = compute_stats(&[&processed], &filter);
        Corpus {
            period,
            documents,
            stats,
            filter,
            processed: Some(processed),
            artifacts: Artifacts::default(),
        }
    }

    /// Convenience constructor for in-memory text, one string per document;
    /// the default normalizer and `analyzer` are applied.
    pub fn from_texts(period: TimePeriod, texts: &[&str], analyzer: &dyn Analyzer) -> Self {
        let normalize = NormalizeConfig::default();
        let date = NaiveDate::from_ymd_opt(period.start_year, 1, 1).expect("valid year");
        let mut records = Vec::with_capacity(texts.len());
        let mut processed = Vec::with_capacity(texts.len());
        for (i, text) in texts.iter().enumerate() {
            let id = format!("{}-{i}", period.start_year);
            processed.push(preprocess_document(&id, text, &normalize, analyzer));
            records.push(DocumentRecord {
                path: PathBuf::from(format!("docs/{id}.txt")),
                id,
                publication_date: date,
                source_tag: String::new(),
            });
        }
        Self::from_processed(period, records, processed, FilterConfig::default())
    }

    /// A leaf restored without its documents' token streams.
    pub fn from_parts(
        period: TimePeriod,
        documents: Vec<DocumentRecord>,
        stats: CorpusStats,
        filter: FilterConfig,
    ) -> Self {
        Corpus {
            period,
            documents,
            stats,
            filter,
            processed: None,
            artifacts: Artifacts::default(),
        }
    }

    pub fn period(&self) -> TimePeriod {
        self.period
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.documents
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn filter(&self) -> &FilterConfig {
        &self.filter
    }

    pub fn set_processed(&mut self, processed: Vec<ProcessedDocument>) {
        self.processed = Some(processed);
    }

    pub fn processed(&self) -> Result<&[ProcessedDocument]> {
        self.processed
            .as_deref()
            .ok_or_else(|| self.missing("preprocessed documents", "ingest"))
    }

    pub fn perform<O: Operation + ?Sized>(&self, op: &O) -> Result<O::Output> {
        op.on_corpus(self)
    }

    pub fn apply<C: Creator + ?Sized>(&mut self, creator: &C) -> Result<()> {
        creator.on_corpus(self)
    }

    pub(crate) fn missing(&self, artifact: &'static str, hint: &'static str) -> Error {
        Error::MissingArtifact {
            artifact,
            period: self.period.to_string(),
            hint,
        }
    }

    pub fn vocabulary(&self) -> Result<&Vocabulary> {
        self.artifacts
            .vocabulary
            .as_ref()
            .ok_or_else(|| self.missing("vocabulary", "ingest"))
    }

    pub fn vocabulary_at(&self, level: Level) -> Result<&Vocabulary> {
        match level {
            Level::Lemma => self.vocabulary(),
            Level::Surface => self
                .artifacts
                .surface_vocabulary
                .as_ref()
                .ok_or_else(|| self.missing("surface vocabulary", "ingest")),
        }
    }

    pub fn ngrams(&self, order: usize, level: Level) -> Result<&NgramTable> {
        crate::lexicon::check_order(order)?;
        self.artifacts
            .ngrams
            .get(&(order, level))
            .ok_or_else(|| self.missing("n-gram table", "ingest"))
    }

    pub fn cooccurrence(&self) -> Result<&CooccurrenceMatrix> {
        self.artifacts
            .cooccurrence
            .as_ref()
            .ok_or_else(|| self.missing("co-occurrence matrix", "embed ppmi"))
    }

    pub fn ppmi(&self) -> Result<&PpmiMatrix> {
        self.artifacts
            .ppmi
            .as_ref()
            .ok_or_else(|| self.missing("PPMI matrix", "embed ppmi"))
    }

    pub fn embeddings(&self, kind: Provenance) -> Result<&EmbeddingSet> {
        self.artifacts.embeddings.get(&kind).ok_or_else(|| match kind {
            Provenance::Svd => self.missing("SVD embeddings", "embed svd"),
            Provenance::Cbow => self.missing("CBOW embeddings", "embed cbow"),
        })
    }
}

/// An inner node: an ordered, non-overlapping group of sub-corpora.
#[derive(Debug, Clone)]
pub struct DiachronicCorpus {
    period: TimePeriod,
    children: Vec<CorpusNode>,
}

impl DiachronicCorpus {
    pub fn new(mut children: Vec<CorpusNode>) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::param("a diachronic corpus needs at least one child"));
        }
        children.sort_by_key(|c| c.period());
        for pair in children.windows(2) {
            if pair[0].period().overlaps(&pair[1].period()) {
                return Err(Error::param(format!(
                    "child periods {} and {} overlap",
                    pair[0].period(),
                    pair[1].period()
                )));
            }
        }
        let period = children
            .iter()
            .map(CorpusNode::period)
            .reduce(|a, b| a.span(&b))
            .expect("non-empty");
        Ok(DiachronicCorpus { period, children })
    }

    pub fn period(&self) -> TimePeriod {
        self.period
    }

    pub fn children(&self) -> &[CorpusNode] {
        &self.children
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CorpusNode> {
        self.children.iter()
    }

    /// Leaves in ascending period order.
    pub fn leaves(&self) -> Vec<&Corpus> {
        let mut out = Vec::new();
        for c in &self.children {
            c.collect_leaves(&mut out);
        }
        out
    }

    /// Leaves covered by `range`; all leaves when `range` is `None`.
    pub fn leaves_in(&self, range: Option<TimePeriod>) -> Result<Vec<&Corpus>> {
        let leaves: Vec<&Corpus> = self
            .leaves()
            .into_iter()
            .filter(|l| range.is_none_or(|r| r.covers(&l.period())))
            .collect();
        if leaves.is_empty() {
            return Err(Error::UnknownPeriod(
                range.map_or_else(|| self.period.to_string(), |r| r.to_string()),
            ));
        }
        Ok(leaves)
    }

    pub fn perform<O: Operation + ?Sized>(&self, op: &O) -> Result<O::Output> {
        op.on_diachronic(self)
    }

    pub fn apply<C: Creator + ?Sized>(&mut self, creator: &C) -> Result<()> {
        creator.on_diachronic(self)
    }

    pub(crate) fn children_mut(&mut self) -> &mut [CorpusNode] {
        &mut self.children
    }
}

impl<'a> IntoIterator for &'a DiachronicCorpus {
    type Item = &'a CorpusNode;
    type IntoIter = std::slice::Iter<'a, CorpusNode>;
    fn into_iter(self) -> Self::IntoIter {
        self.children.iter()
    }
}

// leaves dominate every tree, so boxing them would only add indirection
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum CorpusNode {
    Leaf(Corpus),
    Composite(DiachronicCorpus),
}

impl From<Corpus> for CorpusNode {
    fn from(c: Corpus) -> Self {
        CorpusNode::Leaf(c)
    }
}

impl From<DiachronicCorpus> for CorpusNode {
    fn from(d: DiachronicCorpus) -> Self {
        CorpusNode::Composite(d)
    }
}

impl CorpusNode {
    pub fn period(&self) -> TimePeriod {
        match self {
            CorpusNode::Leaf(c) => c.period(),
            CorpusNode::Composite(d) => d.period(),
        }
    }

    /// Double dispatch: leaf behaviour on leaves, composite behaviour on composites.
    pub fn perform<O: Operation + ?Sized>(&self, op: &O) -> Result<O::Output> {
        match self {
            CorpusNode::Leaf(c) => op.on_corpus(c),
            CorpusNode::Composite(d) => op.on_diachronic(d),
        }
    }

    pub fn apply<C: Creator + ?Sized>(&mut self, creator: &C) -> Result<()> {
        match self {
            CorpusNode::Leaf(c) => creator.on_corpus(c),
            CorpusNode::Composite(d) => creator.on_diachronic(d),
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Corpus>) {
        match self {
            CorpusNode::Leaf(c) => out.push(c),
            CorpusNode::Composite(d) => {
                for c in &d.children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    pub fn leaves(&self) -> Vec<&Corpus> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    pub fn leaves_mut(&mut self) -> Vec<&mut Corpus> {
        fn walk<'a>(node: &'a mut CorpusNode, out: &mut Vec<&'a mut Corpus>) {
            match node {
                CorpusNode::Leaf(c) => out.push(c),
                CorpusNode::Composite(d) => {
                    for c in d.children.iter_mut() {
                        walk(c, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn find_leaf(&self, period: TimePeriod) -> Result<&Corpus> {
        self.leaves()
            .into_iter()
            .find(|l| l.period() == period)
            .ok_or_else(|| Error::UnknownPeriod(period.to_string()))
    }

    pub fn leaves_in(&self, range: Option<TimePeriod>) -> Result<Vec<&Corpus>> {
        match self {
            CorpusNode::Leaf(c) => {
                if range.is_none_or(|r| r.covers(&c.period())) {
                    Ok(vec![c])
                } else {
                    Err(Error::UnknownPeriod(range.expect("checked").to_string()))
                }
            }
            CorpusNode::Composite(d) => d.leaves_in(range),
        }
    }

    /// Aggregate statistics with per-period thresholds; unique counts are
    /// taken over the union of periods.
    pub fn aggregate_stats(&self) -> Option<CorpusStats> {
        let leaves = self.leaves();
        let processed: Option<Vec<&[ProcessedDocument]>> =
            leaves.iter().map(|l| l.processed.as_deref()).collect();
        let filter = leaves.first()?.filter.clone();
        processed.map(|groups| compute_stats(&groups, &filter))
    }
}

/// Everything ingestion needs besides the manifest.
#[derive(Clone)]
pub struct IngestOptions {
    pub bucketing: Bucketing,
    pub filter: FilterConfig,
    pub normalize: NormalizeConfig,
    pub analyzer: Arc<dyn Analyzer>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            bucketing: Bucketing::Decades,
            filter: FilterConfig::default(),
            normalize: NormalizeConfig::default(),
            analyzer: Arc::new(LookupAnalyzer::new()),
        }
    }
}

impl std::fmt::Debug for IngestOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IngestOptions")
            .field("bucketing", &self.bucketing)
            .field("filter", &self.filter)
            .field("normalize", &self.normalize)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutcome {
    /// Always a composite, even for a single period.
    pub tree: DiachronicCorpus,
    /// Documents whose year falls outside every bucket.
    pub unassigned: Vec<DocumentRecord>,
}

/// Builds the corpus tree from manifest records, reading each document with
/// `read`. Documents are preprocessed in parallel; output order follows the
/// manifest within each period.
pub fn build_corpus_tree_with<F>(
    records: Vec<DocumentRecord>,
    options: &IngestOptions,
    read: F,
) -> Result<IngestOutcome>
where
    F: Fn(&DocumentRecord) -> Result<String> + Sync,
{
    if records.is_empty() {
        return Err(Error::EmptyManifest);
    }
    options.bucketing.validate()?;
    options.filter.validate()?;

    let mut buckets: BTreeMap<TimePeriod, Vec<DocumentRecord>> = BTreeMap::new();
    let mut unassigned = Vec::new();
    for rec in records {
        match options.bucketing.assign(rec.year()) {
            Some(p) => buckets.entry(p).or_default().push(rec),
            None => unassigned.push(rec),
        }
    }
    if buckets.is_empty() {
        return Err(Error::param(format!(
            "none of the {} documents fall inside a bucket",
            unassigned.len()
        )));
    }

    let analyzer = options.analyzer.as_ref();
    let mut leaves = Vec::with_capacity(buckets.len());
    for (period, docs) in buckets {
        let processed: Vec<ProcessedDocument> = docs
            .par_iter()
            .map(|rec| {
                let raw = read(rec)?;
                Ok(preprocess_document(&rec.id, &raw, &options.normalize, analyzer))
            })
            .collect::<Result<_>>()?;
        leaves.push(CorpusNode::Leaf(Corpus::from_processed(
            period,
            docs,
            processed,
            options.filter.clone(),
        )));
    }
    Ok(IngestOutcome {
        tree: DiachronicCorpus::new(leaves)?,
        unassigned,
    })
}

/// Reads `<root>/manifest.json` and the documents it lists.
pub fn build_corpus_tree(root: &Path, options: &IngestOptions) -> Result<IngestOutcome> {
    let manifest_path = root.join("manifest.json");
    let manifest =
        std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let records = parse_manifest(&manifest)?;
    build_corpus_tree_with(records, options, |rec| {
        std::fs::read_to_string(root.join(&rec.path)).map_err(|e| Error::Ingest {
            id: rec.id.clone(),
            reason: format!("cannot read {}: {e}", rec.path.display()),
        })
    })
}
