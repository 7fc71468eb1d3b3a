//! On-disk layout of an output directory.
//!
//! ```text
//! corpus.json                 periods, documents, per-period stats
//! stats.json, stats.csv       descriptive statistics
//! periods/<START-END>/        per-period artifacts
//!     vocabulary.tsv surface_vocabulary.tsv ngrams_<n>_<level>.tsv
//!     lemmas.txt surfaces.txt cooccurrence.tsv ppmi.tsv embeddings_<kind>.txt
//! transforms/<FROM>__<TO>.txt
//! reports/
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alignment::AlignmentTransform;
use crate::corpus::{Corpus, CorpusNode, CorpusStats, DiachronicCorpus, DocumentRecord};
use crate::embeddings::{vocab_index, CooccurrenceMatrix, EmbeddingSet, PpmiMatrix, Provenance};
use crate::error::{Error, Result};
use crate::lexicon::{Level, NgramTable, Vocabulary};
use crate::period::{Bucketing, TimePeriod};
use crate::preprocess::{FilterConfig, ProcessedDocument};
use crate::report::{csv_field, format_real};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PeriodEntry {
    period: TimePeriod,
    stats: CorpusStats,
    documents: Vec<DocumentRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CorpusIndex {
    bucketing: Bucketing,
    filter: FilterConfig,
    periods: Vec<PeriodEntry>,
    unassigned: Vec<DocumentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub total: CorpusStats,
    pub periods: Vec<(TimePeriod, CorpusStats)>,
}

impl StatsReport {
    /// One row per field (labelled as in the corpus statistics table), one
    /// column for the whole corpus and one per period.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,total");
        for (p, _) in &self.periods {
            out.push(',');
            out.push_str(&p.to_string());
        }
        out.push('\n');
        let columns: Vec<Vec<(&'static str, serde_json::Value)>> = std::iter::once(&self.total)
            .chain(self.periods.iter().map(|(_, s)| s))
            .map(CorpusStats::table_rows)
            .collect();
        for (i, (label, _)) in columns[0].iter().enumerate() {
            out.push_str(&csv_field(label));
            for col in &columns {
                out.push(',');
                match &col[i].1 {
                    serde_json::Value::Number(n) if n.is_f64() => {
                        out.push_str(&format_real(n.as_f64().unwrap_or(0.0)))
                    }
                    v => out.push_str(&v.to_string()),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let table = |s: &CorpusStats| {
            serde_json::Value::Object(
                s.table_rows()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v))
                    .collect(),
            )
        };
        serde_json::json!({
            "total": table(&self.total),
            "periods": self
                .periods
                .iter()
                .map(|(p, s)| serde_json::json!({"period": p, "stats": table(s)}))
                .collect::<Vec<_>>(),
        })
    }
}

pub fn stats_report(tree: &CorpusNode) -> StatsReport {
    let leaves = tree.leaves();
    StatsReport {
        total: tree
            .aggregate_stats()
            .unwrap_or_else(|| leaves.first().map(|l| l.stats().clone()).unwrap_or_default()),
        periods: leaves.iter().map(|l| (l.period(), l.stats().clone())).collect(),
    }
}

pub struct Store {
    root: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_if_exists(path: &Path) -> Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

pub fn write(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn streams_text(docs: &[ProcessedDocument], pick: impl Fn(&ProcessedDocument) -> &[String]) -> String {
    let mut out = String::new();
    for d in docs {
        out.push_str(&d.id);
        out.push('\t');
        out.push_str(&pick(d).join(" "));
        out.push('\n');
    }
    out
}

fn parse_streams(content: &str, origin: &Path) -> Result<Vec<(String, Vec<String>)>> {
    content
        .lines()
        .enumerate()
        .map(|(i, line)| {
            let (id, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(origin, format!("line {}: expected `id<TAB>tokens`", i + 1)))?;
            Ok((id.to_string(), rest.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()))
        })
        .collect()
}

const NGRAM_ORDERS: [usize; 3] = [1, 2, 3];

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Store { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn period_dir(&self, period: TimePeriod) -> PathBuf {
        self.root.join("periods").join(period.label())
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.root.join("reports")
    }

    pub fn transforms_dir(&self) -> PathBuf {
        self.root.join("transforms")
    }

    pub fn exists(&self) -> bool {
        self.root.join("corpus.json").is_file()
    }

    /// Writes the index, the statistics and every artifact present on the leaves.
    pub fn save(&self, tree: &CorpusNode, bucketing: &Bucketing, unassigned: &[DocumentRecord]) -> Result<()> {
        let leaves = tree.leaves();
        let filter = leaves.first().map(|l| l.filter().clone()).unwrap_or_default();
        let index = CorpusIndex {
            bucketing: bucketing.clone(),
            filter,
            periods: leaves
                .iter()
                .map(|l| PeriodEntry {
                    period: l.period(),
                    stats: l.stats().clone(),
                    documents: l.documents().to_vec(),
                })
                .collect(),
            unassigned: unassigned.to_vec(),
        };
        let json = serde_json::to_string_pretty(&index).expect("index serializes");
        write(&self.root.join("corpus.json"), &(json + "\n"))?;
        let stats = stats_report(tree);
        write(
            &self.root.join("stats.json"),
            &(serde_json::to_string_pretty(&stats.to_json()).expect("json") + "\n"),
        )?;
        write(&self.root.join("stats.csv"), &stats.to_csv())?;
        for leaf in leaves {
            self.save_leaf(leaf)?;
        }
        Ok(())
    }

    pub fn save_leaf(&self, leaf: &Corpus) -> Result<()> {
        let dir = self.period_dir(leaf.period());
        if let Ok(docs) = leaf.processed() {
            write(&dir.join("lemmas.txt"), &streams_text(docs, |d| &d.lemmas))?;
            write(&dir.join("surfaces.txt"), &streams_text(docs, |d| &d.surfaces))?;
        }
        let a = &leaf.artifacts;
        if let Some(v) = &a.vocabulary {
            write(&dir.join("vocabulary.tsv"), &v.to_tsv())?;
        }
        if let Some(v) = &a.surface_vocabulary {
            write(&dir.join("surface_vocabulary.tsv"), &v.to_tsv())?;
        }
        for ((order, level), table) in &a.ngrams {
            write(&dir.join(NgramTable::file_name(*order, *level)), &table.to_tsv())?;
        }
        if let Some(c) = &a.cooccurrence {
            write(&dir.join("cooccurrence.tsv"), &c.to_tsv())?;
        }
        if let Some(p) = &a.ppmi {
            write(&dir.join("ppmi.tsv"), &p.to_tsv())?;
        }
        for (kind, set) in &a.embeddings {
            write(&dir.join(EmbeddingSet::file_name(*kind)), &set.to_text())?;
        }
        Ok(())
    }

    /// Rebuilds the tree with whatever artifacts were persisted.
    pub fn load(&self) -> Result<(CorpusNode, Bucketing)> {
        let index_path = self.root.join("corpus.json");
        let text = match read_if_exists(&index_path)? {
            Some(t) => t,
            None => {
                return Err(Error::MissingArtifact {
                    artifact: "corpus index",
                    period: "all".into(),
                    hint: "ingest",
                })
            }
        };
        let index: CorpusIndex = serde_json::from_str(&text).map_err(|source| Error::Json {
            context: index_path.display().to_string(),
            source,
        })?;
        let mut leaves = Vec::with_capacity(index.periods.len());
        for entry in index.periods {
            leaves.push(CorpusNode::Leaf(self.load_leaf(entry, &index.filter)?));
        }
        Ok((CorpusNode::Composite(DiachronicCorpus::new(leaves)?), index.bucketing))
    }

    fn load_leaf(&self, entry: PeriodEntry, filter: &FilterConfig) -> Result<Corpus> {
        let dir = self.period_dir(entry.period);
        let mut leaf = Corpus::from_parts(entry.period, entry.documents, entry.stats, filter.clone());

        let lemmas_path = dir.join("lemmas.txt");
        let surfaces_path = dir.join("surfaces.txt");
        if let (Some(l), Some(s)) = (read_if_exists(&lemmas_path)?, read_if_exists(&surfaces_path)?) {
            let lemmas = parse_streams(&l, &lemmas_path)?;
            let surfaces = parse_streams(&s, &surfaces_path)?;
            if lemmas.len() != surfaces.len() {
                return Err(Error::format(&surfaces_path, "document count differs from lemmas.txt"));
            }
            let docs = lemmas
                .into_iter()
                .zip(surfaces)
                .map(|((id, lemmas), (_, surfaces))| ProcessedDocument { id, surfaces, lemmas })
                .collect();
            leaf.set_processed(docs);
        }

        let vocab_path = dir.join("vocabulary.tsv");
        if let Some(t) = read_if_exists(&vocab_path)? {
            leaf.artifacts.vocabulary = Some(Vocabulary::parse_tsv(&t, Level::Lemma, &vocab_path)?);
        }
        let surface_path = dir.join("surface_vocabulary.tsv");
        if let Some(t) = read_if_exists(&surface_path)? {
            leaf.artifacts.surface_vocabulary = Some(Vocabulary::parse_tsv(&t, Level::Surface, &surface_path)?);
        }
        for order in NGRAM_ORDERS {
            for level in [Level::Surface, Level::Lemma] {
                let path = dir.join(NgramTable::file_name(order, level));
                if let Some(t) = read_if_exists(&path)? {
                    leaf.artifacts
                        .ngrams
                        .insert((order, level), NgramTable::parse_tsv(&t, order, level, &path)?);
                }
            }
        }
        if let Some(vocab) = &leaf.artifacts.vocabulary {
            let index = vocab_index(vocab);
            let path = dir.join("cooccurrence.tsv");
            if let Some(t) = read_if_exists(&path)? {
                leaf.artifacts.cooccurrence = Some(CooccurrenceMatrix::parse_tsv(&t, index.clone(), &path)?);
            }
            let path = dir.join("ppmi.tsv");
            if let Some(t) = read_if_exists(&path)? {
                leaf.artifacts.ppmi = Some(PpmiMatrix::parse_tsv(&t, index, &path)?);
            }
        }
        for kind in [Provenance::Svd, Provenance::Cbow] {
            let path = dir.join(EmbeddingSet::file_name(kind));
            if let Some(t) = read_if_exists(&path)? {
                leaf.artifacts.embeddings.insert(kind, EmbeddingSet::parse_text(&t, &path)?);
            }
        }
        Ok(leaf)
    }

    pub fn save_transform(&self, t: &AlignmentTransform) -> Result<PathBuf> {
        let path = self.transforms_dir().join(t.file_name());
        write(&path, &t.to_text())?;
        if !t.shared_vocab.is_empty() {
            let vocab_path = path.with_extension("shared.txt");
            write(&vocab_path, &(t.shared_vocab.join("\n") + "\n"))?;
        }
        Ok(path)
    }

    pub fn load_transform(&self, from: TimePeriod, to: TimePeriod) -> Result<AlignmentTransform> {
        let path = self.transforms_dir().join(format!("{from}__{to}.txt"));
        let text = read_if_exists(&path)?.ok_or_else(|| Error::MissingArtifact {
            artifact: "alignment transform",
            period: format!("{from}→{to}"),
            hint: "align",
        })?;
        let mut t = AlignmentTransform::parse_text(&text, &path)?;
        if let Some(v) = read_if_exists(&path.with_extension("shared.txt"))? {
            t.shared_vocab = v.lines().map(str::to_string).collect();
        }
        Ok(t)
    }

    pub fn write_report(&self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.reports_dir().join(name);
        write(&path, content)?;
        Ok(path)
    }

    pub fn read_report(&self, name: &str) -> Result<String> {
        read(&self.reports_dir().join(name))
    }
}
