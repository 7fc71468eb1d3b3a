#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use diachron::config::RunConfig;
use diachron::corpus::build_corpus_tree;
use diachron::embeddings::{CreateCooccurrence, CreateEmbeddings, CreatePpmi, DenseSvd, SvdMethod};
use diachron::lexicon::{CreateNgrams, CreateVocabulary, Level, Vocabulary};
use diachron::preprocess::LookupAnalyzer;
use diachron::{Corpus, CorpusNode, DiachronicCorpus, TimePeriod};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("golden").join(name)).unwrap()
}

pub fn fixture_config() -> RunConfig {
    RunConfig::load(&fixtures().join("mini/diachron.json")).unwrap()
}

/// The mini corpus with vocabularies and n-grams built.
pub fn fixture_tree() -> CorpusNode {
    let cfg = fixture_config();
    let outcome = build_corpus_tree(&cfg.corpus_root, &cfg.ingest_options().unwrap()).unwrap();
    let mut tree = CorpusNode::Composite(outcome.tree);
    tree.apply(&CreateVocabulary::default()).unwrap();
    tree.apply(&CreateNgrams::default()).unwrap();
    tree
}

/// The mini corpus with SVD embeddings at the configured dimension.
pub fn embedded_fixture() -> CorpusNode {
    let cfg = fixture_config();
    let mut tree = fixture_tree();
    tree.apply(&CreateCooccurrence::default()).unwrap();
    tree.apply(&CreatePpmi::default()).unwrap();
    tree.apply(&CreateEmbeddings {
        method: Arc::new(SvdMethod {
            dim: cfg.embedding.dim,
            solver: Arc::new(DenseSvd),
        }),
    })
    .unwrap();
    tree
}

pub fn decade(y: i32) -> TimePeriod {
    TimePeriod::decade_of(y)
}

pub fn leaf(year: i32, texts: &[&str]) -> Corpus {
    let mut c = Corpus::from_texts(decade(year), texts, &LookupAnalyzer::new());
    c.apply(&CreateVocabulary::default()).unwrap();
    c
}

pub fn tree(leaves: Vec<Corpus>) -> CorpusNode {
    CorpusNode::Composite(DiachronicCorpus::new(leaves.into_iter().map(CorpusNode::Leaf).collect()).unwrap())
}

pub fn vocab(year: i32, pairs: &[(&str, u64)]) -> Vocabulary {
    Vocabulary::new(decade(year), Level::Lemma, pairs.iter().map(|&(w, f)| (w.to_string(), f)).collect())
}
