mod common;

use std::fs;

use common::*;
use diachron::corpus::{build_corpus_tree, IngestOptions};
use diachron::lexicon::UniqueWordCount;
use diachron::operation::{DocumentCount, PerPeriod, TokenCount};
use diachron::period::Bucketing;
use diachron::preprocess::{
    filter_vocabulary, frequency_threshold, lemmatize, normalize_text, tokenize, FilterConfig, LemmaOrigin,
    LookupAnalyzer,
};
use diachron::{CorpusNode, Error, TimePeriod};

fn write_corpus(docs: &[(&str, &str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("docs")).unwrap();
    let manifest: Vec<_> = docs
        .iter()
        .map(|(id, date, text)| {
            fs::write(dir.path().join(format!("docs/{id}.txt")), text).unwrap();
            serde_json::json!({"id": id, "date": date, "source": "gazette", "path": format!("docs/{id}.txt")})
        })
        .collect();
    fs::write(dir.path().join("manifest.json"), serde_json::to_string(&manifest).unwrap()).unwrap();
    dir
}

fn periods(node: &CorpusNode) -> Vec<TimePeriod> {
    node.leaves().iter().map(|l| l.period()).collect()
}

#[test]
fn decade_buckets() {
    let dir = write_corpus(&[("a", "1935-01-02", "bir iki"), ("b", "1985-06-30", "üç")]);
    let out = build_corpus_tree(dir.path(), &IngestOptions::default()).unwrap();
    let node = CorpusNode::Composite(out.tree);
    assert_eq!(periods(&node), [TimePeriod::new(1930, 1939).unwrap(), TimePeriod::new(1980, 1989).unwrap()]);

    let dir = write_corpus(&[("a", "1921-02-07", "Hâkimiyet milletindir.")]);
    let node = CorpusNode::Composite(build_corpus_tree(dir.path(), &IngestOptions::default()).unwrap().tree);
    assert_eq!(periods(&node), [TimePeriod::new(1920, 1929).unwrap()]);
}

#[test]
fn documents_outside_buckets_are_reported() {
    let dir = write_corpus(&[("a", "1935-01-02", "bir"), ("b", "1955-01-01", "iki")]);
    let options = IngestOptions {
        bucketing: Bucketing::explicit(vec![TimePeriod::new(1930, 1939).unwrap()]).unwrap(),
        ..IngestOptions::default()
    };
    let out = build_corpus_tree(dir.path(), &options).unwrap();
    assert_eq!(out.unassigned.len(), 1);
    assert_eq!(out.unassigned[0].id, "b");
}

#[test]
fn ingest_errors() {
    let dir = write_corpus(&[("a", "1935-01-02", "bir")]);
    fs::remove_file(dir.path().join("docs/a.txt")).unwrap();
    match build_corpus_tree(dir.path(), &IngestOptions::default()) {
        Err(Error::Ingest { id, .. }) => assert_eq!(id, "a"),
        other => panic!("{other:?}"),
    }

    let dir = write_corpus(&[("a", "1935-02-31", "bir")]);
    assert!(matches!(build_corpus_tree(dir.path(), &IngestOptions::default()), Err(Error::InvalidDate { .. })));

    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("manifest.json"), "[]").unwrap();
    assert!(matches!(build_corpus_tree(dir.path(), &IngestOptions::default()), Err(Error::EmptyManifest)));
}

#[test]
fn fixture_document_counts_sum_to_manifest() {
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fixtures().join("mini/manifest.json")).unwrap()).unwrap();
    let expected = manifest.as_array().unwrap().len() as u64;
    let node = fixture_tree();
    let per_leaf: u64 = node.leaves().iter().map(|l| l.stats().document_count).sum();
    assert_eq!(per_leaf, expected);
    assert_eq!(node.perform(&DocumentCount).unwrap(), expected);
    assert_eq!(expected, 100);
}

#[test]
fn dispatch_leaf_and_composite() {
    let a = leaf(1930, &["kitab kitab sene", "vesika"]);
    let b = leaf(1980, &["kitap yıl yıl"]);
    let single = CorpusNode::Leaf(a.clone());
    let series = single.perform(&PerPeriod::new(UniqueWordCount)).unwrap();
    assert_eq!(series.single(), Some(&3));

    let node = tree(vec![a, b]);
    let series = node.perform(&PerPeriod::new(UniqueWordCount)).unwrap();
    assert_eq!(series.len(), 2);
    assert_eq!(series.values().copied().collect::<Vec<_>>(), [3, 2]);

    let sequential: u64 = node.leaves().iter().map(|l| l.stats().token_count_raw).sum();
    assert_eq!(node.perform(&TokenCount).unwrap(), sequential);
}

#[test]
fn missing_artifacts_are_typed() {
    let node = tree(vec![leaf(1930, &["a b"])]);
    let err = node.leaves()[0].ppmi().unwrap_err();
    assert!(matches!(err, Error::MissingArtifact { hint: "embed ppmi", .. }), "{err:?}");
}

#[test]
fn normalization_golden() {
    let golden_name = fs::read_dir(fixtures().join("golden"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .find(|n| n.starts_with("normalized_"))
        .unwrap();
    let id = golden_name.trim_start_matches("normalized_").trim_end_matches(".txt");
    let raw = fs::read_to_string(fixtures().join(format!("mini/docs/{id}.txt"))).unwrap();
    assert!(raw.contains('\t'));
    assert_eq!(normalize_text(&raw), golden(&golden_name));
    assert_eq!(normalize_text("a\u{00A0}\u{00A0} b"), "a b");
    assert_eq!(normalize_text("ka\u{00AD}ğıt"), "kağıt");
}

#[test]
fn tokenization_golden() {
    let text = fs::read_to_string(fixtures().join("text/sentence_1921.txt")).unwrap();
    let tokens: Vec<String> = tokenize(&normalize_text(&text)).into_iter().map(|t| t.surface).collect();
    let expected: Vec<String> = golden("sentence_1921.tokens").lines().map(str::to_string).collect();
    assert_eq!(tokens, expected);
    assert!(tokenize("").is_empty());
}

#[test]
fn threshold_and_filter() {
    let cfg = FilterConfig::default();
    assert_eq!(frequency_threshold(5_000_000, &cfg), 1);
    assert_eq!(frequency_threshold(10_000_000, &cfg), 1);
    assert_eq!(frequency_threshold(25_000_000, &cfg), 3);
    let counts = |p: &[(&str, u64)]| p.iter().map(|&(w, f)| (w.to_string(), f)).collect();
    assert_eq!(filter_vocabulary(&counts(&[("a", 5), ("b", 1)]), 20_000_000, &cfg), counts(&[("a", 5)]));
    assert_eq!(filter_vocabulary(&counts(&[("a", 5)]), 0, &cfg), counts(&[("a", 5)]));
    assert_eq!(
        filter_vocabulary(&counts(&[("md5x9", 10), ("kitap", 10)]), 100, &cfg),
        counts(&[("kitap", 10)])
    );
}

#[test]
fn lemmatizer_fallback() {
    let empty = LookupAnalyzer::new();
    let l = lemmatize("müstenittir", &empty);
    assert_eq!((l.text.as_str(), l.origin), ("müste", LemmaOrigin::F5Fallback));
    let l = lemmatize("ev", &empty);
    assert_eq!((l.text.as_str(), l.origin), ("ev", LemmaOrigin::F5Fallback));
    let table = LookupAnalyzer::parse_tsv("milletindir\tmillet\n").unwrap();
    let l = lemmatize("milletindir", &table);
    assert_eq!((l.text.as_str(), l.origin), ("millet", LemmaOrigin::Analyzer));
    assert_eq!(lemmatize("İdare", &LookupAnalyzer::parse_tsv("idare\tidare\n").unwrap()).text, "idare");
}
