use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use diachron::config::RunConfig;
use diachron::embeddings::{most_similar, Provenance};
use diachron::store::Store;
use serde_json::Value;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini")
}

fn run_with(config: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diachron"))
        .arg("--config")
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn run(out: &Path, args: &[&str]) -> Output {
    run_with(&fixture().join("diachron.json"), out, args)
}

fn ok_json(out: &Path, args: &[&str]) -> Value {
    let o = run(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn error_json(o: &Output) -> Value {
    let line = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("bad error JSON `{line}`: {e}"))
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                files.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    files
}

/// A corpus directory with the given (date, text) documents.
fn write_corpus(root: &Path, docs: &[(&str, &str)]) -> PathBuf {
    fs::create_dir_all(root.join("docs")).unwrap();
    let mut manifest = Vec::new();
    for (i, (date, text)) in docs.iter().enumerate() {
        let path = format!("docs/d{i}.txt");
        fs::write(root.join(&path), text).unwrap();
        manifest.push(serde_json::json!({ "id": format!("d{i}"), "date": date, "path": path }));
    }
    fs::write(root.join("manifest.json"), serde_json::to_string(&manifest).unwrap()).unwrap();
    let config = root.join("diachron.json");
    fs::write(&config, r#"{"corpus_root":".","embedding":{"dim":2}}"#).unwrap();
    config
}

#[test]
fn help_and_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_diachron")).arg("--help").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("ingest"));

    let o = run(tmp.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "usage");

    let listed = ok_json(tmp.path(), &["list"]);
    assert!(listed["analyses"]["divergence"].is_string());
    assert!(listed["queries"]["aligned-most-similar"].is_string());
}

#[test]
fn empty_manifest_is_a_parameter_class_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_corpus(&tmp.path().join("corpus"), &[]);
    let o = run_with(&config, &tmp.path().join("out"), &["ingest"]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"], "empty-manifest");
    assert!(e["message"].is_string());
}

#[test]
fn reingest_is_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let stats = ok_json(tmp.path(), &["ingest"]);
    assert_eq!(stats["unassigned_documents"], 0);
    let first = snapshot(tmp.path());
    ok_json(tmp.path(), &["ingest"]);
    assert_eq!(first, snapshot(tmp.path()));

    let other = tempfile::tempdir().unwrap();
    ok_json(other.path(), &["ingest"]);
    assert_eq!(first, snapshot(other.path()));
}

#[test]
fn missing_artifacts_name_the_command() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["analyze", "divergence"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["context"]["command"], "ingest");

    ok_json(tmp.path(), &["ingest"]);
    let o = run(tmp.path(), &["embed", "svd"]);
    assert_eq!(o.status.code(), Some(3));
    let e = error_json(&o);
    assert_eq!(e["error"], "missing-artifact");
    assert_eq!(e["context"]["command"], "embed ppmi");

    let o = run(tmp.path(), &["query", "most-similar", "radyo"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["context"]["command"], "embed svd");
}

#[test]
fn align_needs_two_periods() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_corpus(
        &tmp.path().join("corpus"),
        &[("1931-01-01", "su ekmek su ekmek peynir"), ("1934-05-05", "ekmek peynir su zeytin")],
    );
    let out = tmp.path().join("out");
    for args in [&["ingest"][..], &["embed", "ppmi"], &["embed", "svd"]] {
        let o = run_with(&config, &out, args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = run_with(&config, &out, &["align"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "parameter");
}

#[test]
fn analyses_and_queries_on_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path();
    ok_json(out, &["ingest"]);

    let freq = ok_json(out, &["analyze", "freq", "belge", "--normalize"]);
    let entries = freq["series"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["value"].as_f64().unwrap() <= 1.0));

    let div = ok_json(out, &["analyze", "divergence"]);
    let cells = div["jaccard"]["values"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().all(|row| row.as_array().unwrap().len() == 2));
    assert!(out.join("reports/divergence_jaccard.csv").exists());
    assert!(out.join("reports/divergence.json").exists());

    let o = run(out, &["analyze", "no-such-analysis"]);
    assert_eq!(o.status.code(), Some(2));

    ok_json(out, &["embed", "ppmi"]);
    ok_json(out, &["embed", "svd"]);
    let cli = ok_json(out, &["query", "most-similar", "radyo", "--k", "5"]);

    let cfg = RunConfig::load(&fixture().join("diachron.json")).unwrap();
    assert_eq!(cfg.embedding.dim, 12);
    let (tree, _) = Store::new(out).load().unwrap();
    for (leaf, entry) in tree.leaves().iter().zip(cli["series"]["entries"].as_array().unwrap()) {
        let lib = most_similar(leaf.embeddings(Provenance::Svd).unwrap(), "radyo", 5).unwrap();
        let got = entry["value"].as_array().unwrap();
        assert_eq!(got.len(), lib.len());
        for (g, l) in got.iter().zip(&lib) {
            assert_eq!(g["word"], l.word.as_str());
            assert!((g["score"].as_f64().unwrap() - l.score).abs() < 1e-12);
        }
    }

    let o = run(out, &["query", "most-similar", "yokkelime"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "out-of-vocabulary");

    let aligned = ok_json(out, &["align"]);
    assert!(aligned["orthogonality_error"].as_f64().unwrap() < 1e-8);
    let tv = ok_json(out, &["query", "aligned-most-similar", "televizyon", "--k", "5"]);
    let words: Vec<&str> = tv["neighbors"].as_array().unwrap().iter().map(|n| n["word"].as_str().unwrap()).collect();
    assert!(words.iter().any(|w| ["radyo", "gazete", "sinema"].contains(w)), "{words:?}");
}

#[test]
fn dictionary_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let sample = run(tmp.path(), &["dict", "sample"]);
    assert!(sample.status.success());
    let file = tmp.path().join("dict.json");
    fs::write(&file, &sample.stdout).unwrap();
    let checked = ok_json(tmp.path(), &["dict", "check", file.to_str().unwrap()]);
    assert_eq!(checked["entries"], 12);

    fs::write(&file, r#"[{"modern":"yıl","old":["sene"]},{"modern":"yıl","old":["sene"]}]"#).unwrap();
    let o = run(tmp.path(), &["dict", "check", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "validation");
}

#[test]
fn concurrent_writers_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    ok_json(tmp.path(), &["ingest"]);
    fs::write(tmp.path().join(".lock"), "").unwrap();
    let o = run(tmp.path(), &["analyze", "divergence"]);
    assert!(!o.status.success());
    assert!(error_json(&o)["message"].as_str().unwrap().contains("lock"));
    // read-only commands do not take the lock
    assert!(run(tmp.path(), &["list"]).status.success());
    fs::remove_file(tmp.path().join(".lock")).unwrap();
    ok_json(tmp.path(), &["analyze", "divergence"]);
    assert!(!tmp.path().join(".lock").exists());
}
