use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use diachron::alignment::{residual, shared_rows, AlignmentChain, AlignmentTransform};
use diachron::config::RunConfig;
use diachron::corpus::build_corpus_tree;
use diachron::dictionary::{dictionary_to_json, load_dictionary, SAMPLE_DICTIONARY};
use diachron::embeddings::{CreateCooccurrence, CreateEmbeddings, CreatePpmi, EmbeddingSet, Provenance};
use diachron::lexicon::{CreateNgrams, CreateVocabulary};
use diachron::registry::{self, Context, Params, Report};
use diachron::store::{stats_report, Store};
use diachron::{CorpusNode, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "diachron", version, about = "Diachronic corpus analytics")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Where artifacts and reports are written (overrides the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Seed for CBOW and randomized SVD (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read the manifest, preprocess, bucket and build vocabularies and n-grams.
    Ingest {
        /// Directory holding manifest.json (overrides the config).
        corpus_root: Option<PathBuf>,
    },
    /// Run a named analysis over the ingested corpus.
    Analyze {
        name: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Build co-occurrence/PPMI matrices (`ppmi`) or embeddings (`svd`, `cbow`).
    Embed { kind: String },
    /// Fit orthogonal maps between period embedding spaces.
    Align {
        /// Source period (default: the last one).
        from: Option<String>,
        /// Target period (default: the first one).
        to: Option<String>,
        #[arg(long, default_value = "svd")]
        kind: String,
    },
    /// Run a named embedding or association query.
    Query {
        name: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
    /// Validate or print old/new word-pair dictionaries.
    Dict {
        #[command(subcommand)]
        action: DictAction,
    },
    /// List the registered analyses, queries and embedding methods.
    List,
}

#[derive(Subcommand, Debug)]
enum DictAction {
    /// Validate a dictionary file and report its entry count.
    Check { file: PathBuf },
    /// Print the bundled sample dictionary.
    Sample,
    /// Crossover periods for a dictionary (default: the bundled sample).
    Crossover {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        params: Vec<String>,
    },
}

/// Held for the duration of a command; refuses concurrent runs on one output directory.
struct Lock {
    path: PathBuf,
    _file: File,
}

impl Lock {
    fn acquire(dir: &Path) -> Result<Lock> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = writeln!(file, "{}", std::process::id());
                Ok(Lock { path, _file: file })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Internal(format!(
                "{} is in use by another run (delete {} if it is stale)",
                dir.display(),
                path.display()
            ))),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for Lock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn emit(store: &Store, stem: &str, report: &Report) -> Result<Value> {
    for (name, content) in &report.files {
        store.write_report(name, content)?;
    }
    let json_text = serde_json::to_string_pretty(&report.json).expect("json") + "\n";
    store.write_report(&format!("{stem}.json"), &json_text)?;
    Ok(report.json.clone())
}

fn report_stem(name: &str, params: &Params) -> String {
    let mut stem = name.to_string();
    for p in params.positionals() {
        stem.push('_');
        stem.extend(p.chars().map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' }));
    }
    stem
}

fn ingest(cfg: &RunConfig, root: Option<PathBuf>) -> Result<Value> {
    let root = root.unwrap_or_else(|| cfg.corpus_root.clone());
    let cfg = RunConfig {
        corpus_root: root.clone(),
        ..cfg.clone()
    };
    let outcome = build_corpus_tree(&root, &cfg.ingest_options()?)?;
    let mut tree = CorpusNode::Composite(outcome.tree);
    tree.apply(&CreateVocabulary::default())?;
    tree.apply(&CreateNgrams::default())?;
    let store = Store::new(&cfg.output_dir);
    // artifacts of an earlier ingest no longer match
    for dir in [store.root().join("periods"), store.transforms_dir()] {
        if dir.is_dir() {
            fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    store.save(&tree, &cfg.bucketing, &outcome.unassigned)?;
    let mut stats = stats_report(&tree).to_json();
    stats["unassigned_documents"] = json!(outcome.unassigned.len());
    Ok(stats)
}

fn open_store(cfg: &RunConfig) -> Result<(Store, CorpusNode)> {
    let store = Store::new(&cfg.output_dir);
    let (tree, _) = store.load()?;
    Ok((store, tree))
}

fn run_named(cfg: &RunConfig, registry: &registry::Registry<dyn registry::Analysis>, name: &str, args: &[String]) -> Result<Value> {
    let item = registry.get(name)?;
    let params = Params::parse(args)?;
    let (store, tree) = open_store(cfg)?;
    let report = item.run(&Context { tree: &tree, config: cfg }, &params)?;
    emit(&store, &report_stem(name, &params), &report)
}

fn embed(cfg: &RunConfig, kind: &str) -> Result<Value> {
    let (store, mut tree) = open_store(cfg)?;
    match kind {
        "ppmi" => {
            tree.apply(&CreateCooccurrence {
                window: cfg.embedding.window,
            })?;
            tree.apply(&CreatePpmi {
                alpha: cfg.embedding.alpha,
            })?;
        }
        other => {
            let method = registry::embedding_methods(cfg)?.get(other).map_err(|_| {
                Error::param(format!("unknown embedding kind `{other}` (ppmi|svd|cbow)"))
            })?;
            tree.apply(&CreateEmbeddings { method })?;
        }
    }
    let mut periods = Vec::new();
    for leaf in tree.leaves() {
        store.save_leaf(leaf)?;
        let a = &leaf.artifacts;
        let mut entry = json!({ "period": leaf.period() });
        if kind == "ppmi" {
            let ppmi = leaf.ppmi()?;
            entry["vocabulary"] = json!(ppmi.vocab.len());
            entry["ppmi_nonzero"] = json!(ppmi.values.nnz());
            entry["cooccurrence_total"] = json!(a.cooccurrence.as_ref().map(|c| c.grand_total));
        } else {
            let set = leaf.embeddings(kind.parse::<Provenance>()?)?;
            entry["vocabulary"] = json!(set.len());
            entry["dim"] = json!(set.dim());
            entry["file"] = json!(EmbeddingSet::file_name(set.provenance));
        }
        periods.push(entry);
    }
    Ok(json!({ "kind": kind, "periods": periods }))
}

fn align(cfg: &RunConfig, from: Option<String>, to: Option<String>, kind: &str) -> Result<Value> {
    let kind: Provenance = kind.parse()?;
    let (store, tree) = open_store(cfg)?;
    let leaves = tree.leaves();
    if leaves.len() < 2 {
        return Err(Error::param("alignment needs at least two periods"));
    }
    let from = match from {
        Some(p) => p.parse()?,
        None => leaves[leaves.len() - 1].period(),
    };
    let to = match to {
        Some(p) => p.parse()?,
        None => leaves[0].period(),
    };
    if from == to {
        return Err(Error::param(format!("cannot align period {from} with itself")));
    }
    let i = tree.leaves().iter().position(|l| l.period() == from);
    let j = tree.leaves().iter().position(|l| l.period() == to);
    let (Some(i), Some(j)) = (i, j) else {
        return Err(Error::UnknownPeriod(if i.is_none() { from } else { to }.to_string()));
    };
    let span = &leaves[i.min(j)..=i.max(j)];
    let sets = span.iter().map(|l| l.embeddings(kind)).collect::<Result<Vec<_>>>()?;
    let chain = AlignmentChain::fit(&sets)?;
    let mut steps = Vec::new();
    for step in &chain.steps {
        store.save_transform(step)?;
        steps.push(json!({
            "from": step.source_period,
            "to": step.target_period,
            "shared_vocabulary": step.shared_vocab.len(),
            "underdetermined": step.underdetermined,
            "orthogonality_error": step.orthogonality_error(),
        }));
    }
    let transform = chain.transform(from, to)?;
    let path = store.save_transform(&transform)?;
    let source = sets.iter().find(|s| s.period == from).expect("in span");
    let target = sets.iter().find(|s| s.period == to).expect("in span");
    let (shared, a, b) = shared_rows(source, target);
    let identity = AlignmentTransform::identity(from, transform.dim()).r;
    Ok(json!({
        "from": from,
        "to": to,
        "kind": kind,
        "file": path,
        "steps": steps,
        "shared_vocabulary": shared.len(),
        "residual": residual(&a, &b, &transform.r),
        "identity_residual": residual(&a, &b, &identity),
        "orthogonality_error": transform.orthogonality_error(),
    }))
}

fn dict(cfg: &RunConfig, action: DictAction) -> Result<Value> {
    match action {
        DictAction::Check { file } => {
            let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let entries = load_dictionary(&text)?;
            let pairs: usize = entries.iter().map(|e| e.old_forms.len()).sum();
            Ok(json!({ "entries": entries.len(), "pairs": pairs }))
        }
        DictAction::Sample => {
            let entries = load_dictionary(SAMPLE_DICTIONARY)?;
            print!("{}", dictionary_to_json(&entries));
            println!();
            Ok(Value::Null)
        }
        DictAction::Crossover { params } => run_named(cfg, &registry::analyses(), "dict-crossover", &params),
    }
}

fn list() -> Value {
    let describe = |r: registry::Registry<dyn registry::Analysis>| -> Value {
        r.names()
            .into_iter()
            .map(|n| (n.to_string(), json!(r.get(n).expect("listed").summary())))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    json!({
        "analyses": describe(registry::analyses()),
        "queries": describe(registry::queries()),
        "embeddings": ["ppmi", "svd", "cbow"],
        "svd_solvers": registry::svd_solvers(0).names(),
    })
}

fn run(cli: Cli) -> Result<Value> {
    let cfg = load_config(&cli)?;
    let needs_lock = !matches!(cli.command, Command::List | Command::Dict { action: DictAction::Check { .. } | DictAction::Sample });
    let _lock = if needs_lock { Some(Lock::acquire(&cfg.output_dir)?) } else { None };
    match cli.command {
        Command::Ingest { corpus_root } => ingest(&cfg, corpus_root),
        Command::Analyze { name, params } => run_named(&cfg, &registry::analyses(), &name, &params),
        Command::Embed { kind } => embed(&cfg, &kind),
        Command::Align { from, to, kind } => align(&cfg, from, to, &kind),
        Command::Query { name, params } => run_named(&cfg, &registry::queries(), &name, &params),
        Command::Dict { action } => dict(&cfg, action),
        Command::List => Ok(list()),
    }
}

fn report_error(code: &str, message: &str, context: Value) {
    let body = json!({ "error": code, "message": message, "context": context });
    eprintln!("{}", serde_json::to_string(&body).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error("usage", e.to_string().trim(), Value::Null);
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(value) => {
            print_json(&value);
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(e.code(), &e.to_string(), e.context());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
