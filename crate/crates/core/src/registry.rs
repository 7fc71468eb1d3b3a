//! Name-keyed registries of analyses, queries, embedding methods and SVD
//! solvers, selected at runtime by the command line.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::alignment::{neighbors_csv, AlignedMostSimilar, SemanticChange};
use crate::config::RunConfig;
use crate::corpus::{Corpus, CorpusNode};
use crate::dictionary::{
    crossovers_csv, dictionary_crossovers, load_dictionary, replacement_series, sample_dictionary, CrossoverRule,
};
use crate::divergence::{JsdContributions, SurvivedWords, VocabularyDistance, VocabularySimilarity};
use crate::embeddings::{
    Association, CbowMethod, CoFrequency, Collocations, DenseSvd, EmbeddingMethod, MostSimilar, Neighbor, Provenance,
    RandomizedSvd, Similarity, SvdMethod, SvdSolver,
};
use crate::error::{Error, Result};
use crate::lexicon::{vocab_metrics, Exists, Frequency, Level, MatchKind, MorphemeFrequency, WordsMatching};
use crate::operation::{PerPeriod, PeriodOperation, TimeSeries};
use crate::orthography::{circumflex_csv, CircumflexOp, EndingRatioOp, PairClass};
use crate::period::TimePeriod;
use crate::report::{csv_field, format_fixed, format_real};
use crate::store::stats_report;

/// Options that take no value.
const SWITCHES: &[&str] = &["normalize", "raw", "first-touch"];

/// Trailing command-line arguments: positionals, `--key value`, `--key=value`
/// and the value-less switches.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    positional: Vec<String>,
    named: BTreeMap<String, Option<String>>,
}

impl Params {
    pub fn parse<S: AsRef<str>>(args: &[S]) -> Result<Self> {
        let mut p = Params::default();
        let mut iter = args.iter().map(AsRef::as_ref).peekable();
        while let Some(arg) = iter.next() {
            let Some(key) = arg.strip_prefix("--") else {
                p.positional.push(arg.to_string());
                continue;
            };
            if let Some((k, v)) = key.split_once('=') {
                p.named.insert(k.to_string(), Some(v.to_string()));
            } else if SWITCHES.contains(&key) {
                p.named.insert(key.to_string(), None);
            } else {
                let value = iter
                    .next()
                    .ok_or_else(|| Error::param(format!("option --{key} needs a value")))?;
                p.named.insert(key.to_string(), Some(value.to_string()));
            }
        }
        Ok(p)
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.named.insert(key.to_string(), Some(value.to_string()));
        self
    }

    pub fn switch(mut self, key: &str) -> Self {
        self.named.insert(key.to_string(), None);
        self
    }

    pub fn arg(mut self, value: impl ToString) -> Self {
        self.positional.push(value.to_string());
        self
    }

    pub fn positional(&self, i: usize, what: &str) -> Result<&str> {
        self.positional
            .get(i)
            .map(String::as_str)
            .ok_or_else(|| Error::param(format!("missing argument <{what}>")))
    }

    pub fn positionals(&self) -> &[String] {
        &self.positional
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.named.get(key).and_then(|v| v.as_deref())
    }

    pub fn flag(&self, key: &str) -> bool {
        self.named.contains_key(key)
    }

    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::param(format!("invalid value `{v}` for --{key}: {e}")))
            })
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }
}

/// Output of an analysis or query: a JSON value plus named files.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub json: Value,
    /// (file name, content) pairs to be written under the reports directory.
    pub files: Vec<(String, String)>,
}

impl Report {
    pub fn new(json: impl Serialize) -> Self {
        Report {
            json: serde_json::to_value(json).expect("report serializes"),
            files: Vec::new(),
        }
    }

    pub fn file(mut self, name: impl Into<String>, content: String) -> Self {
        self.files.push((name.into(), content));
        self
    }
}

pub struct Context<'a> {
    pub tree: &'a CorpusNode,
    pub config: &'a RunConfig,
}

impl<'a> Context<'a> {
    pub fn leaves(&self) -> Vec<&'a Corpus> {
        self.tree.leaves()
    }

    fn first_period(&self) -> TimePeriod {
        self.leaves()[0].period()
    }

    fn last_period(&self) -> TimePeriod {
        *self.leaves().last().map(|l| l.period()).as_ref().expect("non-empty tree")
    }

    fn range(&self, params: &Params) -> Result<Option<TimePeriod>> {
        params.parse_opt("range")
    }

    /// `--period P` narrows to one leaf, otherwise `--range`.
    fn scope(&self, params: &Params) -> Result<Option<TimePeriod>> {
        match params.parse_opt::<TimePeriod>("period")? {
            Some(p) => self.tree.find_leaf(p).map(|l| Some(l.period())),
            None => self.range(params),
        }
    }

    fn kind(&self, params: &Params) -> Result<Provenance> {
        params.parse_or("kind", Provenance::Svd)
    }
}

pub trait Analysis: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn run(&self, ctx: &Context, params: &Params) -> Result<Report>;
}

type AnalysisFn = fn(&Context, &Params) -> Result<Report>;

struct FnAnalysis {
    name: &'static str,
    summary: &'static str,
    run: AnalysisFn,
}

impl Analysis for FnAnalysis {
    fn name(&self) -> &'static str {
        self.name
    }

    fn summary(&self) -> &'static str {
        self.summary
    }

    fn run(&self, ctx: &Context, params: &Params) -> Result<Report> {
        (self.run)(ctx, params)
    }
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, item: Arc<T>) {
        self.entries.insert(name, item);
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| {
            Error::param(format!(
                "unknown {} `{name}` (available: {})",
                self.kind,
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

impl Registry<dyn Analysis> {
    fn add(&mut self, name: &'static str, summary: &'static str, run: AnalysisFn) {
        self.register(name, Arc::new(FnAnalysis { name, summary, run }));
    }
}

/// `period,<column>` rows of a time series.
pub fn series_csv<T>(series: &TimeSeries<T>, column: &str, cell: impl Fn(&T) -> String) -> String {
    let mut out = format!("period,{column}\n");
    for e in &series.entries {
        out.push_str(&format!("{},{}\n", e.period, cell(&e.value)));
    }
    out
}

fn slug(word: &str) -> String {
    word.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn level(params: &Params, default: Level) -> Result<Level> {
    params.parse_or("level", default)
}

fn top_k(params: &Params, default: usize) -> Result<usize> {
    let k = params.parse_or("k", default)?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    Ok(k)
}

fn ranking_csv(series: &TimeSeries<Vec<Neighbor>>, column: &str) -> String {
    let mut out = format!("period,rank,lemma,{column}\n");
    for e in &series.entries {
        for (i, n) in e.value.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.period,
                i + 1,
                csv_field(&n.word),
                format_fixed(n.score, 6)
            ));
        }
    }
    out
}

fn per_period<P: PeriodOperation>(ctx: &Context, op: P, range: Option<TimePeriod>) -> Result<TimeSeries<P::Value>> {
    ctx.tree.perform(&PerPeriod::within(op, range))
}

fn run_stats(ctx: &Context, _: &Params) -> Result<Report> {
    let stats = stats_report(ctx.tree);
    Ok(Report::new(stats.to_json()).file("stats.csv", stats.to_csv()))
}

fn run_divergence(ctx: &Context, params: &Params) -> Result<Report> {
    let range = ctx.range(params)?;
    let jaccard = ctx.tree.perform(&VocabularySimilarity { range })?;
    let jsd = ctx.tree.perform(&VocabularyDistance { range })?;
    Ok(Report::new(json!({ "jaccard": jaccard, "jsd": jsd }))
        .file("divergence_jaccard.csv", jaccard.to_csv())
        .file("divergence_jsd.csv", jsd.to_csv()))
}

fn run_contributions(ctx: &Context, params: &Params) -> Result<Report> {
    let period_a = params.parse_or("a", ctx.first_period())?;
    let period_b = params.parse_or("b", ctx.last_period())?;
    let top_k = match params.get("top-k") {
        Some("all") => None,
        _ => Some(params.parse_or("top-k", 60usize)?),
    };
    let ranking = ctx.tree.perform(&JsdContributions {
        period_a,
        period_b,
        top_k,
    })?;
    let csv = ranking.to_csv();
    Ok(Report::new(&ranking).file(format!("contributions_{period_a}_{period_b}.csv"), csv))
}

fn run_survived(ctx: &Context, params: &Params) -> Result<Report> {
    let base = params.parse_or("base", ctx.first_period())?;
    let series = ctx.tree.perform(&SurvivedWords {
        base,
        range: ctx.range(params)?,
    })?;
    let csv = series_csv(&series, "survived", u64::to_string);
    Ok(Report::new(json!({ "base": base, "series": series })).file(format!("survived_{base}.csv"), csv))
}

fn run_ortho(ctx: &Context, params: &Params) -> Result<Report> {
    let named: Vec<&String> = params.positionals().iter().filter(|p| p.as_str() != "ratio").collect();
    let classes: Vec<PairClass> = match (params.get("class"), named.as_slice()) {
        (Some(c), _) => vec![c.parse()?],
        (None, []) => PairClass::DEFAULT.to_vec(),
        (None, list) => list.iter().map(|c| c.parse()).collect::<Result<_>>()?,
    };
    let level = level(params, Level::Surface)?;
    let range = ctx.range(params)?;
    let mut json = serde_json::Map::new();
    let mut report = Report::new(Value::Null);
    for class in classes {
        let op = EndingRatioOp {
            range,
            level,
            ..EndingRatioOp::new(class)
        };
        let result = ctx.tree.perform(&op)?;
        let tag = class.as_str().replace('-', "");
        report = report
            .file(format!("ortho_{tag}.csv"), result.to_csv())
            .file(format!("ortho_pairs_{tag}.csv"), result.pairs_csv());
        json.insert(class.as_str().to_string(), serde_json::to_value(&result).expect("json"));
    }
    report.json = Value::Object(json);
    Ok(report)
}

fn run_circumflex(ctx: &Context, params: &Params) -> Result<Report> {
    let op = CircumflexOp {
        range: ctx.range(params)?,
        level: level(params, Level::Surface)?,
        ..CircumflexOp::default()
    };
    let series = ctx.tree.perform(&op)?;
    let csv = circumflex_csv(&series);
    Ok(Report::new(&series).file("circumflex.csv", csv))
}

fn run_dict_crossover(ctx: &Context, params: &Params) -> Result<Report> {
    let rule = if params.flag("first-touch") {
        CrossoverRule::FirstTouch
    } else {
        params.parse_or("rule", CrossoverRule::Sustained)?
    };
    let range = ctx.range(params)?;
    if let [modern, old, ..] = params.positionals() {
        let series = replacement_series(ctx.tree, modern, old, range)?;
        let crossover = series.crossover(rule);
        let csv = series.to_csv();
        return Ok(Report::new(json!({ "rule": rule.to_string(), "series": series, "crossover": crossover }))
            .file(format!("replacement_{}_{}.csv", slug(modern), slug(old)), csv));
    }
    let entries = match params.get("dict") {
        Some(path) => {
            let path = PathBuf::from(path);
            load_dictionary(&std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?)?
        }
        None => sample_dictionary(),
    };
    let rows = dictionary_crossovers(ctx.tree, &entries, range, rule)?;
    let csv = crossovers_csv(&rows);
    Ok(Report::new(json!({ "rule": rule.to_string(), "pairs": rows })).file("dict_crossover.csv", csv))
}

fn run_freq(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let normalize = params.flag("normalize");
    let op = Frequency {
        word: word.to_string(),
        normalize,
        level: level(params, Level::Lemma)?,
    };
    let series = per_period(ctx, op, ctx.range(params)?)?;
    let csv = series_csv(&series, "frequency", |v| format_real(*v));
    let name = format!("freq_{}{}.csv", slug(word), if normalize { "_normalized" } else { "" });
    Ok(Report::new(json!({ "word": word, "normalize": normalize, "series": series })).file(name, csv))
}

fn run_exists(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let series = per_period(ctx, Exists { word: word.to_string() }, ctx.range(params)?)?;
    Ok(Report::new(json!({ "word": word, "series": series })))
}

fn run_metrics(ctx: &Context, params: &Params) -> Result<Report> {
    let order = params.parse_or("order", 1usize)?;
    let metrics = vocab_metrics(ctx.tree, ctx.range(params)?, order)?;
    let mut csv = format!("period,unique_words,average_word_length,ngrams_{order}\n");
    for (i, (u, a)) in metrics.unique_word_count.entries.iter().zip(&metrics.average_word_length.entries).enumerate() {
        let ngrams = metrics.ngram_count.as_ref().map(|s| s.entries[i].value.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{},{},{ngrams}\n", u.period, u.value, format_real(a.value)));
    }
    Ok(Report::new(&metrics).file("vocab_metrics.csv", csv))
}

fn run_morpheme(ctx: &Context, params: &Params) -> Result<Report> {
    let pattern = params.positional(0, "pattern")?;
    let op = MorphemeFrequency {
        level: level(params, Level::Lemma)?,
        ..MorphemeFrequency::new(pattern)
    };
    let series = per_period(ctx, op, ctx.range(params)?)?;
    let mut csv = String::from("period,raw,per_million\n");
    for e in &series.entries {
        csv.push_str(&format!("{},{},{}\n", e.period, e.value.raw, format_real(e.value.per_million)));
    }
    Ok(Report::new(json!({ "pattern": pattern, "series": series })).file(format!("morpheme_{}.csv", slug(pattern)), csv))
}

fn run_matching(ctx: &Context, params: &Params) -> Result<Report> {
    let kind: MatchKind = params.positional(0, "prefix|suffix|substring")?.parse()?;
    let pattern = params.positional(1, "pattern")?;
    let series = per_period(
        ctx,
        WordsMatching {
            kind,
            pattern: pattern.to_string(),
        },
        ctx.range(params)?,
    )?;
    Ok(Report::new(json!({ "pattern": pattern, "series": series })))
}

pub fn analyses() -> Registry<dyn Analysis> {
    let mut r: Registry<dyn Analysis> = Registry::new("analysis");
    r.add("stats", "descriptive corpus statistics", run_stats);
    r.add("divergence", "Jaccard and JSD matrices between periods", run_divergence);
    r.add("contributions", "per-word JSD contributions (--a, --b, --top-k)", run_contributions);
    r.add("survived", "base-period words surviving in later periods (--base)", run_survived);
    r.add("ortho", "final-consonant variant ratios (b-p, d-t, c-ç, g-k)", run_ortho);
    r.add("circumflex", "circumflexed-letter frequency", run_circumflex);
    r.add("dict-crossover", "replacement series and crossover periods", run_dict_crossover);
    r.add("freq", "frequency series of a word (--normalize)", run_freq);
    r.add("exists", "presence of a word per period", run_exists);
    r.add("metrics", "vocabulary size and mean word length", run_metrics);
    r.add("morpheme", "token-weighted occurrences of a character pattern", run_morpheme);
    r.add("matching", "words matching a prefix, suffix or substring", run_matching);
    r
}

fn run_most_similar(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let kind = ctx.kind(params)?;
    let op = MostSimilar {
        word: word.to_string(),
        k: top_k(params, 10)?,
        kind,
    };
    let series = per_period(ctx, op, ctx.scope(params)?)?;
    let csv = ranking_csv(&series, "cosine");
    Ok(Report::new(json!({ "word": word, "kind": kind, "series": series }))
        .file(format!("most_similar_{}_{kind}.csv", slug(word)), csv))
}

fn run_aligned_most_similar(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let kind = ctx.kind(params)?;
    let target = params.parse_or("target", ctx.last_period())?;
    let base = params.parse_or("base", ctx.first_period())?;
    let neighbors = ctx.tree.perform(&AlignedMostSimilar {
        word: word.to_string(),
        k: top_k(params, 10)?,
        target,
        base,
        kind,
    })?;
    let csv = neighbors_csv(&neighbors);
    Ok(Report::new(json!({
        "word": word,
        "kind": kind,
        "target": target,
        "base": base,
        "neighbors": neighbors,
    }))
    .file(format!("aligned_{}_{kind}_{target}_to_{base}.csv", slug(word)), csv))
}

fn run_semantic_change(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let kind = ctx.kind(params)?;
    let series = ctx.tree.perform(&SemanticChange {
        word: word.to_string(),
        range: ctx.range(params)?,
        kind,
    })?;
    let mut csv = String::from("period,distance,oov\n");
    for e in &series.entries {
        csv.push_str(&format!(
            "{},{},{}\n",
            e.period,
            e.value.distance.map(|d| format_fixed(d, 6)).unwrap_or_default(),
            e.value.out_of_vocabulary
        ));
    }
    Ok(Report::new(json!({ "word": word, "kind": kind, "series": series }))
        .file(format!("semantic_change_{}_{kind}.csv", slug(word)), csv))
}

fn run_collocations(ctx: &Context, params: &Params) -> Result<Report> {
    let word = params.positional(0, "word")?;
    let op = Collocations {
        word: word.to_string(),
        k: top_k(params, 10)?,
    };
    let series = per_period(ctx, op, ctx.scope(params)?)?;
    let csv = ranking_csv(&series, "ppmi");
    Ok(Report::new(json!({ "word": word, "series": series })).file(format!("collocations_{}.csv", slug(word)), csv))
}

fn pair(params: &Params) -> Result<(String, String)> {
    Ok((params.positional(0, "u")?.to_string(), params.positional(1, "v")?.to_string()))
}

fn run_similarity(ctx: &Context, params: &Params) -> Result<Report> {
    let (u, v) = pair(params)?;
    let kind = ctx.kind(params)?;
    let series = per_period(ctx, Similarity { u: u.clone(), v: v.clone(), kind }, ctx.scope(params)?)?;
    Ok(Report::new(json!({ "u": u, "v": v, "kind": kind, "series": series })))
}

fn run_association(ctx: &Context, params: &Params) -> Result<Report> {
    let (u, v) = pair(params)?;
    let series = per_period(ctx, Association { u: u.clone(), v: v.clone() }, ctx.scope(params)?)?;
    Ok(Report::new(json!({ "u": u, "v": v, "series": series })))
}

fn run_cofrequency(ctx: &Context, params: &Params) -> Result<Report> {
    let (u, v) = pair(params)?;
    let series = per_period(ctx, CoFrequency { u: u.clone(), v: v.clone() }, ctx.scope(params)?)?;
    Ok(Report::new(json!({ "u": u, "v": v, "series": series })))
}

pub fn queries() -> Registry<dyn Analysis> {
    let mut r: Registry<dyn Analysis> = Registry::new("query");
    r.add("most-similar", "nearest words by cosine within a period", run_most_similar);
    r.add(
        "aligned-most-similar",
        "nearest base-period words to an aligned target-period vector",
        run_aligned_most_similar,
    );
    r.add("semantic-change", "cosine distance from the first period after alignment", run_semantic_change);
    r.add("collocations", "highest-PPMI context words", run_collocations);
    r.add("similarity", "cosine between two words", run_similarity);
    r.add("association", "PPMI between two words", run_association);
    r.add("cofrequency", "window co-occurrence count of two words", run_cofrequency);
    r
}

pub fn svd_solvers(seed: u64) -> Registry<dyn SvdSolver> {
    let mut r: Registry<dyn SvdSolver> = Registry::new("SVD solver");
    r.register("dense", Arc::new(DenseSvd));
    r.register(
        "randomized",
        Arc::new(RandomizedSvd {
            seed,
            ..RandomizedSvd::default()
        }),
    );
    r
}

pub fn embedding_methods(config: &RunConfig) -> Result<Registry<dyn EmbeddingMethod>> {
    let solver = svd_solvers(config.seed.unwrap_or(0)).get(&config.embedding.solver)?;
    let mut r: Registry<dyn EmbeddingMethod> = Registry::new("embedding method");
    r.register(
        "svd",
        Arc::new(SvdMethod {
            dim: config.embedding.dim,
            solver,
        }),
    );
    r.register("cbow", Arc::new(CbowMethod { config: config.cbow() }));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_grammar() {
        let p = Params::parse(&["belge", "--normalize", "--k", "5", "--range=1930-1989"]).unwrap();
        assert_eq!(p.positional(0, "w").unwrap(), "belge");
        assert!(p.flag("normalize"));
        assert_eq!(p.parse_or("k", 10usize).unwrap(), 5);
        assert_eq!(p.get("range"), Some("1930-1989"));
        assert!(p.positional(1, "w").is_err());
        assert!(Params::parse(&["--k"]).is_err());
        assert!(p.with("k", "x").parse_or("k", 1usize).is_err());
    }

    #[test]
    fn registries_resolve_by_name() {
        assert!(analyses().get("divergence").is_ok());
        assert!(analyses().get("nope").is_err());
        assert!(queries().names().contains(&"aligned-most-similar"));
        assert_eq!(svd_solvers(0).get("randomized").unwrap().name(), "randomized");
        let cfg = RunConfig::default();
        assert_eq!(embedding_methods(&cfg).unwrap().get("cbow").unwrap().provenance(), Provenance::Cbow);
    }
}
