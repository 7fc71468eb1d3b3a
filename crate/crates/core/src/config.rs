//! Run configuration, read from a single JSON document.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::corpus::IngestOptions;
use crate::embeddings::{CbowConfig, DEFAULT_ALPHA, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::period::Bucketing;
use crate::preprocess::{Analyzer, FilterConfig, LookupAnalyzer, NormalizeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub alpha: f64,
    /// SVD solver: `dense` or `randomized`.
    pub solver: String,
    pub cbow: CbowConfig,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 300,
            window: DEFAULT_WINDOW,
            alpha: DEFAULT_ALPHA,
            solver: "dense".into(),
            cbow: CbowConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub corpus_root: PathBuf,
    pub output_dir: PathBuf,
    pub bucketing: Bucketing,
    pub filter: FilterConfig,
    /// Characters dropped during normalization.
    pub remove_chars: Option<Vec<char>>,
    /// Two-column `surface<TAB>lemma` table; relative paths resolve against `corpus_root`.
    pub analyzer: Option<PathBuf>,
    pub embedding: EmbeddingConfig,
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus_root: PathBuf::from("."),
            output_dir: PathBuf::from("out"),
            bucketing: Bucketing::Decades,
            filter: FilterConfig::default(),
            remove_chars: None,
            analyzer: None,
            embedding: EmbeddingConfig::default(),
            seed: None,
        }
    }
}

impl RunConfig {
    pub fn parse(json: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(json).map_err(|source| Error::Json {
            context: "config".into(),
            source,
        })?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.corpus_root, &mut cfg.output_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(a) = cfg.analyzer.as_mut() {
            if a.is_relative() {
                *a = base.join(&*a);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.bucketing.validate()?;
        self.filter.validate()?;
        if self.embedding.dim == 0 {
            return Err(Error::param("embedding dimension must be at least 1"));
        }
        if self.embedding.window == 0 {
            return Err(Error::param("co-occurrence window must be at least 1"));
        }
        if !(self.embedding.alpha > 0.0 && self.embedding.alpha.is_finite()) {
            return Err(Error::param("smoothing exponent must be positive"));
        }
        self.cbow().validate()
    }

    /// CBOW settings with the shared dimension, window and seed applied.
    pub fn cbow(&self) -> CbowConfig {
        CbowConfig {
            dim: self.embedding.dim,
            window: self.embedding.window,
            seed: self.seed.unwrap_or(self.embedding.cbow.seed),
            ..self.embedding.cbow.clone()
        }
    }

    pub fn ingest_options(&self) -> Result<IngestOptions> {
        let analyzer: Arc<dyn Analyzer> = match &self.analyzer {
            Some(path) => {
                let path = if path.is_relative() && !path.exists() {
                    self.corpus_root.join(path)
                } else {
                    path.clone()
                };
                Arc::new(LookupAnalyzer::load(&path)?)
            }
            None => Arc::new(LookupAnalyzer::new()),
        };
        Ok(IngestOptions {
            bucketing: self.bucketing.clone(),
            filter: self.filter.clone(),
            normalize: match &self.remove_chars {
                Some(chars) => NormalizeConfig { remove: chars.clone() },
                None => NormalizeConfig::default(),
            },
            analyzer,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = RunConfig::parse(r#"{"embedding":{"dim":16},"seed":7}"#).unwrap();
        assert_eq!(cfg.embedding.dim, 16);
        assert_eq!(cfg.cbow().dim, 16);
        assert_eq!(cfg.cbow().seed, 7);
        assert_eq!(cfg.embedding.window, 2);
        cfg.validate().unwrap();
        assert!(RunConfig::parse(r#"{"bogus":1}"#).is_err());
        let zero = RunConfig::parse(r#"{"embedding":{"dim":0}}"#).unwrap();
        assert!(zero.validate().is_err());
    }
}
