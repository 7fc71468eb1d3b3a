//! Embedding methods behind a common trait, and the creators that cache
//! matrices and vectors on each leaf.

use std::sync::Arc;

use super::cbow::{train_cbow, CbowConfig};
use super::cooccurrence::{CooccurrenceMatrix, DEFAULT_WINDOW};
use super::ppmi::{build_ppmi, PpmiMatrix, DEFAULT_ALPHA};
use super::set::{EmbeddingSet, Provenance};
use super::svd::SvdSolver;
use crate::corpus::Corpus;
use crate::error::Result;
use crate::operation::Creator;

/// W = U Σ^{1/2}, C = V Σ^{1/2} from a rank-`dim` factorization of `ppmi`.
pub fn svd_embeddings(ppmi: &PpmiMatrix, dim: usize, solver: &dyn SvdSolver) -> Result<EmbeddingSet> {
    let svd = solver.decompose(&ppmi.values, dim)?;
    let root = svd.singular_values.map(f64::sqrt);
    let mut w = svd.u;
    let mut c = svd.v;
    for (k, r) in root.iter().enumerate() {
        w.column_mut(k).scale_mut(*r);
        c.column_mut(k).scale_mut(*r);
    }
    Ok(EmbeddingSet {
        period: ppmi.period,
        vocab: ppmi.vocab.clone(),
        matrix: w,
        provenance: Provenance::Svd,
        seed: None,
        context: Some(c),
    })
}

pub trait EmbeddingMethod: Send + Sync {
    fn name(&self) -> &'static str;

    fn provenance(&self) -> Provenance;

    fn embed(&self, corpus: &Corpus) -> Result<EmbeddingSet>;
}

/// Factorizes the cached PPMI matrix.
pub struct SvdMethod {
    pub dim: usize,
    pub solver: Arc<dyn SvdSolver>,
}

impl EmbeddingMethod for SvdMethod {
    fn name(&self) -> &'static str {
        "svd"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Svd
    }

    fn embed(&self, corpus: &Corpus) -> Result<EmbeddingSet> {
        svd_embeddings(corpus.ppmi()?, self.dim, self.solver.as_ref())
    }
}

#[derive(Debug, Clone, Default)]
pub struct CbowMethod {
    pub config: CbowConfig,
}

impl EmbeddingMethod for CbowMethod {
    fn name(&self) -> &'static str {
        "cbow"
    }

    fn provenance(&self) -> Provenance {
        Provenance::Cbow
    }

    fn embed(&self, corpus: &Corpus) -> Result<EmbeddingSet> {
        let out = train_cbow(corpus.processed()?, corpus.vocabulary()?, &self.config)?;
        Ok(out.embeddings)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CreateCooccurrence {
    pub window: usize,
}

impl Default for CreateCooccurrence {
    fn default() -> Self {
        CreateCooccurrence { window: DEFAULT_WINDOW }
    }
}

impl Creator for CreateCooccurrence {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()> {
        let cooc = CooccurrenceMatrix::count(
            corpus.period(),
            corpus.processed()?,
            corpus.vocabulary()?,
            self.window,
        )?;
        corpus.artifacts.cooccurrence = Some(cooc);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CreatePpmi {
    pub alpha: f64,
}

impl Default for CreatePpmi {
    fn default() -> Self {
        CreatePpmi { alpha: DEFAULT_ALPHA }
    }
}

impl Creator for CreatePpmi {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()> {
        let ppmi = build_ppmi(corpus.cooccurrence()?, self.alpha)?;
        corpus.artifacts.ppmi = Some(ppmi);
        Ok(())
    }
}

pub struct CreateEmbeddings {
    pub method: Arc<dyn EmbeddingMethod>,
}

impl Creator for CreateEmbeddings {
    fn on_corpus(&self, corpus: &mut Corpus) -> Result<()> {
        let set = self.method.embed(corpus)?;
        corpus.artifacts.embeddings.insert(self.method.provenance(), set);
        Ok(())
    }
}
