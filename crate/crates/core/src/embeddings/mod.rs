//! Count-based and predictive word vectors per period.

mod cbow;
mod cooccurrence;
mod method;
mod ppmi;
mod query;
mod set;
pub mod sparse;
mod svd;

pub use cbow::{train_cbow, CbowConfig, CbowOutcome};
pub use cooccurrence::{vocab_index, CooccurrenceMatrix, DEFAULT_WINDOW};
pub use method::{
    svd_embeddings, CbowMethod, CreateCooccurrence, CreateEmbeddings, CreatePpmi, EmbeddingMethod,
    SvdMethod,
};
pub use ppmi::{build_ppmi, PpmiMatrix, DEFAULT_ALPHA};
pub use query::{
    association, cofrequency, collocations, most_similar, nearest, similarity, Association,
    CoFrequency, Collocations, MostSimilar, Neighbor, Similarity,
};
pub use set::{cosine, EmbeddingSet, Provenance};
pub use sparse::{CsrMatrix, VocabIndex};
pub use svd::{canonicalize, DenseSvd, RandomizedSvd, SvdSolver, TruncatedSvd};
