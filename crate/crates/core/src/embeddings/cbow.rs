//! Continuous bag-of-words with negative sampling, single worker.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cooccurrence::vocab_index;
use super::set::{EmbeddingSet, Provenance};
use crate::error::{Error, Result};
use crate::lexicon::Vocabulary;
use crate::preprocess::ProcessedDocument;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CbowConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    /// Frequent-word downsampling rate; 0 disables downsampling.
    pub downsample: f64,
    /// Exponent of the unigram distribution negatives are drawn from.
    pub smoothing_alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for CbowConfig {
    fn default() -> Self {
        CbowConfig {
            dim: 300,
            window: 2,
            negatives: 5,
            downsample: 1e-5,
            smoothing_alpha: 0.75,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            seed: 1,
        }
    }
}

impl CbowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::param("CBOW dimension must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::param("CBOW window must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::param("CBOW needs at least one epoch"));
        }
        if self.downsample < 0.0 || !self.downsample.is_finite() {
            return Err(Error::param("downsample rate must be a non-negative number"));
        }
        if !(self.smoothing_alpha > 0.0 && self.smoothing_alpha.is_finite()) {
            return Err(Error::param("smoothing exponent must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return Err(Error::param("learning rates must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CbowOutcome {
    pub embeddings: EmbeddingSet,
    /// Mean negative-sampling loss per training example, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Cumulative α-smoothed unigram weights for drawing negatives.
struct NoiseDistribution {
    cumulative: Vec<f64>,
}

impl NoiseDistribution {
    fn new(freqs: &[u64], alpha: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = freqs
            .iter()
            .map(|&f| {
                acc += (f as f64).powf(alpha);
                acc
            })
            .collect();
        NoiseDistribution { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Keep probability of a word with `count` occurrences among `total` tokens:
/// (√(f / (s·T)) + 1) · (s·T) / f.
fn keep_probability(count: u64, total: u64, rate: f64) -> f64 {
    if rate <= 0.0 {
        return 1.0;
    }
    let threshold = rate * total as f64;
    let f = count as f64;
    (((f / threshold).sqrt() + 1.0) * threshold / f).min(1.0)
}

/// Trains input/output vectors over the documents' lemma streams, restricted
/// to `vocabulary`. Rows of the result are the input-side vectors.
pub fn train_cbow(
    docs: &[ProcessedDocument],
    vocabulary: &Vocabulary,
    cfg: &CbowConfig,
) -> Result<CbowOutcome> {
    cfg.validate()?;
    let vocab = vocab_index(vocabulary);
    if vocab.is_empty() || vocabulary.token_total == 0 {
        return Err(Error::EmptyVocabulary(vocabulary.period.to_string()));
    }
    let n = vocab.len();
    let d = cfg.dim;
    let freqs: Vec<u64> = vocab.words().iter().map(|w| vocabulary.frequency(w)).collect();
    let keep: Vec<f64> = freqs
        .iter()
        .map(|&f| keep_probability(f, vocabulary.token_total, cfg.downsample))
        .collect();
    let noise = NoiseDistribution::new(&freqs, cfg.smoothing_alpha);
    let streams: Vec<Vec<usize>> = docs
        .iter()
        .map(|doc| doc.lemmas.iter().filter_map(|l| vocab.id(l)).collect())
        .collect();
    let words_per_epoch: usize = streams.iter().map(Vec::len).sum();
    if words_per_epoch == 0 {
        return Err(Error::EmptyVocabulary(vocabulary.period.to_string()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = 0.5 / d as f64;
    // row-major storage: vectors are contiguous slices
    let mut input: Vec<f64> = (0..n * d).map(|_| rng.gen_range(-scale..scale)).collect();
    let mut output = vec![0.0f64; n * d];
    let mut hidden = vec![0.0f64; d];
    let mut grad = vec![0.0f64; d];

    let total_words = (words_per_epoch * cfg.epochs) as f64;
    let mut processed = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut sample = Vec::new();
    let mut context = Vec::with_capacity(2 * cfg.window);

    for _ in 0..cfg.epochs {
        let mut loss = 0.0;
        let mut examples = 0usize;
        for stream in &streams {
            sample.clear();
            for &w in stream {
                if keep[w] >= 1.0 || rng.gen::<f64>() < keep[w] {
                    sample.push(w);
                }
            }
            for (i, &center) in sample.iter().enumerate() {
                let progress = processed as f64 / total_words;
                let lr = (cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) * progress)
                    .max(cfg.min_learning_rate);
                processed += 1;

                context.clear();
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window).min(sample.len() - 1);
                context.extend((lo..=hi).filter(|&j| j != i).map(|j| sample[j]));
                if context.is_empty() {
                    continue;
                }
                hidden.iter_mut().for_each(|h| *h = 0.0);
                for &c in &context {
                    for (h, x) in hidden.iter_mut().zip(&input[c * d..(c + 1) * d]) {
                        *h += x;
                    }
                }
                let inv = 1.0 / context.len() as f64;
                hidden.iter_mut().for_each(|h| *h *= inv);
                grad.iter_mut().for_each(|g| *g = 0.0);

                for k in 0..=cfg.negatives {
                    let (target, label) = if k == 0 {
                        (center, 1.0)
                    } else {
                        let t = noise.sample(&mut rng);
                        if t == center {
                            continue;
                        }
                        (t, 0.0)
                    };
                    let out = &mut output[target * d..(target + 1) * d];
                    let score: f64 = hidden.iter().zip(out.iter()).map(|(a, b)| a * b).sum();
                    let prob = sigmoid(score);
                    loss -= if label > 0.0 {
                        prob.max(1e-300).ln()
                    } else {
                        (1.0 - prob).max(1e-300).ln()
                    };
                    let g = (label - prob) * lr;
                    for ((ge, o), h) in grad.iter_mut().zip(out.iter_mut()).zip(&hidden) {
                        *ge += g * *o;
                        *o += g * h;
                    }
                }
                for &c in &context {
                    for (x, ge) in input[c * d..(c + 1) * d].iter_mut().zip(&grad) {
                        *x += ge;
                    }
                }
                examples += 1;
            }
        }
        epoch_losses.push(if examples == 0 { 0.0 } else { loss / examples as f64 });
    }

    if input.iter().any(|x| !x.is_finite()) {
        return Err(Error::Internal("CBOW training diverged".into()));
    }
    Ok(CbowOutcome {
        embeddings: EmbeddingSet {
            period: vocabulary.period,
            vocab,
            matrix: DMatrix::from_row_slice(n, d, &input),
            provenance: Provenance::Cbow,
            seed: Some(cfg.seed),
            context: None,
        },
        epoch_losses,
    })
}
