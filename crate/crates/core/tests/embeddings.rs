mod common;

use approx::assert_abs_diff_eq;
use common::*;
use diachron::embeddings::{
    association, build_ppmi, collocations, most_similar, similarity, svd_embeddings, train_cbow, CbowConfig,
    CooccurrenceMatrix, CsrMatrix, DenseSvd, PpmiMatrix, Provenance, RandomizedSvd, VocabIndex,
};
use diachron::{Corpus, Error};
use nalgebra::DMatrix;

fn counts(texts: &[&str], window: usize) -> CooccurrenceMatrix {
    let c = leaf(1930, texts);
    CooccurrenceMatrix::count(c.period(), c.processed().unwrap(), c.vocabulary().unwrap(), window).unwrap()
}

#[test]
fn cooccurrence_by_hand() {
    let m = counts(&["a b"], 2);
    assert_eq!((m.cofrequency("a", "b"), m.cofrequency("b", "a")), (1, 1));
    assert_eq!(m.grand_total, 2);

    let m = counts(&["a"], 2);
    assert_eq!(m.counts.nnz(), 0);
    assert_eq!(m.grand_total, 0);

    let m = counts(&["a b a b"], 2);
    assert_eq!(m.cofrequency("a", "b"), 3);
    assert_eq!(m.cofrequency("a", "a"), 2);
    assert_eq!(m.cofrequency("b", "b"), 2);
    assert_eq!(m.grand_total, 10);

    let m = counts(&["a b", "c d"], 2);
    assert_eq!(m.cofrequency("b", "c"), 0);
    let m = counts(&["a x y z b"], 2);
    assert_eq!(m.cofrequency("a", "b"), 0);
    assert!(CooccurrenceMatrix::count(decade(1930), &[], &vocab(1930, &[]), 0).is_err());
}

#[test]
fn out_of_vocabulary_tokens_keep_their_position() {
    // "1923" is filtered from the vocabulary but still separates a from b
    let m = counts(&["a 1923 , b"], 2);
    assert_eq!(m.cofrequency("a", "b"), 0);
    let m = counts(&["a 1923 b"], 2);
    assert_eq!(m.cofrequency("a", "b"), 1);
}

/// Eq.-style PPMI recomputed from dense probability tables.
fn dense_ppmi(m: &CooccurrenceMatrix, alpha: f64) -> DMatrix<f64> {
    let n = m.vocab.len();
    let c = m.counts.map(|v| v as f64).to_dense();
    let total: f64 = c.sum();
    let ctx: Vec<f64> = (0..n).map(|j| c.column(j).sum().powf(alpha)).collect();
    let ctx_sum: f64 = ctx.iter().sum();
    DMatrix::from_fn(n, n, |i, j| {
        if c[(i, j)] == 0.0 {
            return 0.0;
        }
        let pmi = ((c[(i, j)] / total) / ((c.row(i).sum() / total) * (ctx[j] / ctx_sum))).ln();
        pmi.max(0.0)
    })
}

const TOY: &[&str] = &["a b c a b", "c c a b a", "b a c b"];

#[test]
fn ppmi_matches_dense_tables() {
    let m = counts(TOY, 2);
    for alpha in [0.75, 1.0] {
        let p = build_ppmi(&m, alpha).unwrap();
        let oracle = dense_ppmi(&m, alpha);
        let got = p.values.to_dense();
        assert!((got - &oracle).abs().max() < 1e-12);
    }

    let single = build_ppmi(&counts(&["a a a a"], 2), 0.75).unwrap();
    assert_eq!(single.value(0, 0), 0.0);

    let apart = build_ppmi(&counts(&["a b", "c d"], 2), 0.75).unwrap();
    assert_eq!(association(&apart, "a", "c").unwrap(), 0.0);

    assert!(build_ppmi(&counts(&["a"], 2), 0.75).is_err());
    assert!(build_ppmi(&m, 0.0).is_err());
}

#[test]
fn collocations_follow_dense_ranking() {
    let m = counts(&["a b c d a b e a c", "d e a b b d c", "e e a d b c"], 2);
    let p = build_ppmi(&m, 0.75).unwrap();
    let oracle = dense_ppmi(&m, 0.75);
    for (u, word) in m.vocab.words().iter().enumerate() {
        let mut expected: Vec<(String, f64)> = (0..m.vocab.len())
            .filter(|&v| v != u && oracle[(u, v)] > 0.0)
            .map(|v| (m.vocab.word(v).to_string(), oracle[(u, v)]))
            .collect();
        expected.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        expected.truncate(3);
        let got = collocations(&p, word, 3).unwrap();
        assert_eq!(got.iter().map(|n| n.word.clone()).collect::<Vec<_>>(), expected.iter().map(|e| e.0.clone()).collect::<Vec<_>>());
        for (g, e) in got.iter().zip(&expected) {
            assert_abs_diff_eq!(g.score, e.1, epsilon = 1e-12);
        }
    }
    assert!(matches!(collocations(&p, "zz", 3), Err(Error::OutOfVocabulary { .. })));
    assert!(collocations(&p, "a", 0).is_err());
}

fn ppmi_from(values: DMatrix<f64>) -> PpmiMatrix {
    let n = values.nrows();
    let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let triplets = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter_map(|(i, j)| {
        let v = values[(i, j)];
        (v != 0.0).then_some((i, j, v))
    });
    PpmiMatrix {
        period: decade(1930),
        vocab: VocabIndex::from(words),
        values: CsrMatrix::from_triplets(n, n, triplets.collect()),
        alpha: 0.75,
    }
}

#[test]
fn svd_scalar_and_bounds() {
    let p = ppmi_from(DMatrix::from_element(1, 1, 4.0));
    let e = svd_embeddings(&p, 1, &DenseSvd).unwrap();
    assert_abs_diff_eq!(e.matrix[(0, 0)].abs(), 2.0, epsilon = 1e-12);
    assert_eq!(e.provenance, Provenance::Svd);
    assert!(svd_embeddings(&p, 2, &DenseSvd).is_err());
    assert!(svd_embeddings(&p, 0, &DenseSvd).is_err());
}

#[test]
fn svd_reconstruction_error_is_tail_mass() {
    let p = build_ppmi(&counts(TOY, 2), 0.75).unwrap();
    let a = p.values.to_dense();
    // singular values from the eigenvalues of AᵀA, independent of the SVD routine
    let mut eig: Vec<f64> = (a.transpose() * &a).symmetric_eigen().eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    let tail: f64 = eig[2..].iter().map(|s| s * s).sum::<f64>().sqrt();

    let e = svd_embeddings(&p, 2, &DenseSvd).unwrap();
    let recon = &e.matrix * e.context.as_ref().unwrap().transpose();
    assert_abs_diff_eq!((&a - recon).norm(), tail, epsilon = 1e-9);

    let full = svd_embeddings(&p, 3, &DenseSvd).unwrap();
    let recon = &full.matrix * full.context.as_ref().unwrap().transpose();
    assert!((&a - recon).norm() / a.norm() <= 1e-6);
}

#[test]
fn randomized_solver_agrees_on_fixture() {
    let node = embedded_fixture();
    for l in node.leaves() {
        let p = l.ppmi().unwrap();
        let dense = svd_embeddings(p, 4, &DenseSvd).unwrap();
        let approx = svd_embeddings(p, 4, &RandomizedSvd { oversample: 20, power_iterations: 6, seed: 3 }).unwrap();
        let g = |e: &diachron::embeddings::EmbeddingSet| &e.matrix * e.matrix.transpose();
        let rel = (g(&dense) - g(&approx)).norm() / g(&dense).norm();
        assert!(rel < 1e-3, "{rel}");
    }
}

#[test]
fn queries_on_fixture() {
    let node = embedded_fixture();
    let late = node.leaves()[1];
    let set = late.embeddings(Provenance::Svd).unwrap();
    assert_abs_diff_eq!(similarity(set, "radyo", "radyo").unwrap(), 1.0, epsilon = 1e-12);
    let near = most_similar(set, "televizyon", 5).unwrap();
    assert_eq!(near.len(), 5);
    assert!(near.iter().all(|n| n.word != "televizyon"));
    assert!(near.windows(2).all(|w| w[0].score >= w[1].score));
    assert!(near[..3].iter().any(|n| ["radyo", "gazete", "sinema"].contains(&n.word.as_str())), "{near:?}");
    assert!(matches!(similarity(set, "radyo", "yokkelime"), Err(Error::OutOfVocabulary { .. })));

    let early = node.leaves()[0];
    assert!(matches!(early.embeddings(Provenance::Svd).unwrap().vector("televizyon"), Err(Error::OutOfVocabulary { .. })));
}

fn two_class_corpus() -> Corpus {
    let mut texts = Vec::new();
    for i in 0..60 {
        let (x, y) = [("elma", "armut"), ("kedi", "köpek")][i % 2];
        texts.push(format!("taze {x} yedik bugün {y} tatlı"));
    }
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    leaf(1930, &refs)
}

#[test]
fn cbow_shape_and_determinism() {
    let c = two_class_corpus();
    let cfg = CbowConfig { dim: 8, epochs: 2, seed: 9, ..CbowConfig::default() };
    let a = train_cbow(c.processed().unwrap(), c.vocabulary().unwrap(), &cfg).unwrap();
    let b = train_cbow(c.processed().unwrap(), c.vocabulary().unwrap(), &cfg).unwrap();
    assert_eq!(a.embeddings.matrix.shape(), (c.vocabulary().unwrap().len(), 8));
    assert!(a.embeddings.matrix.iter().all(|v| v.is_finite()));
    assert_eq!(a.embeddings.matrix, b.embeddings.matrix);
    assert_eq!(a.epoch_losses.len(), 2);
    assert_eq!(a.embeddings.seed, Some(9));

    let other = train_cbow(c.processed().unwrap(), c.vocabulary().unwrap(), &CbowConfig { seed: 10, ..cfg.clone() }).unwrap();
    assert_ne!(a.embeddings.matrix, other.embeddings.matrix);
}

#[test]
fn cbow_rejects_bad_input() {
    let empty = leaf(1930, &[]);
    let err = train_cbow(&[], empty.vocabulary().unwrap(), &CbowConfig::default()).unwrap_err();
    assert!(matches!(err, Error::EmptyVocabulary(_)));
    let c = two_class_corpus();
    for bad in [CbowConfig { dim: 0, ..CbowConfig::default() }, CbowConfig { epochs: 0, ..CbowConfig::default() }] {
        assert!(train_cbow(c.processed().unwrap(), c.vocabulary().unwrap(), &bad).is_err());
    }
}
