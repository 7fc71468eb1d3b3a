//! Truncated SVD behind a solver trait: an exact dense path and a
//! randomized range-finder for vocabularies too large to densify.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Rank-`k` factors with singular values in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub trait SvdSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn decompose(&self, matrix: &CsrMatrix<f64>, rank: usize) -> Result<TruncatedSvd>;
}

/// Full SVD of the densified matrix, truncated afterwards.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSvd;

impl SvdSolver for DenseSvd {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn decompose(&self, matrix: &CsrMatrix<f64>, rank: usize) -> Result<TruncatedSvd> {
        check_rank(matrix, rank)?;
        let svd = matrix.to_dense().svd(true, true);
        let u = svd.u.ok_or_else(|| Error::Internal("SVD produced no U".into()))?;
        let v_t = svd.v_t.ok_or_else(|| Error::Internal("SVD produced no Vᵀ".into()))?;
        Ok(canonicalize(u, svd.singular_values, v_t.transpose(), rank))
    }
}

/// Randomized range finder with power iterations.
#[derive(Debug, Clone, Copy)]
pub struct RandomizedSvd {
    pub oversample: usize,
    pub power_iterations: usize,
    pub seed: u64,
}

impl Default for RandomizedSvd {
    fn default() -> Self {
        RandomizedSvd {
            oversample: 10,
            power_iterations: 4,
            seed: 0,
        }
    }
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

impl SvdSolver for RandomizedSvd {
    fn name(&self) -> &'static str {
        "randomized"
    }

    fn decompose(&self, matrix: &CsrMatrix<f64>, rank: usize) -> Result<TruncatedSvd> {
        check_rank(matrix, rank)?;
        let (n_rows, n_cols) = (matrix.n_rows(), matrix.n_cols());
        let width = (rank + self.oversample).min(n_rows.min(n_cols));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let omega = DMatrix::from_fn(n_cols, width, |_, _| rng.gen_range(-1.0..1.0));
        let mut q = orthonormal_basis(matrix.mul_dense(&omega));
        for _ in 0..self.power_iterations {
            let z = orthonormal_basis(matrix.tr_mul_dense(&q));
            q = orthonormal_basis(matrix.mul_dense(&z));
        }
        // B = Qᵀ A, computed as (Aᵀ Q)ᵀ
        let b = matrix.tr_mul_dense(&q).transpose();
        let svd = b.svd(true, true);
        let ub = svd.u.ok_or_else(|| Error::Internal("SVD produced no U".into()))?;
        let v_t = svd.v_t.ok_or_else(|| Error::Internal("SVD produced no Vᵀ".into()))?;
        Ok(canonicalize(q * ub, svd.singular_values, v_t.transpose(), rank))
    }
}

fn check_rank(matrix: &CsrMatrix<f64>, rank: usize) -> Result<()> {
    let limit = matrix.n_rows().min(matrix.n_cols());
    if rank == 0 {
        return Err(Error::param("embedding dimension must be at least 1"));
    }
    if rank > limit {
        return Err(Error::param(format!(
            "embedding dimension {rank} exceeds the vocabulary size {limit}"
        )));
    }
    Ok(())
}

/// Orders components by descending singular value (stable on ties), keeps
/// `rank` of them and flips signs so each left vector's largest-magnitude
/// entry (first on ties) is positive.
pub fn canonicalize(u: DMatrix<f64>, s: DVector<f64>, v: DMatrix<f64>, rank: usize) -> TruncatedSvd {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    order.truncate(rank);
    let mut uk = DMatrix::zeros(u.nrows(), rank);
    let mut vk = DMatrix::zeros(v.nrows(), rank);
    let mut sk = DVector::zeros(rank);
    for (k, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut pivot = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        uk.set_column(k, &(col * sign));
        vk.set_column(k, &(v.column(src) * sign));
        sk[k] = s[src];
    }
    TruncatedSvd {
        u: uk,
        singular_values: sk,
        v: vk,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CsrMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if rng.gen_bool(0.3) {
                    t.push((r, c, rng.gen_range(0.1..3.0)));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    #[test]
    fn scalar_svd() {
        let m = CsrMatrix::from_triplets(1, 1, vec![(0, 0, 4.0)]);
        let svd = DenseSvd.decompose(&m, 1).unwrap();
        assert!((svd.singular_values[0] - 4.0).abs() < 1e-12);
        assert!((svd.u[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_limits() {
        let m = sample(4, 1);
        assert!(DenseSvd.decompose(&m, 5).is_err());
        assert!(DenseSvd.decompose(&m, 0).is_err());
    }

    #[test]
    fn signs_are_canonical() {
        let svd = DenseSvd.decompose(&sample(12, 3), 6).unwrap();
        for k in 0..6 {
            let col = svd.u.column(k);
            let max = col.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            assert!(max > 0.0);
        }
        let s = &svd.singular_values;
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
    }

    #[test]
    fn randomized_matches_dense_leading_values() {
        // exact rank 5, so the range finder captures it fully
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DMatrix::from_fn(40, 5, |_, _| rng.gen_range(-1.0..1.0));
        let b = DMatrix::from_fn(5, 30, |_, _| rng.gen_range(-1.0..1.0));
        let dense_m = a * b;
        let triplets = (0..40)
            .flat_map(|i| (0..30).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, dense_m[(i, j)]))
            .collect();
        let m = CsrMatrix::from_triplets(40, 30, triplets);
        let dense = DenseSvd.decompose(&m, 5).unwrap();
        let rand = RandomizedSvd::default().decompose(&m, 5).unwrap();
        for k in 0..5 {
            let rel = (dense.singular_values[k] - rand.singular_values[k]).abs() / dense.singular_values[k];
            assert!(rel < 1e-6, "component {k}: {rel}");
        }
    }
}
