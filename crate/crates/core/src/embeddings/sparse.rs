use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Ordered word list with a reverse index; row/column ids of every matrix.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct VocabIndex {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for VocabIndex {
    fn from(words: Vec<String>) -> Self {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        VocabIndex { words, index }
    }
}

impl From<VocabIndex> for Vec<String> {
    fn from(v: VocabIndex) -> Self {
        v.words
    }
}

impl VocabIndex {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }
}

/// Compressed sparse row matrix; column indices are sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy> CsrMatrix<T> {
    /// Builds from `(row, col, value)` triplets that are unique per cell.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n_rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for &(r, c, v) in &triplets {
            debug_assert!(r < n_rows && c < n_cols);
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..n_rows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .binary_search(&c)
            .ok()
            .map(|k| self.values[span.start + k])
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl CsrMatrix<f64> {
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    /// self · x for a dense matrix x.
    pub fn mul_dense(&self, x: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
        assert_eq!(x.nrows(), self.n_cols);
        let mut out = nalgebra::DMatrix::zeros(self.n_rows, x.ncols());
        for (r, c, v) in self.iter() {
            for k in 0..x.ncols() {
                out[(r, k)] += v * x[(c, k)];
            }
        }
        out
    }

    /// selfᵀ · x for a dense matrix x.
    pub fn tr_mul_dense(&self, x: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
        assert_eq!(x.nrows(), self.n_rows);
        let mut out = nalgebra::DMatrix::zeros(self.n_cols, x.ncols());
        for (r, c, v) in self.iter() {
            for k in 0..x.ncols() {
                out[(c, k)] += v * x[(r, k)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_to_csr() {
        let m = CsrMatrix::from_triplets(3, 3, vec![(2, 0, 5u64), (0, 2, 1), (0, 1, 2)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), Some(2));
        assert_eq!(m.get(1, 1), None);
        assert_eq!(m.row(0).collect::<Vec<_>>(), [(1, 2), (2, 1)]);
        assert_eq!(m.iter().collect::<Vec<_>>(), [(0, 1, 2), (0, 2, 1), (2, 0, 5)]);
    }

    #[test]
    fn sparse_dense_products_agree() {
        let m = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (1, 2, 2.0), (0, 1, -1.0)]);
        let x = nalgebra::DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m.mul_dense(&x), m.to_dense() * &x);
        let y = nalgebra::DMatrix::from_row_slice(2, 1, &[1.0, -2.0]);
        assert_eq!(m.tr_mul_dense(&y), m.to_dense().transpose() * &y);
    }
}
