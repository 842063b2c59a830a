use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<F> {
    data: Vec<F>,
    n_rows: usize,
    n_cols: usize,
}

impl<F: Scalar> Matrix<F> {
    pub fn new(data: Vec<F>, n_cols: usize) -> Self {
        assert!(n_cols > 0 || data.is_empty(), "zero-width matrix with data");
        assert!(n_cols == 0 || data.len().is_multiple_of(n_cols), "ragged matrix data");
        let n_rows = data.len().checked_div(n_cols).unwrap_or(0);
        Self { data, n_rows, n_cols }
    }

    pub fn from_rows<'a>(n_cols: usize, rows: impl IntoIterator<Item = &'a [F]>) -> Self {
        let mut data = Vec::new();
        let mut n_rows = 0;
        for r in rows {
            assert_eq!(r.len(), n_cols, "row width");
            data.extend_from_slice(r);
            n_rows += 1;
        }
        Self { data, n_rows, n_cols }
    }

    pub fn from_vecs(rows: &[Vec<F>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(n_cols, rows.iter().map(Vec::as_slice))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> F {
        self.data[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    /// Applies `f` to every entry of column `j`.
    pub fn map_column(&self, j: usize, f: impl Fn(F) -> F) -> Self {
        let mut out = self.clone();
        for i in 0..self.n_rows {
            out.data[i * self.n_cols + j] = f(self.get(i, j));
        }
        out
    }
}
