use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense row-major matrix `F[i][j] = f(x_i, y_j)` with finite entries.
///
/// Rows index the minimizing side `X`, columns the maximizing side `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Validate nested row data into a [`BiMatrix`].
pub fn validate_bimatrix(candidate: &[Vec<f64>]) -> Result<BiMatrix> {
    let rows = candidate.len();
    let cols = candidate.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in candidate.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::RaggedRows {
                row: i,
                expected: cols,
                found: row.len(),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
        data.extend_from_slice(row);
    }
    Ok(BiMatrix { rows, cols, data })
}

impl BiMatrix {
    /// Build from row-major data; `data.len()` must equal `rows * cols`.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_flat(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |i| self.get(i, j))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend(self.column(j));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    /// Entrywise map. Panics if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let data: Vec<f64> = self.data.iter().map(|&x| f(x)).collect();
        assert!(data.iter().all(|x| x.is_finite()), "map produced a non-finite entry");
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn min_entry(&self) -> f64 {
        crate::min_of(&self.data)
    }

    pub fn max_entry(&self) -> f64 {
        crate::max_of(&self.data)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            })
        }
    }

    /// `true` iff `self ≤ other + slack` entrywise. Shapes must match.
    pub fn dominated_by(&self, other: &Self, slack: f64) -> Result<bool> {
        self.same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).all(|(a, b)| *a <= *b + slack))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn accepts_well_formed() {
        let m = validate_bimatrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.shape(), (2, 2));
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_nan_with_position() {
        let err = validate_bimatrix(&[vec![0.0, f64::NAN]]).unwrap_err();
        assert_eq!(err, Error::NonFiniteEntry { row: 0, col: 1 });
        let err = validate_bimatrix(&[vec![1.0], vec![f64::INFINITY]]).unwrap_err();
        assert_eq!(err, Error::NonFiniteEntry { row: 1, col: 0 });
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(validate_bimatrix(&[]).unwrap_err(), Error::EmptyDimension);
        assert_eq!(validate_bimatrix(&[vec![]]).unwrap_err(), Error::EmptyDimension);
    }

    #[test]
    fn rejects_ragged() {
        let err = validate_bimatrix(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::RaggedRows {
                row: 1,
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn transpose_roundtrip() {
        let m = validate_bimatrix(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = m.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
        assert_eq!(t.transpose(), m);
    }
}
