use num_complex::Complex64;

use crate::error::{Error, Result};

/// Compressed sparse row matrix, square.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::OutOfRange(format!("entry ({r}, {c}) in dimension {dim}")));
        }
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
        .pruned())
    }

    fn pruned(self) -> Self {
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != Complex64::new(0.0, 0.0) {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        Self {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect())
            .expect("in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r)
            .find(|&(col, _)| col == c)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| v)
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                t.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(self.dim, t).expect("in range")
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect())
    }

    pub fn mul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut seen = vec![false; self.dim];
        let mut touched = Vec::new();
        let mut t = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                t.push((r, c, acc[c]));
                acc[c] = Complex64::new(0.0, 0.0);
                seen[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, t)
    }

    /// max |A - I|
    pub fn identity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for r in 0..self.dim {
            let mut diag = Complex64::new(0.0, 0.0);
            for (c, v) in self.row(r) {
                if c == r {
                    diag = v;
                } else {
                    defect = defect.max(v.norm());
                }
            }
            defect = defect.max((diag - Complex64::new(1.0, 0.0)).norm());
        }
        defect
    }

    /// max(|U U* - I|, |U* U - I|)
    pub fn unitary_defect(&self) -> f64 {
        let adj = self.adjoint();
        let left = self.mul(&adj).expect("same dimension").identity_defect();
        let right = adj.mul(self).expect("same dimension").identity_defect();
        left.max(right)
    }

    /// Largest number of nonzeros in any row or column.
    pub fn branching_width(&self) -> usize {
        let mut col_counts = vec![0usize; self.dim];
        let mut width = 0;
        for r in 0..self.dim {
            width = width.max(self.row_ptr[r + 1] - self.row_ptr[r]);
            for (c, _) in self.row(r) {
                col_counts[c] += 1;
            }
        }
        width.max(col_counts.into_iter().max().unwrap_or(0))
    }

    /// max |A - B| entrywise.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut defect = 0.0f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                defect = defect.max((v - other.get(r, c)).norm());
            }
            for (c, v) in other.row(r) {
                defect = defect.max((v - self.get(r, c)).norm());
            }
        }
        Ok(defect)
    }
}
