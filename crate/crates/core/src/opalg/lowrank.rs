//! Factored PSD operators `sum_i w_i |v_i><v_i|` over sparse vectors, used
//! where the ambient space is far too large for dense matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spectral::eigh_matrix;

pub type SparseVec<K> = BTreeMap<K, Complex64>;

/// <a|b>
pub fn inner<K: Ord>(a: &SparseVec<K>, b: &SparseVec<K>) -> Complex64 {
    if a.len() <= b.len() {
        a.iter().filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y)).sum()
    } else {
        b.iter().filter_map(|(k, y)| a.get(k).map(|x| x.conj() * y)).sum()
    }
}

pub fn norm_sqr<K>(v: &SparseVec<K>) -> f64 {
    v.values().map(|z| z.norm_sqr()).sum()
}

#[derive(Clone, Debug)]
pub struct LowRank<K> {
    pub terms: Vec<(f64, SparseVec<K>)>,
}

impl<K: Ord + Clone> LowRank<K> {
    pub fn new(terms: Vec<(f64, SparseVec<K>)>) -> Self {
        Self { terms }
    }

    pub fn pure(v: SparseVec<K>) -> Self {
        Self::new(vec![(1.0, v)])
    }

    pub fn trace(&self) -> f64 {
        self.terms.iter().map(|(w, v)| w * norm_sqr(v)).sum()
    }

    /// Sum of `w_i |<k|v_i>|^2` over keys selected by `keep`.
    pub fn weight_where(&self, keep: impl Fn(&K) -> bool) -> f64 {
        self.terms
            .iter()
            .map(|(w, v)| {
                w * v
                    .iter()
                    .filter(|(k, _)| keep(k))
                    .map(|(_, z)| z.norm_sqr())
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn map_vectors(&self, f: impl Fn(&SparseVec<K>) -> SparseVec<K>) -> Self {
        Self::new(self.terms.iter().map(|(w, v)| (*w, f(v))).collect())
    }
}

/// Trace distance between two factored operators.
///
/// With `X = [sqrt(w_a) A, sqrt(w_b) B]` and `S = diag(I, -I)` the difference is
/// `X S X*`, whose nonzero spectrum equals that of `G^{1/2} S G^{1/2}` for the
/// Gram matrix `G = X* X`.
pub fn trace_distance<K: Ord + Clone>(a: &LowRank<K>, b: &LowRank<K>) -> f64 {
    let cols: Vec<(f64, &SparseVec<K>, f64)> = a
        .terms
        .iter()
        .map(|(w, v)| (*w, v, 1.0))
        .chain(b.terms.iter().map(|(w, v)| (*w, v, -1.0)))
        .filter(|(w, v, _)| *w > 0.0 && !v.is_empty())
        .collect();
    let n = cols.len();
    if n == 0 {
        return 0.0;
    }
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = inner(cols[i].1, cols[j].1) * (cols[i].0 * cols[j].0).sqrt();
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
    }
    let e = eigh_matrix(&g);
    let mut root = DMatrix::<Complex64>::zeros(n, n);
    for (k, &v) in e.values.iter().enumerate() {
        if v > 0.0 {
            let col = e.vectors.column(k);
            root += (col * col.adjoint()).scale(v.sqrt());
        }
    }
    let s = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(cols[r].2, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let m = &root * s * &root;
    0.5 * eigh_matrix(&m).values.iter().map(|v| v.abs()).sum::<f64>()
}
