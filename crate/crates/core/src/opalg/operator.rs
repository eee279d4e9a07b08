use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;

use super::state::PureState;
use crate::error::{Error, Result};
use crate::exact::ExactComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flag {
    Yes,
    No,
    Unknown,
}

impl Flag {
    fn from_bool(b: bool) -> Self {
        if b {
            Flag::Yes
        } else {
            Flag::No
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub hermitian: Flag,
    pub psd: Flag,
    pub projection: Flag,
    pub trace_bounded_by_one: Flag,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            hermitian: Flag::Unknown,
            psd: Flag::Unknown,
            projection: Flag::Unknown,
            trace_bounded_by_one: Flag::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

/// Square complex matrix. Exact operators keep their Gaussian-rational
/// entries (row-major) next to the float matrix used by spectral kernels.
#[derive(Clone, Debug)]
pub struct Operator {
    float: DMatrix<Complex64>,
    exact: Option<Arc<Vec<ExactComplex>>>,
    flags: Flags,
}

impl Operator {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        Ok(Self {
            float: m,
            exact: None,
            flags: Flags::default(),
        })
    }

    pub fn from_exact(dim: usize, entries: Vec<ExactComplex>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        let float = DMatrix::from_fn(dim, dim, |r, c| entries[r * dim + c].to_c64());
        Ok(Self {
            float,
            exact: Some(Arc::new(entries)),
            flags: Flags::default(),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_exact(dim, vec![ExactComplex::zero(); dim * dim]).expect("square")
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ExactComplex::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ExactComplex::one();
        }
        Self::from_exact(dim, entries).expect("square")
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let m = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m).expect("square")
    }

    pub fn exact_diagonal(values: &[BigRational]) -> Self {
        let d = values.len();
        let mut entries = vec![ExactComplex::zero(); d * d];
        for (i, v) in values.iter().enumerate() {
            entries[i * d + i] = ExactComplex::from_real(v.clone());
        }
        Self::from_exact(d, entries).expect("square")
    }

    /// |psi><psi|, exact when psi is.
    pub fn projector(psi: &PureState) -> Self {
        if let Some(e) = psi.exact() {
            let d = e.len();
            let mut entries = Vec::with_capacity(d * d);
            for r in e {
                for c in e {
                    entries.push(r * &c.conj());
                }
            }
            return Self::from_exact(d, entries).expect("square");
        }
        let v = psi.coeffs();
        Self::new(v * v.adjoint()).expect("square")
    }

    /// Sum of |e_i><e_i| over an orthonormal family.
    pub fn projector_onto(dim: usize, basis: &[PureState]) -> Result<Self> {
        let mut acc = Self::zeros(dim);
        for e in basis {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: e.dim(),
                });
            }
            acc = acc.add(&Self::projector(e))?;
        }
        Ok(acc)
    }

    /// Sum of w_i |psi_i><psi_i|.
    pub fn mixture(dim: usize, terms: &[(f64, PureState)]) -> Result<Self> {
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, psi) in terms {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: psi.dim(),
                });
            }
            let v = psi.coeffs();
            m += (v * v.adjoint()).scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.float.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.float
    }

    pub fn exact(&self) -> Option<&[ExactComplex]> {
        self.exact.as_deref().map(|v| v.as_slice())
    }

    pub fn backend(&self) -> Backend {
        if self.exact.is_some() {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.float[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.float.trace().re
    }

    /// Exact trace when the operator is exact.
    pub fn exact_trace(&self) -> Option<ExactComplex> {
        let e = self.exact()?;
        let d = self.dim();
        Some((0..d).fold(ExactComplex::zero(), |acc, i| &acc + &e[i * d + i]))
    }

    /// max |A - A*|
    pub fn hermitian_defect(&self) -> f64 {
        max_abs(&(&self.float - self.float.adjoint()))
    }

    pub fn check_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.zip(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.zip(other, |a, b| a - b, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &Operator,
        fe: impl Fn(&ExactComplex, &ExactComplex) -> ExactComplex,
        ff: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Result<Operator> {
        self.check_dim(other)?;
        match (self.exact(), other.exact()) {
            (Some(a), Some(b)) => {
                Operator::from_exact(self.dim(), a.iter().zip(b).map(|(x, y)| fe(x, y)).collect())
            }
            _ => Operator::new(ff(&self.float, &other.float)),
        }
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator::new(self.float.scale(factor)).expect("square")
    }

    pub fn scale_exact(&self, factor: &BigRational) -> Operator {
        match self.exact() {
            Some(e) => {
                Operator::from_exact(self.dim(), e.iter().map(|z| z.scale(factor)).collect()).expect("square")
            }
            None => self.scale(crate::exact::rational_to_f64(factor)),
        }
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other)?;
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            let d = self.dim();
            let mut out = Vec::with_capacity(d * d);
            for r in 0..d {
                for c in 0..d {
                    let mut acc = ExactComplex::zero();
                    for k in 0..d {
                        let x = &a[r * d + k];
                        let y = &b[k * d + c];
                        if !x.is_zero() && !y.is_zero() {
                            acc = &acc + &(x * y);
                        }
                    }
                    out.push(acc);
                }
            }
            return Operator::from_exact(d, out);
        }
        Operator::new(&self.float * &other.float)
    }

    pub fn adjoint(&self) -> Operator {
        match self.exact() {
            Some(e) => {
                let d = self.dim();
                let entries = (0..d * d).map(|i| e[(i % d) * d + i / d].conj()).collect();
                Operator::from_exact(d, entries).expect("square")
            }
            None => Operator::new(self.float.adjoint()).expect("square"),
        }
    }

    /// <psi|A|psi>
    pub fn expectation(&self, psi: &PureState) -> Result<Complex64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: psi.dim(),
            });
        }
        let v = psi.coeffs();
        Ok(v.dotc(&(&self.float * v)))
    }

    /// Diagonal block `[offset, offset + len)`.
    pub fn block(&self, offset: usize, len: usize) -> Result<Operator> {
        if offset + len > self.dim() {
            return Err(Error::OutOfRange(format!(
                "block [{offset}, {}) of a {}-dimensional operator",
                offset + len,
                self.dim()
            )));
        }
        if let Some(e) = self.exact() {
            let d = self.dim();
            let mut out = Vec::with_capacity(len * len);
            for r in 0..len {
                for c in 0..len {
                    out.push(e[(offset + r) * d + offset + c].clone());
                }
            }
            return Operator::from_exact(len, out);
        }
        Operator::new(self.float.view((offset, offset), (len, len)).into_owned())
    }

    /// Computes every flag at tolerance `tol`.
    pub fn certify(mut self, tol: f64) -> Self {
        let herm = self.hermitian_defect() <= tol;
        self.flags.hermitian = Flag::from_bool(herm);
        self.flags.trace_bounded_by_one = Flag::from_bool(self.trace() <= 1.0 + tol);
        if !herm {
            self.flags.psd = Flag::No;
            self.flags.projection = Flag::No;
            return self;
        }
        let eig = super::spectral::eigenvalues_unchecked(&self);
        let min = eig.first().copied().unwrap_or(0.0);
        self.flags.psd = Flag::from_bool(min >= -tol);
        let square = &self.float * &self.float;
        let idem = max_abs(&(square - &self.float)) <= tol;
        let spectrum01 = eig.iter().all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol);
        self.flags.projection = Flag::from_bool(idem && spectrum01);
        self
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
