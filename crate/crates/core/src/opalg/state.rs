use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::ExactComplex;
use crate::tolerances::EPS_NUM;

/// A unit vector, optionally carrying exact Gaussian-rational coefficients.
#[derive(Clone, Debug)]
pub struct PureState {
    coeffs: DVector<Complex64>,
    exact: Option<Vec<ExactComplex>>,
}

impl PureState {
    pub fn new(coeffs: DVector<Complex64>) -> Result<Self> {
        check_norm(coeffs.norm())?;
        Ok(Self { coeffs, exact: None })
    }

    pub fn from_slice(coeffs: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coeffs))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(coeffs: DVector<Complex64>) -> Result<Self> {
        let norm = coeffs.norm();
        if norm <= EPS_NUM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            coeffs: coeffs.unscale(norm),
            exact: None,
        })
    }

    pub fn from_exact(entries: Vec<ExactComplex>) -> Result<Self> {
        let coeffs = DVector::from_iterator(entries.len(), entries.iter().map(|z| z.to_c64()));
        check_norm(coeffs.norm())?;
        Ok(Self {
            coeffs,
            exact: Some(entries),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut entries = vec![ExactComplex::zero(); dim];
        entries[index] = ExactComplex::one();
        Self::from_exact(entries).expect("basis vector has unit norm")
    }

    /// Computational basis state |bits> in the space of `bits.len()` qubits.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = bits_to_index(bits)?;
        Ok(Self::basis(1 << bits.len(), index))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn exact(&self) -> Option<&[ExactComplex]> {
        self.exact.as_deref()
    }

    /// <self|other>
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }
}

fn check_norm(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > EPS_NUM {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Index of a bit string inside its own length block, first bit most significant.
pub fn bits_to_index(bits: &str) -> Result<usize> {
    if bits.len() >= usize::BITS as usize {
        return Err(Error::OutOfRange(format!("bit string of length {}", bits.len())));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::InvalidArgument(format!("`{other}` is not a bit"))),
    })
}

pub fn index_to_bits(index: usize, len: usize) -> String {
    (0..len)
        .map(|i| {
            if (index >> (len - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}
