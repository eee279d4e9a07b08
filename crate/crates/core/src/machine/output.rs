use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::config::{Config, ConfigSpace};
use super::def::{QTMDef, Symbol};
use super::evolution::{ConfigMixture, StateVec};
use crate::error::{Error, Result};
use crate::opalg::{bits_to_index, Operator};

/// Operator over Q_0 + Q_1 + ... + Q_max_len; the block for length n starts at
/// offset 2^n - 1 and lists strings with the first bit most significant.
#[derive(Clone, Debug)]
pub struct IndeterminateState {
    max_len: usize,
    op: Operator,
}

impl IndeterminateState {
    pub fn dim_for(max_len: usize) -> usize {
        (1usize << (max_len + 1)) - 1
    }

    pub fn offset(len: usize) -> usize {
        (1usize << len) - 1
    }

    pub fn index_of(bits: &str) -> Result<usize> {
        Ok(Self::offset(bits.len()) + bits_to_index(bits)?)
    }

    pub fn new(max_len: usize, op: Operator) -> Result<Self> {
        let expected = Self::dim_for(max_len);
        if op.dim() != expected {
            return Err(Error::DimensionMismatch {
                left: expected,
                right: op.dim(),
            });
        }
        Ok(Self { max_len, op })
    }

    pub fn zero(max_len: usize) -> Self {
        Self {
            max_len,
            op: Operator::new(DMatrix::zeros(Self::dim_for(max_len), Self::dim_for(max_len)))
                .expect("square"),
        }
    }

    /// |s><s| for a classical string.
    pub fn classical(bits: &str, max_len: usize) -> Result<Self> {
        if bits.len() > max_len {
            return Err(Error::OutputTooLong {
                len: bits.len(),
                max_len,
            });
        }
        let d = Self::dim_for(max_len);
        let i = Self::index_of(bits)?;
        Self::new(
            max_len,
            Operator::projector(&crate::opalg::PureState::basis(d, i)),
        )
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    /// The Q_ell diagonal block.
    pub fn block(&self, ell: usize) -> Result<Operator> {
        if ell > self.max_len {
            return Err(Error::OutOfRange(format!(
                "length {ell} (max length {})",
                self.max_len
            )));
        }
        self.op.block(Self::offset(ell), 1 << ell)
    }

    /// <s|rho|s>
    pub fn weight_of(&self, bits: &str) -> Result<f64> {
        if bits.len() > self.max_len {
            return Ok(0.0);
        }
        let i = Self::index_of(bits)?;
        Ok(self.op.get(i, i).re)
    }

    pub fn add(&self, other: &IndeterminateState) -> Result<IndeterminateState> {
        Self::new(self.max_len, self.op.add(&other.op)?)
    }

    pub fn scale(&self, factor: f64) -> IndeterminateState {
        Self {
            max_len: self.max_len,
            op: self.op.scale(factor),
        }
    }
}

/// Output string of a final configuration: a maximal {0,1} prefix followed by
/// blanks only. `None` when the tape has any other shape.
pub fn output_string(c: &Config, tape: usize, window: usize) -> Option<String> {
    let mut s = String::new();
    let mut pos = 0;
    while pos < window {
        match c.cell(tape, pos) {
            Symbol::Zero => s.push('0'),
            Symbol::One => s.push('1'),
            Symbol::Blank => break,
        }
        pos += 1;
    }
    (pos..window)
        .all(|p| c.cell(tape, p) == Symbol::Blank)
        .then_some(s)
}

/// Output-space image of one configuration vector: coherent vectors, one per
/// garbage class, plus the incoherent weight sent to the empty string.
pub struct OutputImage {
    pub groups: Vec<DVector<Complex64>>,
    pub lambda_weight: f64,
}

pub fn output_image(def: &QTMDef, window: usize, v: &StateVec, max_len: usize) -> Result<OutputImage> {
    let dim = IndeterminateState::dim_for(max_len);
    let out_tape = def.output_tape();
    let f = def.final_state as u16;
    let mut groups: BTreeMap<([u8; 3], [u128; 3]), DVector<Complex64>> = BTreeMap::new();
    let mut lambda_weight = 0.0;
    for (c, amp) in v {
        let s = if c.state == f {
            output_string(c, out_tape, window)
        } else {
            None
        };
        match s {
            Some(s) => {
                if s.len() > max_len {
                    return Err(Error::OutputTooLong {
                        len: s.len(),
                        max_len,
                    });
                }
                let mut key_tapes = c.tapes;
                key_tapes[out_tape] = 0;
                let entry = groups
                    .entry((c.heads, key_tapes))
                    .or_insert_with(|| DVector::zeros(dim));
                entry[IndeterminateState::index_of(&s)?] += amp;
            }
            None => lambda_weight += amp.norm_sqr(),
        }
    }
    Ok(OutputImage {
        groups: groups.into_values().collect(),
        lambda_weight,
    })
}

/// The channel that reads final configurations as indeterminate-length
/// outputs and sends everything else to the empty string.
pub fn extract_output(cs: &ConfigSpace, rho: &ConfigMixture, max_len: usize) -> Result<IndeterminateState> {
    extract_output_with(cs.machine(), cs.window(), rho, max_len)
}

pub fn extract_output_with(
    def: &QTMDef,
    window: usize,
    rho: &ConfigMixture,
    max_len: usize,
) -> Result<IndeterminateState> {
    let dim = IndeterminateState::dim_for(max_len);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, v) in &rho.terms {
        let img = output_image(def, window, v, max_len)?;
        for g in img.groups {
            m += (&g * g.adjoint()).scale(*w);
        }
        m[(0, 0)] += Complex64::new(w * img.lambda_weight, 0.0);
    }
    IndeterminateState::new(max_len, Operator::new(m)?)
}
