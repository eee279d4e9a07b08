//! Budgeted exhaustive program search on classical reference machines.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use super::tm::{Kind, ReferenceMachine, Run};
use crate::error::{Error, Result};
use crate::opalg::index_to_bits;

/// Result of a budgeted complexity search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Complexity {
    /// Shortest program found and every shorter program was decided.
    Exact(usize),
    /// A program of this length exists, but some shorter one hit the budget.
    UpperBound(usize),
    /// No program of length < n was found.
    LowerBound(usize),
}

impl Complexity {
    pub fn value(self) -> Option<usize> {
        match self {
            Complexity::Exact(n) | Complexity::UpperBound(n) => Some(n),
            Complexity::LowerBound(_) => None,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Complexity::Exact(_))
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Complexity::Exact(n) => write!(f, "{n}"),
            Complexity::UpperBound(n) => write!(f, "<={n}"),
            Complexity::LowerBound(n) => write!(f, ">={n}"),
        }
    }
}

/// Length of the shortest program of length <= l_max printing `x`.
pub fn plain_complexity(x: &str, rm: &ReferenceMachine, l_max: usize) -> Complexity {
    let mut undecided = false;
    for n in 0..=l_max {
        let runs: Vec<Run> = (0..1usize << n)
            .into_par_iter()
            .map(|i| rm.run(&index_to_bits(i, n)))
            .collect();
        if runs
            .iter()
            .any(|r| matches!(r, Run::Halted { output, .. } if output == x))
        {
            return if undecided {
                Complexity::UpperBound(n)
            } else {
                Complexity::Exact(n)
            };
        }
        undecided |= runs.contains(&Run::Budget);
    }
    Complexity::LowerBound(l_max + 1)
}

/// Like [`plain_complexity`] but fails instead of returning a bare lower bound.
pub fn plain_complexity_strict(x: &str, rm: &ReferenceMachine, l_max: usize) -> Result<Complexity> {
    match plain_complexity(x, rm, l_max) {
        Complexity::LowerBound(n) => Err(Error::Diagnostics(format!(
            "no program of length < {n} prints `{x}` on `{}`; lower bound only",
            rm.name
        ))),
        c => Ok(c),
    }
}

/// Prefix complexity on a prefix-kind machine.
pub fn prefix_complexity(x: &str, pm: &ReferenceMachine, l_max: usize) -> Result<Complexity> {
    if pm.kind != Kind::Prefix {
        return Err(Error::InvalidArgument(format!(
            "`{}` is not a prefix machine",
            pm.name
        )));
    }
    plain_complexity_strict(x, pm, l_max)
}

/// Bijective binary code of a natural number: 0 -> "", 1 -> "0", 2 -> "1",
/// 3 -> "00", ...
pub fn nat_to_bits(n: u64) -> String {
    let s = format!("{:b}", n + 1);
    s[1..].to_string()
}

/// Toy prefix complexity on the shipped prefix machine: K(y) = 2|y| + 1.
pub fn toy_k(y: &str) -> usize {
    2 * y.len() + 1
}

pub fn toy_k_nat(n: u64) -> usize {
    toy_k(&nat_to_bits(n))
}

/// m(y) = 2^-K(y)
pub fn toy_m(y: &str) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << toy_k(y))
}

pub fn toy_m_nat(n: u64) -> BigRational {
    toy_m(&nat_to_bits(n))
}
