//! Numeric check of "a < b + c implies a + K(a) < b + K(b) + c'" on the toy
//! prefix machine.

use super::plain::toy_k_nat;

pub fn bit_length(c: u64) -> i64 {
    (u64::BITS - c.leading_zeros()) as i64
}

/// c'(c) = c + 2 bitlen(c) + constant.
pub fn c_prime_form(c: u64, constant: i64) -> i64 {
    c as i64 + 2 * bit_length(c) + constant
}

fn lhs_minus_rhs(a: u64, b: u64) -> i64 {
    a as i64 + toy_k_nat(a) as i64 - b as i64 - toy_k_nat(b) as i64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop2Outcome {
    pub checked: usize,
    /// First (a, b, c) with a < b + c but a + K(a) >= b + K(b) + c'(c).
    pub witness: Option<(u64, u64, u64)>,
}

impl Prop2Outcome {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks every sample with a < b + c against the given c'.
pub fn prop2_check(samples: &[(u64, u64, u64)], c_prime: impl Fn(u64) -> i64) -> Prop2Outcome {
    let mut checked = 0;
    for &(a, b, c) in samples {
        if a >= b + c {
            continue;
        }
        checked += 1;
        if lhs_minus_rhs(a, b) >= c_prime(c) {
            return Prop2Outcome {
                checked,
                witness: Some((a, b, c)),
            };
        }
    }
    Prop2Outcome {
        checked,
        witness: None,
    }
}

/// All (a, b, c) with a, b <= ab_max and 1 <= c <= c_max.
pub fn sample_grid(ab_max: u64, c_max: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    for c in 1..=c_max {
        for a in 0..=ab_max {
            for b in 0..=ab_max {
                out.push((a, b, c));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop2Calibration {
    pub ab_max: u64,
    pub c_max: u64,
    /// Smallest admissible c' for each c.
    pub minimal: Vec<(u64, i64)>,
    /// Smallest constant making c + 2 bitlen(c) + constant admissible for every c.
    pub constant: i64,
    /// For each c, the constant a pure 2 bitlen(c) + constant form would need.
    pub log_only: Vec<(u64, i64)>,
}

impl Prop2Calibration {
    pub fn to_text(&self) -> String {
        let mut s = format!("prop2 ab_max {} c_max {}\n", self.ab_max, self.c_max);
        for ((c, m), (_, l)) in self.minimal.iter().zip(&self.log_only) {
            s.push_str(&format!("c {c} min_c_prime {m} log_only_const {l}\n"));
        }
        s.push_str(&format!("constant {}\n", self.constant));
        s
    }

    /// Whether the 2 log c + const form admits a single constant over the range.
    pub fn log_only_constant_is_uniform(&self) -> bool {
        self.log_only.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

pub fn calibrate(ab_max: u64, c_max: u64) -> Prop2Calibration {
    let minimal: Vec<(u64, i64)> = (1..=c_max)
        .map(|c| {
            let worst = (0..=ab_max)
                .flat_map(|a| (0..=ab_max).map(move |b| (a, b)))
                .filter(|&(a, b)| a < b + c)
                .map(|(a, b)| lhs_minus_rhs(a, b))
                .max()
                .unwrap_or(i64::MIN);
            (c, worst + 1)
        })
        .collect();
    let constant = minimal
        .iter()
        .map(|&(c, m)| m - c as i64 - 2 * bit_length(c))
        .max()
        .unwrap_or(0);
    let log_only = minimal.iter().map(|&(c, m)| (c, m - 2 * bit_length(c))).collect();
    Prop2Calibration {
        ab_max,
        c_max,
        minimal,
        constant,
        log_only,
    }
}
