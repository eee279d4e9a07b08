//! Gaussian-rational complex numbers.
//!
//! These carry the "elementary" coefficients of states, operators and
//! transition tables: both parts are reduced fractions of arbitrary-precision
//! integers, and every value keeps a `Complex64` shadow for the float kernels.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub struct ExactComplex {
    re: BigRational,
    im: BigRational,
    shadow: Complex64,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        let shadow = Complex64::new(rational_to_f64(&re), rational_to_f64(&im));
        Self { re, im, shadow }
    }

    pub fn from_real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn from_ints(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn zero() -> Self {
        Self::from_real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_real(BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// Float shadow, correctly rounded per component.
    pub fn to_c64(&self) -> Complex64 {
        self.shadow
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(&self.re * factor, &self.im * factor)
    }

    /// Nearest dyadic rational with denominator `2^bits`, per component.
    pub fn round_dyadic(&self, bits: u32) -> Self {
        Self::new(round_dyadic(&self.re, bits), round_dyadic(&self.im, bits))
    }
}

impl PartialEq for ExactComplex {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl Eq for ExactComplex {}

impl std::hash::Hash for ExactComplex {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.re.hash(state);
        self.im.hash(state);
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Round to the nearest multiple of `2^-bits` (ties away from zero).
pub fn round_dyadic(r: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits as usize;
    let scaled = r * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

/// Nearest dyadic rational to a float at `2^-bits` resolution.
pub fn dyadic_from_f64(x: f64, bits: u32) -> BigRational {
    let exact = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    round_dyadic(&exact, bits)
}

impl From<i64> for ExactComplex {
    fn from(v: i64) -> Self {
        Self::from_real(BigRational::from_integer(v.into()))
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_rational(&self.re), format_rational(&self.im))
    }
}

/// `p/q`, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p/q`, an integer, or a finite decimal such as `-0.125`.
///
/// Returns `Ok(None)` when the denominator is zero so callers can attach a
/// line number to the error.
pub fn parse_rational(token: &str) -> Result<Option<BigRational>, String> {
    let token = token.trim();
    if let Some((num, den)) = token.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{token}`"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{token}`"))?;
        if den.is_zero() {
            return Ok(None);
        }
        return Ok(Some(BigRational::new(num, den)));
    }
    if let Some((int_part, frac_part)) = token.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let digits = int_part.trim_start_matches(['-', '+']);
        if !digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac_part.is_empty())
        {
            return Err(format!("bad decimal `{token}`"));
        }
        let all_digits = format!("{digits}{frac_part}");
        let mut num: BigInt = if all_digits.is_empty() {
            BigInt::zero()
        } else {
            all_digits.parse().map_err(|_| format!("bad decimal `{token}`"))?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Some(BigRational::new(num, den)));
    }
    let num: BigInt = token.parse().map_err(|_| format!("bad number `{token}`"))?;
    Ok(Some(BigRational::from_integer(num)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), Some(q(1, 2)));
        assert_eq!(parse_rational("-0.125").unwrap(), Some(q(-1, 8)));
        assert_eq!(parse_rational("7").unwrap(), Some(q(7, 1)));
        assert_eq!(parse_rational(".5").unwrap(), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0").unwrap(), None);
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn reduced_form_and_shadow() {
        let z = ExactComplex::new(q(6, -8), q(2, 4));
        assert_eq!(z.re(), &q(-3, 4));
        assert!(z.re().denom().is_positive());
        assert_eq!(z.to_c64(), Complex64::new(-0.75, 0.5));
    }

    #[test]
    fn field_operations_are_exact() {
        let a = ExactComplex::from_ints(3, 5, 0, 1);
        let b = ExactComplex::from_ints(0, 1, 4, 5);
        let s = &(&a * &a.conj()) + &(&b * &b.conj());
        assert_eq!(s, ExactComplex::one());
        assert_eq!((&a + &b).norm_sqr(), q(1, 1));
    }

    #[test]
    fn dyadic_rounding() {
        let r = round_dyadic(&q(1, 3), 4);
        assert_eq!(r, q(5, 16));
        let h = dyadic_from_f64(std::f64::consts::FRAC_1_SQRT_2, 10);
        assert!((rational_to_f64(&h) - std::f64::consts::FRAC_1_SQRT_2).abs() <= 0.5 / 1024.0);
        let scaled = h * BigRational::from_integer(BigInt::from(1024));
        assert!(scaled.is_integer());
    }
}
