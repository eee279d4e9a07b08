//! Text format: `op <dim> <backend>` followed by `entry <row> <col> <re> <im>`
//! lines; omitted entries are zero, `#` starts a comment.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::{Backend, Operator};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, rational_to_f64, ExactComplex};

pub fn write_operator(op: &Operator) -> String {
    let d = op.dim();
    let mut out = format!("op {} {}\n", d, op.backend().name());
    match op.exact() {
        Some(e) => {
            for r in 0..d {
                for c in 0..d {
                    let z = &e[r * d + c];
                    if !z.is_zero() {
                        let _ = writeln!(
                            out,
                            "entry {r} {c} {} {}",
                            format_rational(z.re()),
                            format_rational(z.im())
                        );
                    }
                }
            }
        }
        None => {
            for r in 0..d {
                for c in 0..d {
                    let z = op.get(r, c);
                    if z != Complex64::new(0.0, 0.0) {
                        let _ = writeln!(out, "entry {r} {c} {:?} {:?}", z.re, z.im);
                    }
                }
            }
        }
    }
    out
}

pub fn parse_operator(text: &str) -> Result<Operator> {
    let mut header: Option<(usize, Backend)> = None;
    let mut exact: Vec<ExactComplex> = Vec::new();
    let mut float = DMatrix::<Complex64>::zeros(0, 0);
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match (tok[0], &header) {
            ("op", None) => {
                if tok.len() != 3 {
                    return Err(Error::parse(line_no, "expected `op <dim> <backend>`"));
                }
                let dim: usize = tok[1]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad dimension `{}`", tok[1])))?;
                if dim == 0 {
                    return Err(Error::parse(line_no, "dimension must be positive"));
                }
                let backend = match tok[2] {
                    "exact" => Backend::Exact,
                    "float" => Backend::Float,
                    other => return Err(Error::parse(line_no, format!("unknown backend `{other}`"))),
                };
                exact = vec![ExactComplex::zero(); dim * dim];
                float = DMatrix::zeros(dim, dim);
                header = Some((dim, backend));
            }
            ("op", Some(_)) => return Err(Error::parse(line_no, "duplicate header")),
            ("entry", Some((dim, backend))) => {
                if tok.len() != 5 {
                    return Err(Error::parse(line_no, "expected `entry <row> <col> <re> <im>`"));
                }
                let index = |s: &str| -> Result<usize> {
                    let v: usize = s
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad index `{s}`")))?;
                    if v >= *dim {
                        return Err(Error::parse(line_no, format!("index {v} out of range")));
                    }
                    Ok(v)
                };
                let (r, c) = (index(tok[1])?, index(tok[2])?);
                match backend {
                    Backend::Exact => {
                        let re = rational_token(tok[3], line_no)?;
                        let im = rational_token(tok[4], line_no)?;
                        exact[r * dim + c] = ExactComplex::new(re, im);
                    }
                    Backend::Float => {
                        float[(r, c)] =
                            Complex64::new(float_token(tok[3], line_no)?, float_token(tok[4], line_no)?);
                    }
                }
            }
            ("entry", None) => return Err(Error::parse(line_no, "entry before header")),
            (other, _) => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
        }
    }
    match header {
        None => Err(Error::parse(1, "missing `op` header")),
        Some((dim, Backend::Exact)) => Operator::from_exact(dim, exact),
        Some((_, Backend::Float)) => Operator::new(float),
    }
}

fn rational_token(tok: &str, line: usize) -> Result<num_rational::BigRational> {
    parse_rational(tok)
        .map_err(|m| Error::parse(line, m))?
        .ok_or_else(|| Error::ZeroDenominator {
            line,
            token: tok.to_string(),
        })
}

fn float_token(tok: &str, line: usize) -> Result<f64> {
    if tok.contains('/') {
        return Ok(rational_to_f64(&rational_token(tok, line)?));
    }
    tok.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad number `{tok}`")))
}
