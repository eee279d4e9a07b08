//! Lower-computable semi-density operators given as finite weighted streams,
//! a declared mixture nu of them, and the diagonal of nu against m(x).
//!
//! ```text
//! program 1/2                      // weight optional: default 2^-(index+1)
//! term 1/4 1 3/5 0 4/5 0           // term <weight> <n> <re im> x 2^n
//! ```

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, rational_to_f64, ExactComplex};
use crate::machine::IndeterminateState;
use crate::opalg::{index_to_bits, psd_leq, Operator};
use crate::tolerances::EPS_NUM;

/// One stream element: weight v_i and an elementary pure state in Q_n.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub weight: BigRational,
    pub n: usize,
    pub coeffs: Vec<ExactComplex>,
}

impl Term {
    /// v |<x|psi>|^2 for a string of length n.
    pub fn weight_on(&self, x: &str) -> BigRational {
        if x.len() != self.n {
            return BigRational::zero();
        }
        let i = crate::opalg::bits_to_index(x).expect("bits");
        &self.weight * self.coeffs[i].norm_sqr()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LowerComputation {
    pub terms: Vec<Term>,
}

fn rational(tok: &str, line: usize) -> Result<BigRational> {
    parse_rational(tok)
        .map_err(|m| Error::parse(line, m))?
        .ok_or_else(|| Error::ZeroDenominator {
            line,
            token: tok.to_string(),
        })
}

fn parse_term(toks: &[&str], line: usize) -> Result<Term> {
    if toks.len() < 3 {
        return Err(Error::parse(line, "expected `term <weight> <n> <coefficients>`"));
    }
    let weight = rational(toks[1], line)?;
    let n: usize = toks[2]
        .parse()
        .map_err(|_| Error::parse(line, format!("bad length `{}`", toks[2])))?;
    if n > 12 {
        return Err(Error::parse(line, "term length above 12"));
    }
    let d = 1usize << n;
    if toks.len() != 3 + 2 * d {
        return Err(Error::parse(
            line,
            format!(
                "expected {} numbers after the length, found {}",
                2 * d,
                toks.len() - 3
            ),
        ));
    }
    let coeffs = (0..d)
        .map(|j| {
            Ok(ExactComplex::new(
                rational(toks[3 + 2 * j], line)?,
                rational(toks[4 + 2 * j], line)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let norm: BigRational = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !norm.is_one() {
        return Err(Error::parse(
            line,
            format!(
                "state is not normalized (squared norm {})",
                format_rational(&norm)
            ),
        ));
    }
    Ok(Term { weight, n, coeffs })
}

fn content(raw: &str) -> Vec<&str> {
    raw.split("//").next().unwrap_or("").split_whitespace().collect()
}

impl LowerComputation {
    /// A bare stream file: `term` lines only.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let toks = content(raw);
            match toks.first() {
                None => {}
                Some(&"term") => terms.push(parse_term(&toks, i + 1)?),
                Some(other) => return Err(Error::parse(i + 1, format!("unknown keyword `{other}`"))),
            }
        }
        Ok(Self { terms })
    }

    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|t| t.n).max().unwrap_or(0)
    }

    /// Weight of the terms after the first `steps`.
    pub fn tail_weight(&self, steps: usize) -> BigRational {
        self.terms.iter().skip(steps).map(|t| t.weight.clone()).sum()
    }

    /// <x|sigma_steps|x>, exactly.
    pub fn diagonal(&self, x: &str, steps: usize) -> BigRational {
        self.terms.iter().take(steps).map(|t| t.weight_on(x)).sum()
    }
}

fn term_operator(t: &Term, max_len: usize) -> Operator {
    let d = IndeterminateState::dim_for(max_len);
    let off = IndeterminateState::offset(t.n);
    let w = rational_to_f64(&t.weight);
    let v: Vec<Complex64> = t.coeffs.iter().map(ExactComplex::to_c64).collect();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (i, a) in v.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            m[(off + i, off + j)] = a * b.conj() * w;
        }
    }
    Operator::new(m).expect("square")
}

/// sigma_steps over Q_0 + ... + Q_max_len, checking sigma_{i-1} <= sigma_i
/// and Tr sigma_i <= 1 at every index (1-based in errors).
pub fn accumulate(lc: &LowerComputation, steps: usize, max_len: usize) -> Result<Operator> {
    let d = IndeterminateState::dim_for(max_len);
    let mut sigma = Operator::new(DMatrix::zeros(d, d))?;
    let mut trace = BigRational::zero();
    for (i, t) in lc.terms.iter().take(steps).enumerate() {
        if t.n > max_len {
            return Err(Error::OutOfRange(format!(
                "term {} has length {} > {max_len}",
                i + 1,
                t.n
            )));
        }
        let next = sigma.add(&term_operator(t, max_len))?;
        if t.weight.is_negative() || !psd_leq(&sigma, &next)? {
            return Err(Error::Monotonicity { index: i + 1 });
        }
        trace += &t.weight;
        if rational_to_f64(&trace) > 1.0 + EPS_NUM {
            return Err(Error::TraceOverflow {
                index: i + 1,
                trace: rational_to_f64(&trace),
            });
        }
        sigma = next;
    }
    Ok(sigma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enrolled {
    pub weight: BigRational,
    pub lc: LowerComputation,
}

/// Finite declared mixture standing in for the universal operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyUniversalMixture {
    pub programs: Vec<Enrolled>,
}

pub fn default_weight(index: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (index + 1))
}

impl ToyUniversalMixture {
    pub fn parse(text: &str) -> Result<Self> {
        let mut programs: Vec<Enrolled> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let toks = content(raw);
            match toks.first() {
                None => {}
                Some(&"program") => {
                    let weight = match toks.get(1) {
                        Some(tok) => rational(tok, line)?,
                        None => default_weight(programs.len()),
                    };
                    if toks.len() > 2 || weight.is_negative() {
                        return Err(Error::parse(line, "expected `program [<weight >= 0>]`"));
                    }
                    programs.push(Enrolled {
                        weight,
                        lc: LowerComputation::default(),
                    });
                }
                Some(&"term") => {
                    let term = parse_term(&toks, line)?;
                    programs
                        .last_mut()
                        .ok_or_else(|| Error::parse(line, "`term` before any `program`"))?
                        .lc
                        .terms
                        .push(term);
                }
                Some(other) => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
            }
        }
        let mix = Self { programs };
        mix.validate()?;
        Ok(mix)
    }

    pub fn validate(&self) -> Result<()> {
        let total: BigRational = self.programs.iter().map(|p| p.weight.clone()).sum();
        if total > BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "program weights sum to {} > 1",
                format_rational(&total)
            )));
        }
        Ok(())
    }

    pub fn max_len(&self) -> usize {
        self.programs.iter().map(|p| p.lc.max_len()).max().unwrap_or(0)
    }

    /// <x|nu_steps|x>, exactly.
    pub fn diagonal(&self, x: &str, steps: usize) -> BigRational {
        self.programs
            .iter()
            .map(|p| &p.weight * p.lc.diagonal(x, steps))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct NuBuild {
    pub steps: usize,
    pub max_len: usize,
    /// weight_p * sigma_p for each enrolled program.
    pub members: Vec<Operator>,
    pub nu: Operator,
    pub tails: Vec<BigRational>,
}

impl NuBuild {
    /// psd_leq(weight_p sigma_p, nu) for each enrolled program.
    pub fn domination(&self) -> Result<Vec<bool>> {
        self.members.iter().map(|m| psd_leq(m, &self.nu)).collect()
    }

    pub fn diagonal_sum(&self) -> f64 {
        self.nu.trace()
    }
}

/// nu_steps = sum_p weight_p accumulate(lc_p, steps).
pub fn build_nu(mix: &ToyUniversalMixture, steps: usize) -> Result<NuBuild> {
    mix.validate()?;
    let max_len = mix.max_len();
    let members = mix
        .programs
        .par_iter()
        .map(|p| Ok(accumulate(&p.lc, steps, max_len)?.scale(rational_to_f64(&p.weight))))
        .collect::<Result<Vec<_>>>()?;
    let d = IndeterminateState::dim_for(max_len);
    let mut nu = Operator::new(DMatrix::zeros(d, d))?;
    for m in &members {
        nu = nu.add(m)?;
    }
    let tr = nu.trace();
    if tr > 1.0 + EPS_NUM {
        return Err(Error::TraceOverflow {
            index: steps,
            trace: tr,
        });
    }
    Ok(NuBuild {
        steps,
        max_len,
        members,
        nu,
        tails: mix.programs.iter().map(|p| p.lc.tail_weight(steps)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalRow {
    pub x: String,
    pub nu: BigRational,
    pub m: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalReport {
    pub rows: Vec<DiagonalRow>,
    /// c1 m(x) <= <x|nu|x> <= c2 m(x) over the rows.
    pub c1: BigRational,
    pub c2: BigRational,
    pub c1_witness: String,
    pub c2_witness: String,
    pub diagonal_sum: BigRational,
}

impl DiagonalReport {
    pub fn to_text(&self) -> String {
        let show = |x: &str| {
            if x.is_empty() {
                "-".to_string()
            } else {
                x.to_string()
            }
        };
        let mut s = String::new();
        for r in &self.rows {
            writeln!(
                s,
                "diag x {} nu {} m {}",
                show(&r.x),
                format_rational(&r.nu),
                format_rational(&r.m)
            )
            .unwrap();
        }
        writeln!(
            s,
            "c1 {} at {}\nc2 {} at {}\ndiagonal_sum {}",
            format_rational(&self.c1),
            show(&self.c1_witness),
            format_rational(&self.c2),
            show(&self.c2_witness),
            format_rational(&self.diagonal_sum)
        )
        .unwrap();
        s
    }
}

/// Sandwich constants between the diagonal of nu and m over all strings up
/// to the mixture's longest term.
pub fn diagonal_vs_m(
    mix: &ToyUniversalMixture,
    steps: usize,
    m: impl Fn(&str) -> BigRational,
) -> Result<DiagonalReport> {
    let max_len = mix.max_len();
    let strings: Vec<String> = (0..=max_len)
        .flat_map(|n| (0..1usize << n).map(move |i| index_to_bits(i, n)))
        .collect();
    let total: BigRational = strings.iter().map(|x| m(x)).sum();
    if total > BigRational::one() {
        return Err(Error::NotSemiMeasure(rational_to_f64(&total)));
    }
    let rows: Vec<DiagonalRow> = strings
        .iter()
        .map(|x| DiagonalRow {
            x: x.clone(),
            nu: mix.diagonal(x, steps),
            m: m(x),
        })
        .collect();
    let mut c1: Option<(BigRational, String)> = None;
    let mut c2: Option<(BigRational, String)> = None;
    for r in &rows {
        if r.m.is_zero() {
            continue;
        }
        let q = &r.nu / &r.m;
        if c1.as_ref().is_none_or(|(v, _)| q < *v) {
            c1 = Some((q.clone(), r.x.clone()));
        }
        if c2.as_ref().is_none_or(|(v, _)| q > *v) {
            c2 = Some((q, r.x.clone()));
        }
    }
    let (c1, c1_witness) = c1.ok_or_else(|| Error::InvalidArgument("m vanishes everywhere".into()))?;
    let (c2, c2_witness) = c2.expect("set with c1");
    let diagonal_sum = rows.iter().map(|r| r.nu.clone()).sum();
    Ok(DiagonalReport {
        rows,
        c1,
        c2,
        c1_witness,
        c2_witness,
        diagonal_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::toy_m;
    use crate::corpus;
    use crate::opalg::eigh;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn single_term() {
        let lc = LowerComputation::parse("term 1 1 1 0 0 0\n").unwrap();
        let s = accumulate(&lc, 10, 1).unwrap();
        assert!((s.get(1, 1).re - 1.0).abs() < 1e-15);
        assert!((s.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_weights() {
        let text: String = (1..=20)
            .map(|i| format!("term 1/{} 0 1 0\n", 1u64 << i))
            .collect();
        let lc = LowerComputation::parse(&text).unwrap();
        let mut last = 0.0;
        for steps in 1..=20 {
            let tr = accumulate(&lc, steps, 0).unwrap().trace();
            assert!(tr > last && tr <= 1.0);
            last = tr;
        }
        assert_eq!(lc.tail_weight(18), r(3, 1 << 20));
    }

    #[test]
    fn stream_errors() {
        let lc = LowerComputation::parse("term 1/2 0 1 0\nterm -1/4 0 1 0\n").unwrap();
        assert!(matches!(
            accumulate(&lc, 5, 0),
            Err(Error::Monotonicity { index: 2 })
        ));
        let lc = LowerComputation::parse("term 1/2 0 1 0\nterm 1/2 1 1 0 0 0\nterm 1/8 0 1 0\n").unwrap();
        assert!(matches!(
            accumulate(&lc, 5, 1),
            Err(Error::TraceOverflow { index: 3, .. })
        ));
        assert!(LowerComputation::parse("term 1 1 1 0 1 0\n").is_err());
        assert!(matches!(
            LowerComputation::parse("term 1/0 0 1 0\n"),
            Err(Error::ZeroDenominator { line: 1, .. })
        ));
        assert!(ToyUniversalMixture::parse("term 1 0 1 0\n").is_err());
        assert!(ToyUniversalMixture::parse("program 3/4\nprogram 1/2\n").is_err());
    }

    #[test]
    fn single_program_mixture() {
        let mix = ToyUniversalMixture::parse("program 1\nterm 1/2 1 3/5 0 4/5 0\n").unwrap();
        let b = build_nu(&mix, 10).unwrap();
        let limit = accumulate(&mix.programs[0].lc, 10, 1).unwrap();
        assert!(b
            .nu
            .sub(&limit)
            .unwrap()
            .matrix()
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn orthogonal_classical_programs() {
        let mix =
            ToyUniversalMixture::parse("program 1/2\nterm 1 1 1 0 0 0\nprogram 1/2\nterm 1 1 0 0 1 0\n")
                .unwrap();
        let b = build_nu(&mix, 1).unwrap();
        let m = b.nu.matrix();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j && i > 0 { 0.5 } else { 0.0 };
                assert!((m[(i, j)].re - want).abs() < 1e-15 && m[(i, j)].im.abs() < 1e-15);
            }
        }
        assert!(b.domination().unwrap().iter().all(|&d| d));
    }

    #[test]
    fn diagonal_program_alone_gives_unit_constants() {
        let text = corpus::MIX
            .split("// program 2")
            .next()
            .unwrap()
            .replace("program", "program 1");
        let mix = ToyUniversalMixture::parse(&text).unwrap();
        let d = diagonal_vs_m(&mix, usize::MAX, toy_m).unwrap();
        assert!(d.c1.is_one() && d.c2.is_one());
        assert!(d.diagonal_sum <= BigRational::one());
    }

    #[test]
    fn shipped_mixture() {
        let mix = ToyUniversalMixture::parse(corpus::MIX).unwrap();
        assert_eq!(mix.programs.len(), 3);
        assert_eq!(mix.programs[2].weight, r(1, 8));
        let b = build_nu(&mix, 100).unwrap();
        assert!(b.diagonal_sum() <= 1.0 + EPS_NUM);
        assert!(eigh(&b.nu).unwrap().values[0] >= -EPS_NUM);
        assert!(b.domination().unwrap().iter().all(|&d| d));
        let d = diagonal_vs_m(&mix, 100, toy_m).unwrap();
        // Independent oracle: the diagonal from the float operator.
        for row in &d.rows {
            let i = IndeterminateState::index_of(&row.x).unwrap();
            assert!((b.nu.get(i, i).re - rational_to_f64(&row.nu)).abs() < 1e-12);
        }
        assert!(d.c1 >= r(1, 2));
        assert!(d.diagonal_sum <= BigRational::one());
    }

    #[test]
    fn non_semi_measure_is_rejected() {
        let mix = ToyUniversalMixture::parse("program\nterm 1 1 1 0 0 0\n").unwrap();
        assert!(matches!(
            diagonal_vs_m(&mix, 1, |_| r(1, 2)),
            Err(Error::NotSemiMeasure(_))
        ));
    }

    proptest! {
        #[test]
        fn prefixes_are_psd_with_growing_trace(ws in proptest::collection::vec(1u32..16, 1..8)) {
            let text: String = ws
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let (a, b) = if i % 2 == 0 { ("3/5", "4/5") } else { ("1", "0") };
                    format!("term {w}/128 1 {a} 0 0 {b}\n")
                })
                .collect();
            let lc = LowerComputation::parse(&text).unwrap();
            let mut last = 0.0;
            for steps in 1..=ws.len() {
                let s = accumulate(&lc, steps, 1).unwrap();
                prop_assert!(eigh(&s).unwrap().values[0] >= -EPS_NUM);
                prop_assert!(s.trace() >= last);
                last = s.trace();
            }
            let mix = ToyUniversalMixture::parse(&format!("program\n{text}program\n{text}")).unwrap();
            let b = build_nu(&mix, ws.len()).unwrap();
            prop_assert!(b.domination().unwrap().iter().all(|&d| d));
        }
    }
}
