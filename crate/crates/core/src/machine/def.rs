use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{dyadic_from_f64, format_rational, rational_to_f64, ExactComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Blank,
    Zero,
    One,
}

impl Symbol {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '#' => Some(Symbol::Blank),
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::Blank => '#',
            Symbol::Zero => '0',
            Symbol::One => '1',
        }
    }

    /// Two-bit cell code; blank is zero so an empty tape packs to 0.
    pub fn code(self) -> u128 {
        match self {
            Symbol::Blank => 0,
            Symbol::Zero => 1,
            Symbol::One => 2,
        }
    }

    pub fn from_code(code: u128) -> Self {
        match code {
            1 => Symbol::Zero,
            2 => Symbol::One,
            _ => Symbol::Blank,
        }
    }

    pub fn from_bit(b: char) -> Option<Self> {
        match b {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    L,
    R,
}

impl Move {
    pub fn to_char(self) -> char {
        match self {
            Move::L => 'L',
            Move::R => 'R',
        }
    }
}

/// One real or imaginary component of a transition amplitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmpPart {
    Rational(BigRational),
    /// `±sqrt(arg)`; only the float backend accepts it.
    Sqrt {
        negative: bool,
        arg: BigRational,
    },
}

impl AmpPart {
    pub fn value(&self) -> f64 {
        match self {
            AmpPart::Rational(r) => rational_to_f64(r),
            AmpPart::Sqrt { negative, arg } => {
                let v = rational_to_f64(arg).sqrt();
                if *negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, AmpPart::Rational(_))
    }

    fn rounded(&self, bits: u32) -> AmpPart {
        match self {
            AmpPart::Rational(_) => self.clone(),
            AmpPart::Sqrt { .. } => AmpPart::Rational(dyadic_from_f64(self.value(), bits)),
        }
    }
}

impl fmt::Display for AmpPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpPart::Rational(r) => write!(f, "{}", format_rational(r)),
            AmpPart::Sqrt { negative, arg } => {
                write!(
                    f,
                    "{}sqrt({})",
                    if *negative { "-" } else { "" },
                    format_rational(arg)
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Amplitude {
    pub re: AmpPart,
    pub im: AmpPart,
    value: Complex64,
}

impl Amplitude {
    pub fn new(re: AmpPart, im: AmpPart) -> Self {
        let value = Complex64::new(re.value(), im.value());
        Self { re, im, value }
    }

    pub fn rational(re: BigRational, im: BigRational) -> Self {
        Self::new(AmpPart::Rational(re), AmpPart::Rational(im))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn exact(&self) -> Option<ExactComplex> {
        match (&self.re, &self.im) {
            (AmpPart::Rational(r), AmpPart::Rational(i)) => Some(ExactComplex::new(r.clone(), i.clone())),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_rational() && self.im.is_rational()
    }

    pub fn is_zero(&self) -> bool {
        self.value == Complex64::new(0.0, 0.0)
    }

    /// Rounds irrational components to multiples of `2^-bits`.
    pub fn rounded(&self, bits: u32) -> Self {
        Self::new(self.re.rounded(bits), self.im.rounded(bits))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub target: usize,
    pub write: Vec<Symbol>,
    pub moves: Vec<Move>,
    pub amp: Amplitude,
}

/// What the evolution does on configurations in the final state, where the
/// machine itself has no rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Completion {
    /// Final configurations are left unchanged (no rule enters the final state).
    Absorb,
    /// Final configurations return to the start state with the same tapes and
    /// heads (no rule enters the start state).
    Restart,
}

impl Completion {
    pub fn name(self) -> &'static str {
        match self {
            Completion::Absorb => "absorb",
            Completion::Restart => "restart",
        }
    }
}

pub type RuleKey = (usize, Vec<Symbol>);

#[derive(Clone, Debug, PartialEq)]
pub struct QTMDef {
    pub name: String,
    pub tapes: usize,
    pub window: usize,
    pub states: Vec<String>,
    pub start: usize,
    pub final_state: usize,
    pub rules: BTreeMap<RuleKey, Vec<Transition>>,
}

impl QTMDef {
    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn transitions(&self, state: usize, read: &[Symbol]) -> Option<&[Transition]> {
        self.rules.get(&(state, read.to_vec())).map(|v| v.as_slice())
    }

    pub fn rule_count(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.rules.values().flatten().all(|t| t.amp.is_exact())
    }

    fn targets(&self, state: usize) -> bool {
        self.rules.values().flatten().any(|t| t.target == state)
    }

    pub fn completion(&self) -> Completion {
        if !self.targets(self.final_state) || self.targets(self.start) {
            Completion::Absorb
        } else {
            Completion::Restart
        }
    }

    /// Index of the tape read as output: the only tape, the main tape of a
    /// two-tape machine, or the middle tape of a three-tape machine.
    pub fn output_tape(&self) -> usize {
        if self.tapes == 3 {
            1
        } else {
            0
        }
    }

    pub fn aux_tape(&self) -> Option<usize> {
        (self.tapes >= 2).then_some(self.tapes - 1)
    }

    /// Copy with every irrational amplitude component rounded to `2^-bits`.
    pub fn rounded(&self, bits: u32) -> QTMDef {
        let mut out = self.clone();
        for t in out.rules.values_mut().flatten() {
            t.amp = t.amp.rounded(bits);
        }
        out
    }

    /// Largest |exact - rounded| over amplitude entries after rounding.
    pub fn rounding_error(&self, other: &QTMDef) -> f64 {
        self.rules
            .values()
            .flatten()
            .zip(other.rules.values().flatten())
            .map(|(a, b)| (a.amp.value() - b.amp.value()).norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let malformed = |m: String| Err(Error::Malformed(m));
        if !(1..=3).contains(&self.tapes) {
            return malformed(format!("tape count {} not in 1..=3", self.tapes));
        }
        if self.window == 0 || self.window > crate::tolerances::MAX_WINDOW {
            return Err(Error::WindowTooLarge {
                window: self.window,
                max: crate::tolerances::MAX_WINDOW,
            });
        }
        if self.start == self.final_state {
            return malformed("start and final state coincide".into());
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                return malformed(format!("state `{s}` declared twice"));
            }
        }
        for ((q, read), ts) in &self.rules {
            if *q == self.final_state {
                return malformed(format!("rule leaves final state `{}`", self.states[*q]));
            }
            if read.len() != self.tapes {
                return malformed(format!(
                    "rule reads {} symbols on {} tapes",
                    read.len(),
                    self.tapes
                ));
            }
            for t in ts {
                if t.write.len() != self.tapes || t.moves.len() != self.tapes {
                    return malformed("rule arity does not match tape count".into());
                }
            }
        }
        Ok(())
    }

    /// Canonical text form accepted by [`super::parse_machine`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("machine {}\n", self.name));
        out.push_str(&format!("tapes {}\n", self.tapes));
        out.push_str(&format!("window {}\n", self.window));
        out.push_str(&format!("states {}\n", self.states.join(" ")));
        out.push_str(&format!("start {}\n", self.states[self.start]));
        out.push_str(&format!("final {}\n", self.states[self.final_state]));
        for ((q, read), ts) in &self.rules {
            for t in ts {
                out.push_str(&format!(
                    "rule {} {} -> {} {} {} {} {}\n",
                    self.states[*q],
                    symbols(read),
                    self.states[t.target],
                    symbols(&t.write),
                    t.moves.iter().map(|m| m.to_char()).collect::<String>(),
                    t.amp.re,
                    t.amp.im
                ));
            }
        }
        out
    }
}

pub fn symbols(s: &[Symbol]) -> String {
    s.iter().map(|c| c.to_char()).collect()
}

/// Largest |amp|^2 row sum over rule groups, a cheap normalization diagnostic.
pub fn max_rule_norm(def: &QTMDef) -> f64 {
    def.rules
        .values()
        .map(|ts| ts.iter().map(|t| t.amp.value().norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
}
