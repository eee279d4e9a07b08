//! Classical reference machines given as ordered program tables.
//!
//! ```text
//! machine rm
//! kind plain            // plain | prefix
//! budget 64             // step budget per run
//! rule 0 y -> y         // first matching rule wins
//! rule 1 y -> y y
//! rule - -> -
//! ```
//!
//! Patterns are bit literals optionally followed by `y` (the rest of the
//! program); a leading `unary` matches `1^n 0` and forces `|y| = n`. `-` is
//! the empty string. Templates concatenate bit literals and `y`; `loop`
//! never halts. A run costs `|program| + |output|` steps.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Plain,
    Prefix,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::Prefix => "prefix",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Piece {
    Bits(String),
    Rest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Rule {
    unary: bool,
    pattern: Vec<Piece>,
    template: Option<Vec<Piece>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Run {
    Halted {
        output: String,
        steps: usize,
    },
    /// No rule matches: the program is outside the domain.
    Undefined,
    /// The step budget ran out.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceMachine {
    pub name: String,
    pub kind: Kind,
    pub step_budget: usize,
    rules: Vec<Rule>,
}

pub const DEFAULT_STEP_BUDGET: usize = 1 << 10;

fn is_bits(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c == '0' || c == '1')
}

impl ReferenceMachine {
    pub fn parse(text: &str) -> Result<Self> {
        let (mut name, mut kind, mut budget) = (None, None, None);
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            match tok[0] {
                "machine" if tok.len() == 2 => name = Some(tok[1].to_string()),
                "kind" if tok.len() == 2 => {
                    kind = Some(match tok[1] {
                        "plain" => Kind::Plain,
                        "prefix" => Kind::Prefix,
                        other => return Err(Error::parse(line_no, format!("unknown kind `{other}`"))),
                    })
                }
                "budget" if tok.len() == 2 => {
                    budget = Some(
                        tok[1]
                            .parse()
                            .map_err(|_| Error::parse(line_no, "budget needs a positive integer"))?,
                    )
                }
                "rule" => rules.push(parse_rule(&tok[1..], line_no)?),
                other => return Err(Error::parse(line_no, format!("unexpected `{other}`"))),
            }
        }
        let m = Self {
            name: name.ok_or_else(|| Error::Malformed("missing `machine` directive".into()))?,
            kind: kind.ok_or_else(|| Error::Malformed("missing `kind` directive".into()))?,
            step_budget: budget.unwrap_or(DEFAULT_STEP_BUDGET),
            rules,
        };
        if m.kind == Kind::Prefix {
            m.check_prefix_free(12)?;
        }
        Ok(m)
    }

    /// Runs one program.
    pub fn run(&self, program: &str) -> Run {
        for r in &self.rules {
            if let Some(y) = r.matches(program) {
                return match &r.template {
                    None => Run::Budget,
                    Some(t) => {
                        let output: String = t
                            .iter()
                            .map(|p| match p {
                                Piece::Bits(b) => b.as_str(),
                                Piece::Rest => y,
                            })
                            .collect();
                        let steps = program.len() + output.len();
                        if steps > self.step_budget {
                            Run::Budget
                        } else {
                            Run::Halted { output, steps }
                        }
                    }
                };
            }
        }
        Run::Undefined
    }

    /// Fails when a halting program of length <= max_len is a proper prefix
    /// of another.
    pub fn check_prefix_free(&self, max_len: usize) -> Result<()> {
        let mut halting = Vec::new();
        for n in 0..=max_len {
            for i in 0..1usize << n {
                let p = crate::opalg::index_to_bits(i, n);
                if matches!(self.run(&p), Run::Halted { .. }) {
                    halting.push(p);
                }
            }
        }
        for a in &halting {
            if let Some(b) = halting
                .iter()
                .find(|b| b.len() > a.len() && b.starts_with(a.as_str()))
            {
                return Err(Error::Malformed(format!(
                    "prefix machine `{}`: halting program `{a}` is a prefix of `{b}`",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl Rule {
    fn matches<'a>(&self, program: &'a str) -> Option<&'a str> {
        let mut rest = program;
        let mut n = None;
        if self.unary {
            let ones = rest.chars().take_while(|&c| c == '1').count();
            rest = rest[ones..].strip_prefix('0')?;
            n = Some(ones);
        }
        for p in &self.pattern {
            match p {
                Piece::Bits(b) => rest = rest.strip_prefix(b.as_str())?,
                Piece::Rest => {
                    return match n {
                        Some(n) if rest.len() != n => None,
                        _ => Some(rest),
                    }
                }
            }
        }
        (rest.is_empty() && n.is_none_or(|n| n == 0)).then_some("")
    }
}

fn parse_rule(tok: &[&str], line: usize) -> Result<Rule> {
    let arrow = tok
        .iter()
        .position(|t| *t == "->")
        .ok_or_else(|| Error::parse(line, "expected `rule <pattern> -> <template>`"))?;
    let (lhs, rhs) = (&tok[..arrow], &tok[arrow + 1..]);
    if lhs.is_empty() || rhs.is_empty() {
        return Err(Error::parse(line, "empty pattern or template (use `-`)"));
    }
    let mut unary = false;
    let mut pattern = Vec::new();
    for (i, t) in lhs.iter().enumerate() {
        match *t {
            "-" if lhs.len() == 1 => {}
            "unary" if i == 0 => unary = true,
            "y" if i + 1 == lhs.len() => pattern.push(Piece::Rest),
            b if is_bits(b) => pattern.push(Piece::Bits(b.to_string())),
            other => return Err(Error::parse(line, format!("bad pattern token `{other}`"))),
        }
    }
    if unary && pattern.last() != Some(&Piece::Rest) {
        return Err(Error::parse(line, "`unary` needs a trailing `y`"));
    }
    let template = if rhs == ["loop"] {
        None
    } else {
        let mut out = Vec::new();
        for t in rhs {
            match *t {
                "-" if rhs.len() == 1 => {}
                "y" if pattern.contains(&Piece::Rest) => out.push(Piece::Rest),
                b if is_bits(b) => out.push(Piece::Bits(b.to_string())),
                other => return Err(Error::parse(line, format!("bad template token `{other}`"))),
            }
        }
        Some(out)
    };
    Ok(Rule {
        unary,
        pattern,
        template,
    })
}
