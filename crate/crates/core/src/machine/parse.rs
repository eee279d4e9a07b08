use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Signed;

use super::def::{AmpPart, Amplitude, Move, QTMDef, Symbol, Transition};
use crate::error::{Error, Result};
use crate::exact::parse_rational;

/// Parses a machine document. Irrational `sqrt(p/q)` amplitudes are accepted
/// for the float backend.
pub fn parse_machine(text: &str) -> Result<QTMDef> {
    parse(text, false)
}

/// Parses a machine document, rejecting any irrational amplitude.
pub fn parse_machine_exact(text: &str) -> Result<QTMDef> {
    parse(text, true)
}

struct RawRule {
    line: usize,
    from: String,
    read: Vec<Symbol>,
    to: String,
    write: Vec<Symbol>,
    moves: Vec<Move>,
    amp: Amplitude,
}

fn parse(text: &str, exact_only: bool) -> Result<QTMDef> {
    let mut name = None;
    let mut tapes = None;
    let mut window = None;
    let mut states: Option<Vec<String>> = None;
    let mut start = None;
    let mut final_state = None;
    let mut raw_rules = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let one = |what: &str| -> Result<String> {
            if tok.len() != 2 {
                return Err(Error::parse(line_no, format!("expected `{what} <value>`")));
            }
            Ok(tok[1].to_string())
        };
        let number = |what: &str| -> Result<usize> {
            one(what)?
                .parse()
                .map_err(|_| Error::parse(line_no, format!("`{what}` needs a positive integer")))
        };
        match tok[0] {
            "machine" => set_once(&mut name, one("machine")?, line_no, "machine")?,
            "tapes" => set_once(&mut tapes, number("tapes")?, line_no, "tapes")?,
            "window" => set_once(&mut window, number("window")?, line_no, "window")?,
            "states" => {
                if tok.len() < 3 {
                    return Err(Error::parse(line_no, "`states` needs at least two labels"));
                }
                let labels = tok[1..].iter().map(|s| s.to_string()).collect();
                set_once(&mut states, labels, line_no, "states")?;
            }
            "start" => set_once(&mut start, one("start")?, line_no, "start")?,
            "final" => set_once(&mut final_state, one("final")?, line_no, "final")?,
            "rule" => raw_rules.push(parse_rule(&tok, line_no, exact_only)?),
            other => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let missing = |what: &str| Error::Malformed(format!("missing `{what}` directive"));
    let states = states.ok_or_else(|| missing("states"))?;
    let lookup = |label: &str| -> Result<usize> {
        states
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::Malformed(format!("undeclared state `{label}`")))
    };
    let start = lookup(&start.ok_or_else(|| missing("start"))?)?;
    let final_state = lookup(&final_state.ok_or_else(|| missing("final"))?)?;
    let tapes = tapes.ok_or_else(|| missing("tapes"))?;

    let mut rules: BTreeMap<_, Vec<Transition>> = BTreeMap::new();
    for r in raw_rules {
        if r.read.len() != tapes || r.write.len() != tapes || r.moves.len() != tapes {
            return Err(Error::parse(
                r.line,
                format!("rule needs one symbol and move per tape ({tapes})"),
            ));
        }
        let from = lookup(&r.from)?;
        let to = lookup(&r.to)?;
        let group = rules.entry((from, r.read.clone())).or_default();
        if group
            .iter()
            .any(|t| t.target == to && t.write == r.write && t.moves == r.moves)
        {
            return Err(Error::DuplicateRule {
                line: r.line,
                rule: format!(
                    "{} {} -> {} {}",
                    r.from,
                    super::def::symbols(&r.read),
                    r.to,
                    super::def::symbols(&r.write)
                ),
            });
        }
        if r.amp.is_zero() {
            continue;
        }
        group.push(Transition {
            target: to,
            write: r.write,
            moves: r.moves,
            amp: r.amp,
        });
    }
    rules.retain(|_, v| !v.is_empty());

    let def = QTMDef {
        name: name.ok_or_else(|| missing("machine"))?,
        tapes,
        window: window.ok_or_else(|| missing("window"))?,
        states,
        start,
        final_state,
        rules,
    };
    def.validate()?;
    Ok(def)
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, what: &str) -> Result<()> {
    if slot.is_some() {
        return Err(Error::parse(line, format!("`{what}` given twice")));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_rule(tok: &[&str], line: usize, exact_only: bool) -> Result<RawRule> {
    // rule <q> <syms> -> <q'> <syms'> <moves> <re> <im>
    if tok.len() != 9 || tok[3] != "->" {
        return Err(Error::parse(
            line,
            "expected `rule <q> <syms> -> <q'> <syms'> <moves> <re> <im>`",
        ));
    }
    let syms = |s: &str| -> Result<Vec<Symbol>> {
        s.chars()
            .map(|c| {
                Symbol::from_char(c).ok_or_else(|| Error::parse(line, format!("`{c}` is not a tape symbol")))
            })
            .collect()
    };
    let moves = tok[6]
        .chars()
        .map(|c| match c {
            'L' => Ok(Move::L),
            'R' => Ok(Move::R),
            other => Err(Error::parse(line, format!("`{other}` is not a head move"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RawRule {
        line,
        from: tok[1].to_string(),
        read: syms(tok[2])?,
        to: tok[4].to_string(),
        write: syms(tok[5])?,
        moves,
        amp: Amplitude::new(
            amp_part(tok[7], line, exact_only)?,
            amp_part(tok[8], line, exact_only)?,
        ),
    })
}

fn amp_part(token: &str, line: usize, exact_only: bool) -> Result<AmpPart> {
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) if rest.starts_with("sqrt(") => (true, rest),
        _ => (false, token),
    };
    if let Some(inner) = body.strip_prefix("sqrt(").and_then(|s| s.strip_suffix(')')) {
        if exact_only {
            return Err(Error::IrrationalAmplitude(token.to_string()));
        }
        let arg = rational(inner, token, line)?;
        if arg.is_negative() {
            return Err(Error::parse(line, format!("negative square root in `{token}`")));
        }
        return Ok(AmpPart::Sqrt { negative, arg });
    }
    Ok(AmpPart::Rational(rational(token, token, line)?))
}

fn rational(body: &str, token: &str, line: usize) -> Result<BigRational> {
    parse_rational(body)
        .map_err(|m| Error::parse(line, m))?
        .ok_or_else(|| Error::ZeroDenominator {
            line,
            token: token.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = "\
machine identity
tapes 1
window 3
states s f
start s
final f
rule s 0 -> f 0 R 1 0
rule s 1 -> f 1 R 1 0
rule s # -> f # R 1 0
";

    #[test]
    fn parses_identity() {
        let m = parse_machine(IDENTITY).unwrap();
        assert_eq!(m.states.len(), 2);
        assert_eq!(m.tapes, 1);
        assert_eq!(m.rule_count(), 3);
        assert!(m.is_exact());
        assert_eq!(parse_machine(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn zero_denominator_is_reported_with_line() {
        let bad = IDENTITY.replace("rule s 1 -> f 1 R 1 0", "rule s 1 -> f 1 R 1/0 0");
        assert!(matches!(
            parse_machine(&bad),
            Err(Error::ZeroDenominator { line: 8, .. })
        ));
    }

    #[test]
    fn duplicate_rule_is_rejected() {
        let bad = format!("{IDENTITY}rule s 0 -> f 0 R 1/2 0\n");
        assert!(matches!(
            parse_machine(&bad),
            Err(Error::DuplicateRule { line: 10, .. })
        ));
    }

    #[test]
    fn irrational_amplitudes_depend_on_backend() {
        let text = IDENTITY.replace(
            "rule s 0 -> f 0 R 1 0",
            "rule s 0 -> f 0 R sqrt(1/2) 0\nrule s 0 -> f 1 R -sqrt(1/2) 0",
        );
        let m = parse_machine(&text).unwrap();
        assert!(!m.is_exact());
        assert!(matches!(
            parse_machine_exact(&text),
            Err(Error::IrrationalAmplitude(_))
        ));
        assert_eq!(parse_machine(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            parse_machine(&IDENTITY.replace("final f", "final s")),
            Err(Error::Malformed(_))
        ));
        let from_final = format!("{IDENTITY}rule f 0 -> s 0 R 1 0\n");
        assert!(matches!(parse_machine(&from_final), Err(Error::Malformed(_))));
        assert!(matches!(
            parse_machine(&IDENTITY.replace("rule s # -> f # R 1 0", "rule s # -> f # X 1 0")),
            Err(Error::Parse { line: 9, .. })
        ));
        assert!(matches!(
            parse_machine(&IDENTITY.replace("window 3", "window 65")),
            Err(Error::WindowTooLarge { .. })
        ));
        assert!(matches!(
            parse_machine(&IDENTITY.replace("rule s # -> f # R 1 0", "rule s # -> g # R 1 0")),
            Err(Error::Malformed(_))
        ));
    }
}
