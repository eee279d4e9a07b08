//! Per-string complexity reports and the plain-versus-BvL gap over a corpus.

use std::fmt::Write as _;

use super::bvl::{classical_target, BvlSearch};
use super::plain::{plain_complexity, Complexity};
use super::tm::ReferenceMachine;
use crate::decoder::coverage_table;
use crate::error::{Error, Result};
use crate::machine::ConfigSpace;

/// `-` stands for the empty string in every text format.
pub fn show(x: &str) -> &str {
    if x.is_empty() {
        "-"
    } else {
        x
    }
}

/// One bit string per line; `-` is the empty string, `//` starts a comment.
pub fn parse_corpus(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let s = if line == "-" { "" } else { line };
        if !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::parse(i + 1, format!("`{line}` is not a bit string")));
        }
        out.push(s.to_string());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub x: String,
    pub c_plain: Complexity,
    /// (k, Hbvl^{1/k}) for k = 1..=k_max.
    pub hbvl_eps: Vec<(usize, Option<usize>)>,
    pub hbvl: Option<usize>,
}

impl ComplexityReport {
    pub fn gap(&self) -> Option<usize> {
        match (self.c_plain, self.hbvl) {
            (Complexity::Exact(c), Some(h)) => Some(c.abs_diff(h)),
            _ => None,
        }
    }

    /// Why the string cannot enter the max-gap fold, if it cannot.
    pub fn inconclusive(&self) -> Option<String> {
        if !self.c_plain.is_exact() {
            Some(format!("plain complexity {}", self.c_plain))
        } else if self.hbvl.is_none() {
            Some("no dictionary program reaches the target".into())
        } else {
            None
        }
    }

    /// Hbvl^eps nonincreasing in eps and bounded by Hbvl.
    pub fn invariants_hold(&self) -> bool {
        let monotone = self.hbvl_eps.windows(2).all(|w| match (w[0].1, w[1].1) {
            (_, None) => true,
            (Some(a), Some(b)) => a <= b,
            (None, Some(_)) => false,
        });
        let below = match self.hbvl {
            Some(h) => self.hbvl_eps.iter().all(|(_, e)| e.is_some_and(|e| e <= h)),
            None => true,
        };
        monotone && below
    }

    pub fn line(&self) -> String {
        let opt = |v: Option<usize>| v.map_or("none".to_string(), |n| n.to_string());
        format!(
            "x {} C {} Hbvl {} gap {}",
            show(&self.x),
            self.c_plain,
            opt(self.hbvl),
            opt(self.gap())
        )
    }
}

pub fn complexity_report(
    x: &str,
    rm: &ReferenceMachine,
    search: &BvlSearch,
    l_max: usize,
) -> Result<ComplexityReport> {
    let target = classical_target(x)?;
    let hbvl_eps = (1..=search.k_max)
        .map(|k| {
            (
                k,
                search.hbvl_eps_with(&target, 1.0 / k as f64, k).map(|(n, _)| n),
            )
        })
        .collect();
    Ok(ComplexityReport {
        x: x.to_string(),
        c_plain: plain_complexity(x, rm, l_max),
        hbvl_eps,
        hbvl: search.hbvl(&target),
    })
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub reports: Vec<ComplexityReport>,
    pub max_gap: usize,
    /// max over conclusive strings of Hbvl - C.
    pub c_sim: i64,
    pub flagged: Vec<(String, String)>,
}

impl GapReport {
    /// Golden form: one `x` line per string, then the summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            writeln!(s, "{}", r.line()).unwrap();
        }
        writeln!(s, "max_gap {}", self.max_gap).unwrap();
        writeln!(s, "c_sim {}", self.c_sim).unwrap();
        for (x, why) in &self.flagged {
            writeln!(s, "flagged {} {why}", show(x)).unwrap();
        }
        s
    }

    /// Hbvl <= C + c_sim on every conclusive string.
    pub fn lower_direction_holds(&self, c_sim: i64) -> bool {
        self.reports.iter().all(|r| match (r.c_plain, r.hbvl) {
            (Complexity::Exact(c), Some(h)) => h as i64 <= c as i64 + c_sim,
            _ => true,
        })
    }
}

pub fn mueller_gap(
    corpus: &[String],
    rm: &ReferenceMachine,
    search: &BvlSearch,
    l_max: usize,
) -> Result<GapReport> {
    let reports = corpus
        .iter()
        .map(|x| complexity_report(x, rm, search, l_max))
        .collect::<Result<Vec<_>>>()?;
    let mut flagged = Vec::new();
    let (mut max_gap, mut c_sim) = (0, i64::MIN);
    for r in &reports {
        if let Some(why) = r.inconclusive() {
            flagged.push((r.x.clone(), why));
            continue;
        }
        max_gap = max_gap.max(r.gap().expect("conclusive"));
        let (c, h) = (r.c_plain.value().expect("exact"), r.hbvl.expect("conclusive"));
        c_sim = c_sim.max(h as i64 - c as i64);
    }
    if c_sim == i64::MIN {
        c_sim = 0;
    }
    Ok(GapReport {
        reports,
        max_gap,
        c_sim,
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderEntry {
    pub k: usize,
    pub y: String,
    pub c: Complexity,
}

/// Plain complexity of every string the coverage decoder emits.
#[derive(Clone, Debug)]
pub struct DecoderCheck {
    pub entries: Vec<DecoderEntry>,
    /// max over entries of C(y) - k.
    pub c_dec: i64,
}

impl DecoderCheck {
    pub fn holds(&self, c_dec: i64) -> bool {
        self.entries.iter().all(|e| match e.c {
            Complexity::Exact(c) | Complexity::UpperBound(c) => c as i64 <= e.k as i64 + c_dec,
            Complexity::LowerBound(_) => false,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            writeln!(s, "decoded k {} y {} C {}", e.k, show(&e.y), e.c).unwrap();
        }
        writeln!(s, "c_dec {}", self.c_dec).unwrap();
        s
    }
}

pub fn decoder_cross_check(
    cs: &ConfigSpace,
    rm: &ReferenceMachine,
    ks: &[usize],
    t_max: usize,
    l_max: usize,
) -> Result<DecoderCheck> {
    let mut entries = Vec::new();
    for &k in ks {
        let table = coverage_table(cs, k, t_max, None)?;
        for row in table.rows {
            entries.push(DecoderEntry {
                k,
                c: plain_complexity(&row.y, rm, l_max),
                y: row.y,
            });
        }
    }
    let c_dec = entries
        .iter()
        .map(|e| match e.c {
            Complexity::Exact(c) | Complexity::UpperBound(c) => c as i64 - e.k as i64,
            Complexity::LowerBound(c) => c as i64 - e.k as i64,
        })
        .max()
        .unwrap_or(0);
    Ok(DecoderCheck { entries, c_dec })
}
