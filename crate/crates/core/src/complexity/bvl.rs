//! BvL complexity by exhaustive search over a declared program dictionary.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::parse_rational;
use crate::machine::{
    embed_vector, evolve, halting_profile, output_image, ConfigMixture, ConfigSpace, IndeterminateState,
};
use crate::opalg::lowrank::{self, LowRank};
use crate::opalg::{index_to_bits, PureState};
use crate::tolerances::ETA_HALT;

/// Halting horizon for program runs.
pub const PROGRAM_T_MAX: usize = 16;

/// Output-space state in factored form, keyed by indeterminate-length index.
pub type OutputState = LowRank<usize>;

#[derive(Clone, Debug)]
pub struct Program {
    pub label: String,
    pub state: PureState,
}

impl Program {
    /// Qubit length ||sigma||.
    pub fn len(&self) -> usize {
        self.state.dim().trailing_zeros() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Finite set of candidate inputs, ordered by length.
#[derive(Clone, Debug)]
pub struct Dictionary {
    pub description: String,
    pub programs: Vec<Program>,
}

const PHASES: [(&str, Complex64); 4] = [
    ("+", Complex64::new(1.0, 0.0)),
    ("-", Complex64::new(-1.0, 0.0)),
    ("+i", Complex64::new(0.0, 1.0)),
    ("-i", Complex64::new(0.0, -1.0)),
];

impl Dictionary {
    /// Basis states of length <= k_max and (|a> + phase |b>)/sqrt 2 for every
    /// pair a < b of equal length and phase in {1, -1, i, -i}.
    pub fn basic(k_max: usize) -> Self {
        let mut programs = Vec::new();
        for n in 0..=k_max {
            let d = 1usize << n;
            for a in 0..d {
                programs.push(Program {
                    label: if n == 0 { "-".into() } else { index_to_bits(a, n) },
                    state: PureState::basis(d, a),
                });
            }
            for a in 0..d {
                for b in a + 1..d {
                    for (name, phase) in PHASES {
                        let mut v = DVector::zeros(d);
                        v[a] = Complex64::new(1.0, 0.0);
                        v[b] = phase;
                        programs.push(Program {
                            label: format!("{}{name}{}", index_to_bits(a, n), index_to_bits(b, n)),
                            state: PureState::normalized(v).expect("nonzero"),
                        });
                    }
                }
            }
        }
        Self {
            description: format!("basic k_max {k_max}"),
            programs,
        }
    }

    /// Extra states, one per line: `state <n> <re im> x 2^n`, rationals, normalized on load.
    pub fn parse_states(text: &str) -> Result<Vec<Program>> {
        let mut out = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks[0] != "state" || toks.len() < 2 {
                return Err(Error::parse(line_no, "expected `state <n> <coefficients>`"));
            }
            let n: usize = toks[1]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad length `{}`", toks[1])))?;
            if n > 16 {
                return Err(Error::parse(line_no, "state length above 16"));
            }
            let d = 1usize << n;
            if toks.len() != 2 + 2 * d {
                return Err(Error::parse(
                    line_no,
                    format!("expected {} numbers, found {}", 2 * d, toks.len() - 2),
                ));
            }
            let mut v = DVector::zeros(d);
            for j in 0..d {
                let mut part = [0.0; 2];
                for (p, tok) in part.iter_mut().zip(&toks[2 + 2 * j..4 + 2 * j]) {
                    let r = parse_rational(tok)
                        .map_err(|m| Error::parse(line_no, m))?
                        .ok_or_else(|| Error::ZeroDenominator {
                            line: line_no,
                            token: tok.to_string(),
                        })?;
                    *p = r.to_f64().unwrap_or(f64::NAN);
                }
                v[j] = Complex64::new(part[0], part[1]);
            }
            let state = PureState::normalized(v).map_err(|_| Error::parse(line_no, "zero state"))?;
            out.push(Program {
                label: format!("user{}", out.len() + 1),
                state,
            });
        }
        Ok(out)
    }

    pub fn with_states(mut self, extra: Vec<Program>, source: &str) -> Self {
        if !extra.is_empty() {
            self.description = format!("{} + {} from {source}", self.description, extra.len());
            self.programs.extend(extra);
        }
        self.programs.sort_by_key(|p| p.len());
        self
    }

    pub fn max_len(&self) -> usize {
        self.programs.iter().map(Program::len).max().unwrap_or(0)
    }
}

/// Output of one program: halting time and the read-out state.
#[derive(Clone, Debug)]
pub struct ProgramRun {
    pub time: Option<usize>,
    pub output: Option<OutputState>,
}

/// Factored indeterminate-length output of a configuration mixture.
pub fn output_state(cs: &ConfigSpace, rho: &ConfigMixture, max_len: usize) -> Result<OutputState> {
    let mut terms = Vec::new();
    for (w, v) in &rho.terms {
        let img = output_image(cs.machine(), cs.window(), v, max_len)?;
        for g in img.groups {
            let sv: BTreeMap<usize, Complex64> = g
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm_sqr() > 0.0)
                .map(|(i, z)| (i, *z))
                .collect();
            terms.push((*w, sv));
        }
        if img.lambda_weight > 0.0 {
            terms.push((
                w * img.lambda_weight,
                BTreeMap::from([(0, Complex64::new(1.0, 0.0))]),
            ));
        }
    }
    Ok(LowRank::new(terms))
}

pub fn classical_target(x: &str) -> Result<OutputState> {
    Ok(LowRank::pure(BTreeMap::from([(
        IndeterminateState::index_of(x)?,
        Complex64::new(1.0, 0.0),
    )])))
}

/// Runs one program to its halting time; programs that do not halt
/// within the horizon have no output.
pub fn run_program(cs: &ConfigSpace, program: &Program, t_max: usize) -> Result<ProgramRun> {
    if program.len() > cs.window() {
        return Ok(ProgramRun {
            time: None,
            output: None,
        });
    }
    let rho = LowRank::pure(embed_vector(cs, program.state.coeffs().as_slice())?);
    let prof = halting_profile(cs, &rho, t_max, ETA_HALT)?;
    match prof.time {
        Some(t) => {
            let fin = evolve(cs, &rho, t)?;
            Ok(ProgramRun {
                time: Some(t),
                output: Some(output_state(cs, &fin, cs.window())?),
            })
        }
        None => Ok(ProgramRun {
            time: None,
            output: None,
        }),
    }
}

/// Precomputed runs of every dictionary program on a quantum reference
/// machine. Machines with an auxiliary tape receive the parameter k in
/// binary there; single-tape machines ignore it.
pub struct BvlSearch {
    pub base: ConfigSpace,
    pub dictionary: Dictionary,
    pub k_max: usize,
    pub t_max: usize,
    /// runs[k - 1][i] for aux machines, a single shared row otherwise.
    runs: Vec<Vec<ProgramRun>>,
}

impl BvlSearch {
    pub fn new(cs: &ConfigSpace, dictionary: Dictionary, k_max: usize) -> Result<Self> {
        Self::with_horizon(cs, dictionary, k_max, PROGRAM_T_MAX)
    }

    pub fn with_horizon(
        cs: &ConfigSpace,
        dictionary: Dictionary,
        k_max: usize,
        t_max: usize,
    ) -> Result<Self> {
        if dictionary.programs.is_empty() {
            return Err(Error::EmptyDictionary);
        }
        if k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be positive".into()));
        }
        let spaces: Vec<ConfigSpace> = if cs.machine().aux_tape().is_some() {
            (1..=k_max)
                .map(|k| cs.clone().with_aux(format!("{k:b}")))
                .collect()
        } else {
            vec![cs.clone()]
        };
        let runs = spaces
            .iter()
            .map(|s| {
                dictionary
                    .programs
                    .par_iter()
                    .map(|p| run_program(s, p, t_max))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base: cs.clone(),
            dictionary,
            k_max,
            t_max,
            runs,
        })
    }

    fn row(&self, k: usize) -> &[ProgramRun] {
        if self.runs.len() == 1 {
            &self.runs[0]
        } else {
            &self.runs[k.clamp(1, self.k_max) - 1]
        }
    }

    pub fn run(&self, k: usize, index: usize) -> &ProgramRun {
        &self.row(k)[index]
    }

    /// D(M(sigma_i, k), target), or None when the program does not halt.
    pub fn distance(&self, target: &OutputState, k: usize, index: usize) -> Option<f64> {
        self.row(k)[index]
            .output
            .as_ref()
            .map(|o| lowrank::trace_distance(o, target))
    }

    fn accepts(d: f64, eps: f64) -> bool {
        // D <= 1 always, so the bound is inclusive once eps reaches 1.
        if eps >= 1.0 {
            d <= 1.0
        } else {
            d < eps
        }
    }

    /// Shortest program with D(M(sigma, k), target) < eps; index of the
    /// first such program in dictionary order.
    pub fn hbvl_eps_with(&self, target: &OutputState, eps: f64, k: usize) -> Option<(usize, usize)> {
        let hits: Vec<usize> = (0..self.dictionary.programs.len())
            .into_par_iter()
            .filter(|&i| self.distance(target, k, i).is_some_and(|d| Self::accepts(d, eps)))
            .collect();
        hits.into_iter()
            .map(|i| (self.dictionary.programs[i].len(), i))
            .min()
    }

    /// Hbvl^eps with the parameter fixed at k = 1.
    pub fn hbvl_eps(&self, target: &OutputState, eps: f64) -> Option<usize> {
        self.hbvl_eps_with(target, eps, 1).map(|(n, _)| n)
    }

    /// Shortest sigma with D(M(sigma, k), target) < 1/k for every k <= k_max.
    pub fn hbvl_witness(&self, target: &OutputState) -> Option<(usize, usize)> {
        let hits: Vec<usize> = (0..self.dictionary.programs.len())
            .into_par_iter()
            .filter(|&i| {
                (1..=self.k_max).all(|k| {
                    self.distance(target, k, i)
                        .is_some_and(|d| Self::accepts(d, 1.0 / k as f64))
                })
            })
            .collect();
        hits.into_iter()
            .map(|i| (self.dictionary.programs[i].len(), i))
            .min()
    }

    pub fn hbvl(&self, target: &OutputState) -> Option<usize> {
        self.hbvl_witness(target).map(|(n, _)| n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn search(name: &str, k_max: usize) -> BvlSearch {
        let cs = ConfigSpace::from_machine(corpus::machine(name).unwrap()).unwrap();
        BvlSearch::new(&cs, Dictionary::basic(k_max), k_max).unwrap()
    }

    #[test]
    fn dictionary_shape() {
        let d = Dictionary::basic(2);
        // 1 + (2 + 4) + (4 + 6*4)
        assert_eq!(d.programs.len(), 35);
        assert_eq!(d.max_len(), 2);
        assert!(d.programs.windows(2).all(|w| w[0].len() <= w[1].len()));
        let extra = Dictionary::parse_states("state 1 3/5 0 0 4/5 // rot\n").unwrap();
        assert_eq!(extra.len(), 1);
        assert!((extra[0].state.coeffs()[1].im - 0.8).abs() < 1e-12);
        assert!(Dictionary::parse_states("state 1 1 0").is_err());
        assert!(matches!(
            Dictionary::parse_states("state 0 1/0 0"),
            Err(Error::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn identity_basis_targets() {
        let s = search("identity", 3);
        let t = classical_target("0").unwrap();
        assert_eq!(s.hbvl_eps(&t, 0.5), Some(1));
        assert_eq!(s.hbvl(&t), Some(1));
        // Any halting program is within distance 1.
        assert_eq!(s.hbvl_eps(&t, 1.0), Some(0));
    }

    #[test]
    fn empty_dictionary_is_an_error() {
        let cs = ConfigSpace::from_machine(corpus::machine("identity").unwrap()).unwrap();
        let d = Dictionary {
            description: "none".into(),
            programs: vec![],
        };
        assert!(matches!(BvlSearch::new(&cs, d, 2), Err(Error::EmptyDictionary)));
    }

    #[test]
    fn copy1_and_hadamard_minima() {
        // Independent oracle: copy1 maps y to y1, so the shortest classical
        // program for 0101 is 010; nothing shorter reaches length 4.
        let s = search("copy1", 4);
        assert_eq!(s.hbvl_eps(&classical_target("0101").unwrap(), 1.0 / 3.0), Some(3));
        assert_eq!(s.hbvl_eps(&classical_target("0100").unwrap(), 1.0 / 3.0), None);
        let h = search("hadamard", 4);
        for x in ["", "0", "10", "0110"] {
            let t = classical_target(x).unwrap();
            assert_eq!(h.hbvl(&t), Some(x.len()), "{x}");
        }
    }

    #[test]
    fn loop_never_produces_output() {
        let s = search("loop", 2);
        assert!(s.run(1, 0).output.is_none());
        assert_eq!(s.hbvl_eps(&classical_target("").unwrap(), 1.0), None);
    }

    #[test]
    fn monotone_in_eps() {
        let s = search("rot35", 3);
        for x in ["0", "1", "01", "110"] {
            let t = classical_target(x).unwrap();
            let vals: Vec<Option<usize>> = [1.0, 0.5, 1.0 / 3.0, 0.1, 0.01]
                .iter()
                .map(|&e| s.hbvl_eps(&t, e))
                .collect();
            for w in vals.windows(2) {
                if let Some(b) = w[1] {
                    assert!(w[0].is_some_and(|a| a <= b), "{x}: {vals:?}");
                }
            }
            if let Some(h) = s.hbvl(&t) {
                for k in 1..=3 {
                    assert!(s.hbvl_eps_with(&t, 1.0 / k as f64, k).unwrap().0 <= h);
                }
            }
        }
    }
}
