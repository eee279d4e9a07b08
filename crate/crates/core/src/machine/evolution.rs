use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{Config, ConfigSpace};
use super::def::{Completion, Move, QTMDef, Transition};
use crate::error::{Error, Result};
use crate::exact::ExactComplex;
use crate::opalg::{LowRank, SparseOperator, SparseVec};
use crate::tolerances::EPS_NUM;

pub type StateVec = SparseVec<Config>;

/// Factored semi-density operator over configurations.
pub type ConfigMixture = LowRank<Config>;

fn shift(head: u8, m: Move, window: usize) -> u8 {
    let h = head as usize;
    let next = match m {
        Move::R => (h + 1) % window,
        Move::L => (h + window - 1) % window,
    };
    next as u8
}

/// Successor configurations of `c` with their amplitudes.
pub fn successors<'a>(def: &'a QTMDef, window: usize, c: &Config) -> Result<Successors<'a>> {
    if c.state as usize == def.final_state {
        let next = match def.completion() {
            Completion::Absorb => *c,
            Completion::Restart => Config {
                state: def.start as u16,
                ..*c
            },
        };
        return Ok(Successors::Completion(Some(next)));
    }
    let read: Vec<_> = (0..def.tapes).map(|t| c.read(t)).collect();
    let ts = def
        .transitions(c.state as usize, &read)
        .ok_or_else(|| Error::MissingRule(c.describe(def, window)))?;
    Ok(Successors::Rules {
        base: *c,
        window,
        tapes: def.tapes,
        rules: ts.iter(),
    })
}

pub enum Successors<'a> {
    Completion(Option<Config>),
    Rules {
        base: Config,
        window: usize,
        tapes: usize,
        rules: std::slice::Iter<'a, Transition>,
    },
}

impl<'a> Iterator for Successors<'a> {
    type Item = (Config, Option<&'a Transition>);

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            Successors::Completion(c) => c.take().map(|c| (c, None)),
            Successors::Rules {
                base,
                window,
                tapes,
                rules,
            } => rules.next().map(|t| {
                let mut n = *base;
                n.state = t.target as u16;
                for k in 0..*tapes {
                    let h = n.heads[k] as usize;
                    n.set_cell(k, h, t.write[k]);
                    n.heads[k] = shift(n.heads[k], t.moves[k], *window);
                }
                (n, Some(t))
            }),
        }
    }
}

/// One application of the evolution operator to a sparse vector.
pub fn step(def: &QTMDef, window: usize, v: &StateVec) -> Result<StateVec> {
    let mut out: StateVec = BTreeMap::new();
    for (c, amp) in v {
        for (n, t) in successors(def, window, c)? {
            let a = match t {
                Some(t) => amp * t.amp.value(),
                None => *amp,
            };
            *out.entry(n).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
    }
    out.retain(|_, z| z.norm_sqr() != 0.0);
    Ok(out)
}

/// Exact counterpart of [`step`]; fails on irrational amplitudes.
pub fn step_exact(
    def: &QTMDef,
    window: usize,
    v: &BTreeMap<Config, ExactComplex>,
) -> Result<BTreeMap<Config, ExactComplex>> {
    let mut out: BTreeMap<Config, ExactComplex> = BTreeMap::new();
    for (c, amp) in v {
        for (n, t) in successors(def, window, c)? {
            let a = match t {
                Some(t) => {
                    let e = t
                        .amp
                        .exact()
                        .ok_or_else(|| Error::IrrationalAmplitude(format!("{} {}", t.amp.re, t.amp.im)))?;
                    amp * &e
                }
                None => amp.clone(),
            };
            let slot = out.entry(n).or_insert_with(ExactComplex::zero);
            *slot = &*slot + &a;
        }
    }
    out.retain(|_, z| !z.is_zero());
    Ok(out)
}

/// Full sparse evolution operator on the configuration space.
pub fn build_evolution(cs: &ConfigSpace) -> Result<SparseOperator> {
    let dim = cs.dim()?;
    let def = cs.machine();
    let w = cs.window();
    let columns: Vec<Vec<(usize, usize, Complex64)>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let c = cs.config(col)?;
            let v = BTreeMap::from([(c, Complex64::new(1.0, 0.0))]);
            step(def, w, &v)?
                .into_iter()
                .map(|(n, a)| Ok((cs.index(&n)?, col, a)))
                .collect()
        })
        .collect::<Result<_>>()?;
    SparseOperator::from_triplets(dim, columns.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct WellFormedReport {
    pub dim: usize,
    pub nnz: usize,
    pub completion: Completion,
    pub unitary_defect: f64,
    pub pass: bool,
}

pub fn wellformed_check(cs: &ConfigSpace) -> Result<WellFormedReport> {
    wellformed_check_within(cs, EPS_NUM)
}

pub fn wellformed_check_within(cs: &ConfigSpace, tol: f64) -> Result<WellFormedReport> {
    let u = build_evolution(cs)?;
    let defect = u.unitary_defect();
    Ok(WellFormedReport {
        dim: u.dim(),
        nnz: u.nnz(),
        completion: cs.machine().completion(),
        unitary_defect: defect,
        pass: defect <= tol,
    })
}

/// Exact unitarity test: every column has unit norm and columns that share a
/// row are orthogonal, all in Gaussian-rational arithmetic.
pub fn exact_wellformed_check(cs: &ConfigSpace) -> Result<bool> {
    let dim = cs.dim()?;
    let def = cs.machine();
    let columns: Vec<BTreeMap<usize, ExactComplex>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let c = cs.config(col)?;
            let v = BTreeMap::from([(c, ExactComplex::one())]);
            step_exact(def, cs.window(), &v)?
                .into_iter()
                .map(|(n, a)| Ok((cs.index(&n)?, a)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        let norm = col.values().fold(ExactComplex::zero(), |acc, z| {
            &acc + &ExactComplex::from_real(z.norm_sqr())
        });
        if norm != ExactComplex::one() {
            return Ok(false);
        }
        for &r in col.keys() {
            by_row.entry(r).or_default().push(j);
        }
    }
    let mut checked = std::collections::BTreeSet::new();
    for cols in by_row.values() {
        for (x, &a) in cols.iter().enumerate() {
            for &b in &cols[x + 1..] {
                if !checked.insert((a, b)) {
                    continue;
                }
                let ip =
                    columns[a]
                        .iter()
                        .fold(ExactComplex::zero(), |acc, (r, za)| match columns[b].get(r) {
                            Some(zb) => &acc + &(&za.conj() * zb),
                            None => acc,
                        });
                if !ip.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Embeds an ensemble of k-qubit pure states as start configurations.
pub fn embed_ensemble(
    cs: &ConfigSpace,
    ensemble: &[(f64, crate::opalg::PureState)],
) -> Result<ConfigMixture> {
    let mut terms = Vec::with_capacity(ensemble.len());
    for (w, psi) in ensemble {
        terms.push((*w, embed_vector(cs, psi.coeffs().as_slice())?));
    }
    Ok(LowRank::new(terms))
}

/// Sparse start-configuration vector for coefficients over `Q_k`.
pub fn embed_vector(cs: &ConfigSpace, coeffs: &[Complex64]) -> Result<StateVec> {
    let k = qubits_of(coeffs.len())?;
    if k > cs.window() {
        return Err(Error::InputTooLong {
            len: k,
            window: cs.window(),
        });
    }
    let mut v = BTreeMap::new();
    for (i, z) in coeffs.iter().enumerate() {
        if z.norm_sqr() != 0.0 {
            let bits = crate::opalg::index_to_bits(i, k);
            v.insert(cs.input_config(&bits)?, *z);
        }
    }
    Ok(v)
}

pub fn embed_bits(cs: &ConfigSpace, bits: &str) -> Result<StateVec> {
    Ok(BTreeMap::from([(
        cs.input_config(bits)?,
        Complex64::new(1.0, 0.0),
    )]))
}

/// Embeds a semi-density operator over `Q_k` via its eigendecomposition.
pub fn embed_input(cs: &ConfigSpace, sigma: &crate::opalg::Operator) -> Result<ConfigMixture> {
    qubits_of(sigma.dim())?;
    let e = crate::opalg::eigh(sigma)?;
    if let Some(&min) = e.values.first() {
        if min < -EPS_NUM {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    let mut terms = Vec::new();
    for (i, &lambda) in e.values.iter().enumerate() {
        if lambda > EPS_NUM {
            let col = e.vector(i);
            terms.push((lambda, embed_vector(cs, col.as_slice())?));
        }
    }
    Ok(LowRank::new(terms))
}

pub(crate) fn qubits_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// u^t rho u^t*
pub fn evolve(cs: &ConfigSpace, rho: &ConfigMixture, t: usize) -> Result<ConfigMixture> {
    evolve_with(cs.machine(), cs.window(), rho, t)
}

pub fn evolve_with(def: &QTMDef, window: usize, rho: &ConfigMixture, t: usize) -> Result<ConfigMixture> {
    let terms = rho
        .terms
        .par_iter()
        .map(|(w, v)| {
            let mut cur = v.clone();
            for _ in 0..t {
                cur = step(def, window, &cur)?;
            }
            Ok((*w, cur))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LowRank::new(terms))
}

/// Vectors `v, u v, ..., u^t_max v`.
pub fn trajectory(def: &QTMDef, window: usize, v: &StateVec, t_max: usize) -> Result<Vec<StateVec>> {
    let mut out = Vec::with_capacity(t_max + 1);
    out.push(v.clone());
    for _ in 0..t_max {
        let next = step(def, window, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

pub fn final_weight(def: &QTMDef, rho: &ConfigMixture) -> f64 {
    let f = def.final_state as u16;
    rho.weight_where(|c| c.state == f)
}

#[derive(Clone, Debug, PartialEq)]
pub enum HaltDiagnostic {
    Halted,
    NeverHalted,
    /// Final weight strictly between the tolerances at `step`.
    Partial {
        step: usize,
        weight: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaltingProfile {
    pub time: Option<usize>,
    pub diagnostic: HaltDiagnostic,
    /// Normalized final-state weight at steps 0..=last inspected.
    pub weights: Vec<f64>,
}

/// Least t <= t_max with final weight >= 1 - eta whose predecessors all have
/// weight <= eta (weights normalized by the trace of `rho`).
pub fn halting_profile(
    cs: &ConfigSpace,
    rho: &ConfigMixture,
    t_max: usize,
    eta: f64,
) -> Result<HaltingProfile> {
    let def = cs.machine();
    let total = rho.trace();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("input has zero trace".into()));
    }
    let mut cur = rho.clone();
    let mut weights = Vec::new();
    for t in 0..=t_max {
        if t > 0 {
            cur = evolve(cs, &cur, 1)?;
        }
        let w = final_weight(def, &cur) / total;
        weights.push(w);
        if w >= 1.0 - eta {
            return Ok(HaltingProfile {
                time: Some(t),
                diagnostic: HaltDiagnostic::Halted,
                weights,
            });
        }
        if w > eta {
            return Ok(HaltingProfile {
                time: None,
                diagnostic: HaltDiagnostic::Partial { step: t, weight: w },
                weights,
            });
        }
    }
    Ok(HaltingProfile {
        time: None,
        diagnostic: HaltDiagnostic::NeverHalted,
        weights,
    })
}

/// Halting time of an exact pure input with eta = 0: weight exactly 0 before
/// and exactly 1 at the returned step.
pub fn exact_halting_time(
    cs: &ConfigSpace,
    input: &BTreeMap<Config, ExactComplex>,
    t_max: usize,
) -> Result<Option<usize>> {
    let def = cs.machine();
    let f = def.final_state as u16;
    let mut cur = input.clone();
    for t in 0..=t_max {
        if t > 0 {
            cur = step_exact(def, cs.window(), &cur)?;
        }
        let total = cur.values().fold(ExactComplex::zero(), |acc, z| {
            &acc + &ExactComplex::from_real(z.norm_sqr())
        });
        let fin = cur
            .iter()
            .filter(|(c, _)| c.state == f)
            .fold(ExactComplex::zero(), |acc, (_, z)| {
                &acc + &ExactComplex::from_real(z.norm_sqr())
            });
        if fin.is_zero() {
            continue;
        }
        return Ok((fin == total).then_some(t));
    }
    Ok(None)
}
