//! The prefix-complexity bound K(x) <= k + K(k) - log(1 - 2 eps) + c, checked
//! link by link through a desk-scale semi-density operator nu.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::bvl::{classical_target, BvlSearch};
use super::gap::show;
use super::plain::{toy_k, toy_k_nat, toy_m, toy_m_nat};
use crate::channel::ApproxChannel;
use crate::error::{Error, Result};
use crate::halting::{dominating_projection, enumerate_projections};
use crate::machine::IndeterminateState;
use crate::opalg::{psd_leq, Operator};
use crate::tolerances::EPS_NUM;

/// Multiplicative slack used by every operator and scalar link.
pub const FACTOR: f64 = 2.0;

/// Psi^{t,eps}(P_t) for each nonzero halting projection of one length.
pub struct LevelImages {
    pub k: usize,
    pub channels: Vec<ApproxChannel>,
    pub images: Vec<IndeterminateState>,
}

impl LevelImages {
    pub fn compute(
        base: &crate::machine::ConfigSpace,
        k: usize,
        t_max: usize,
        eps: &BigRational,
    ) -> Result<Self> {
        let ps = enumerate_projections(base, k, t_max)?;
        let channels = ps
            .into_par_iter()
            .map(|h| ApproxChannel::from_projection(base, h, eps.clone()))
            .collect::<Result<Vec<_>>>()?;
        let images = channels
            .par_iter()
            .map(|c| c.apply(&c.halting.p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k, channels, images })
    }

    /// nu_k = 2^-k sum_t Psi^{t,eps}(P_t)
    pub fn nu_k(&self, max_len: usize) -> Result<Operator> {
        let mut acc = IndeterminateState::zero(max_len);
        for img in &self.images {
            acc = acc.add(img)?;
        }
        Ok(acc.scale(1.0 / (1u64 << self.k) as f64).into_operator())
    }
}

/// nu = sum_k m(k)/2 nu_k + 1/2 sum_x m(x)|x><x| on strings up to max_len.
pub struct LemmaNu {
    pub eps: BigRational,
    pub max_len: usize,
    pub levels: Vec<LevelImages>,
    pub nu_k: Vec<Operator>,
    pub nu: Operator,
    /// max_x <x|nu|x> / m(x)
    pub c2: f64,
}

impl LemmaNu {
    pub fn build(search: &BvlSearch, k_max: usize, eps: BigRational) -> Result<Self> {
        let base = &search.base;
        let max_len = base.window();
        let levels = (0..=k_max)
            .map(|k| LevelImages::compute(base, k, search.t_max, &eps))
            .collect::<Result<Vec<_>>>()?;
        let nu_k = levels
            .iter()
            .map(|l| l.nu_k(max_len))
            .collect::<Result<Vec<_>>>()?;
        let dim = IndeterminateState::dim_for(max_len);
        let mut diag = vec![0.0; dim];
        for n in 0..=max_len {
            for i in 0..1usize << n {
                let x = crate::opalg::index_to_bits(i, n);
                diag[IndeterminateState::offset(n) + i] = 0.5 * f(&toy_m(&x));
            }
        }
        let mut nu = Operator::diagonal(&diag);
        for (k, op) in nu_k.iter().enumerate() {
            nu = nu.add(&op.scale(0.5 * f(&toy_m_nat(k as u64))))?;
        }
        let tr = nu.trace();
        if tr > 1.0 + EPS_NUM {
            return Err(Error::BoundViolation(format!("Tr nu = {tr} exceeds 1")));
        }
        let mut c2: f64 = 0.0;
        for n in 0..=max_len {
            for i in 0..1usize << n {
                let x = crate::opalg::index_to_bits(i, n);
                let j = IndeterminateState::offset(n) + i;
                c2 = c2.max(nu.get(j, j).re / f(&toy_m(&x)));
            }
        }
        Ok(Self {
            eps,
            max_len,
            levels,
            nu_k,
            nu,
            c2,
        })
    }

    /// The corpus-wide additive constant log2(FACTOR * c2).
    pub fn additive_constant(&self) -> f64 {
        (FACTOR * self.c2).log2()
    }
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug)]
pub struct ChainRow {
    pub x: String,
    /// Hbvl^eps(|x>) and the halting time of its witness.
    pub k: usize,
    pub s: usize,
    pub witness: String,
    pub fidelity: f64,
    /// Links 1 to 6 in order.
    pub steps: [bool; 6],
    /// K(x) - k - K(k) + log2(1 - 2 eps): the constant this string needs.
    pub needed: f64,
}

impl ChainRow {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|&b| b)
    }
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub eps: BigRational,
    pub c2: f64,
    pub constant: f64,
    pub trace_nu: f64,
    pub rows: Vec<ChainRow>,
    pub skipped: Vec<String>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(ChainRow::holds)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "lemma3 eps {} factor {FACTOR} c2 {:.9} constant {:.9} trace_nu {:.9}\n",
            self.eps, self.c2, self.constant, self.trace_nu
        );
        for r in &self.rows {
            let steps: Vec<&str> = r.steps.iter().map(|&b| if b { "ok" } else { "FAIL" }).collect();
            writeln!(
                s,
                "x {} k {} s {} witness {} F {:.9} needed {:.9} steps {}",
                show(&r.x),
                r.k,
                r.s,
                r.witness,
                r.fidelity,
                r.needed,
                steps.join(",")
            )
            .unwrap();
        }
        for x in &self.skipped {
            writeln!(s, "skipped {} no witness", show(x)).unwrap();
        }
        s
    }
}

/// Evaluates the six links for every corpus string with a dictionary witness.
pub fn lemma3_chain(search: &BvlSearch, nu: &LemmaNu, corpus: &[String]) -> Result<ChainReport> {
    let eps = f(&nu.eps);
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in [0, 1/2), got {eps}"
        )));
    }
    let two_nu = nu.nu.scale(FACTOR);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for x in corpus {
        let target = classical_target(x)?;
        let Some((k, idx)) = search.hbvl_eps_with(&target, eps, 1) else {
            skipped.push(x.clone());
            continue;
        };
        let Some(level) = nu.levels.get(k) else {
            return Err(Error::OutOfRange(format!(
                "witness length {k} above the levels of nu"
            )));
        };
        let program = &search.dictionary.programs[idx];
        let s = search.run(1, idx).time.expect("witness halts");
        let sigma = Operator::projector(&program.state);
        let m_k = f(&toy_m_nat(k as u64));
        let scale_k = m_k / (1u64 << k) as f64;

        let step1 = psd_leq(&nu.nu_k[k].scale(m_k), &two_nu)?;
        let ps: Vec<_> = level.channels.iter().map(|c| c.halting.clone()).collect();
        let dom = dominating_projection(&ps, &sigma)?;
        let pos = level.channels.iter().position(|c| c.t == s);
        let (step2, step3, xi) = match (dom, pos) {
            (Some(h), Some(i)) if h.t == s => {
                let s2 = psd_leq(&level.images[i].operator().scale(scale_k), &two_nu)?;
                let xi = level.channels[i].apply(&sigma)?;
                let s3 = psd_leq(&xi.operator().scale(scale_k), &two_nu)?;
                (s2, s3, Some(xi))
            }
            _ => (false, false, None),
        };
        let j = IndeterminateState::index_of(x)?;
        let fidelity = xi.as_ref().map_or(0.0, |xi| xi.operator().get(j, j).re);
        let nu_xx = nu.nu.get(j, j).re;
        let step4 = scale_k * fidelity <= FACTOR * nu_xx + EPS_NUM;
        let m_x = f(&toy_m(x));
        let step5 = fidelity > 1.0 - 2.0 * eps
            && scale_k * (1.0 - 2.0 * eps) <= FACTOR * nu.c2 * m_x * (1.0 + EPS_NUM);
        let lhs = k as f64 + toy_k_nat(k as u64) as f64 - (1.0 - 2.0 * eps).log2() + nu.additive_constant();
        let step6 = lhs + EPS_NUM >= toy_k(x) as f64;
        let needed = toy_k(x) as f64 - k as f64 - toy_k_nat(k as u64) as f64 + (1.0 - 2.0 * eps).log2();
        rows.push(ChainRow {
            x: x.clone(),
            k,
            s,
            witness: program.label.clone(),
            fidelity,
            steps: [step1, step2, step3, step4, step5, step6],
            needed,
        });
    }
    Ok(ChainReport {
        eps: nu.eps.clone(),
        c2: nu.c2,
        constant: nu.additive_constant(),
        trace_nu: nu.nu.trace(),
        rows,
        skipped,
    })
}

/// eps = 1/3
pub fn third() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(3))
}
