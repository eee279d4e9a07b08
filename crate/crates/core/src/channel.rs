//! Elementary approximation channel: embed the input with 2t blank cells,
//! run a dyadically rounded copy of the machine for t steps, read the output.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::halting::{halting_subspace, HaltingProjection};
use crate::machine::{
    build_evolution, embed_input, evolve_with, extract_output_with, Amplitude, ConfigMixture, ConfigSpace,
    IndeterminateState, QTMDef,
};
use crate::opalg::{lowrank, psd_leq, trace_distance, Operator, SparseOperator};
use crate::tolerances::{ETA_SUB, MAX_WINDOW};

/// Dyadic approximation of a machine's transition amplitudes.
#[derive(Clone, Debug)]
pub struct RoundedMachine {
    pub def: QTMDef,
    /// Rounding precision in bits; `None` when every amplitude is rational.
    pub bits: Option<u32>,
    /// Uniform factor `1 - 2^-q` keeping the rounded evolution contractive.
    pub damping: Option<BigRational>,
    /// Allowed entrywise error.
    pub budget: f64,
    /// Branching width of the evolution (max nonzeros per row or column).
    pub width: usize,
}

fn ceil_log2(n: &BigInt) -> u32 {
    let mut p = 0u32;
    while (BigInt::one() << p as usize) < *n {
        p += 1;
    }
    p
}

/// Rounds `def` so that every entry of its evolution moves by at most
/// `gamma / (6 * width)`, which bounds the operator-norm error by `gamma / 6`
/// and the per-step trace-distance error by `gamma / 3`.
pub fn approximate_machine(def: &QTMDef, window: usize, gamma: &BigRational) -> Result<RoundedMachine> {
    if !gamma.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let cs = ConfigSpace::new(def.clone(), window)?;
    let width = build_evolution(&cs)?.branching_width().max(1);
    let w = BigInt::from(width);
    let budget_exact = gamma / BigRational::from_integer(BigInt::from(6) * &w);
    let budget = rational_to_f64(&budget_exact);
    if def.is_exact() {
        return Ok(RoundedMachine {
            def: def.clone(),
            bits: None,
            damping: None,
            budget,
            width,
        });
    }
    // Entry error after rounding and damping is below (2w + 2) 2^-p.
    let need = BigRational::from_integer(BigInt::from(2) * &w + 2) / &budget_exact;
    let bits = ceil_log2(&need.ceil().to_integer());
    let q = bits - ceil_log2(&w).min(bits.saturating_sub(1));
    let damping = BigRational::one() - BigRational::new(BigInt::one(), BigInt::one() << q as usize);
    let mut rounded = def.rounded(bits);
    for t in rounded.rules.values_mut().flatten() {
        let e = t
            .amp
            .exact()
            .expect("rounded amplitudes are rational")
            .scale(&damping);
        t.amp = Amplitude::rational(e.re().clone(), e.im().clone());
    }
    Ok(RoundedMachine {
        def: rounded,
        bits: Some(bits),
        damping: Some(damping),
        budget,
        width,
    })
}

/// Rounded evolution on an indexable window together with the measured
/// entrywise error against the original evolution.
pub fn approximate_unitary(
    cs: &ConfigSpace,
    gamma: &BigRational,
) -> Result<(SparseOperator, RoundedMachine, f64)> {
    let rm = approximate_machine(cs.machine(), cs.window(), gamma)?;
    let u = build_evolution(cs)?;
    let ut = build_evolution(&ConfigSpace::new(rm.def.clone(), cs.window())?)?;
    let err = u.max_abs_diff(&ut)?;
    Ok((ut, rm, err))
}

/// Input embedding with `2t` extra blank cells per tape.
pub fn tape_embed(cs: &ConfigSpace, sigma: &Operator, t: usize) -> Result<ConfigMixture> {
    let ext = extended_space(cs, t)?;
    embed_input(&ext, sigma)
}

fn extended_space(cs: &ConfigSpace, t: usize) -> Result<ConfigSpace> {
    let window = cs.window() + 2 * t;
    if window > MAX_WINDOW {
        return Err(Error::WindowTooLarge {
            window,
            max: MAX_WINDOW,
        });
    }
    cs.with_window(window)
}

#[derive(Clone, Debug)]
pub struct ApproxChannel {
    pub k: usize,
    pub t: usize,
    pub delta: BigRational,
    pub gamma: BigRational,
    pub base: ConfigSpace,
    pub window_ext: usize,
    /// Longest output read by the channel (the base window).
    pub max_len: usize,
    pub machine: Arc<QTMDef>,
    pub rounded: RoundedMachine,
    /// max |u~ u~* - I| on the base window.
    pub defect: f64,
    /// max |u - u~| on the base window.
    pub max_entry_error: f64,
    pub halting: HaltingProjection,
}

impl ApproxChannel {
    pub fn new(cs: &ConfigSpace, k: usize, t: usize, delta: BigRational) -> Result<Self> {
        if !delta.is_positive() || delta >= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        if t == 0 {
            return Err(Error::InvalidArgument("channel needs t >= 1".into()));
        }
        let halting = halting_subspace(cs, k, t, ETA_SUB)?;
        Self::from_projection(cs, halting, delta)
    }

    /// Channel for the time and length of an already computed halting
    /// projection.
    pub fn from_projection(cs: &ConfigSpace, halting: HaltingProjection, delta: BigRational) -> Result<Self> {
        if !delta.is_positive() || delta >= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        let (k, t) = (halting.k, halting.t);
        let gamma = &delta / BigRational::from_integer(BigInt::from(t));
        let ext = extended_space(cs, t)?;
        let (ut, rounded, max_entry_error) = approximate_unitary(cs, &gamma)?;
        let defect = ut.unitary_defect();
        if defect > 2.0 * rounded.budget || max_entry_error > rounded.budget {
            return Err(Error::Diagnostics(format!(
                "rounded evolution out of budget: defect {defect:e}, entry error {max_entry_error:e}, budget {:e}",
                rounded.budget
            )));
        }
        Ok(Self {
            k,
            t,
            delta,
            gamma,
            base: cs.clone(),
            window_ext: ext.window(),
            max_len: cs.window(),
            machine: cs.machine_arc(),
            rounded,
            defect,
            max_entry_error,
            halting,
        })
    }

    pub fn gamma_f64(&self) -> f64 {
        rational_to_f64(&self.gamma)
    }

    pub fn delta_f64(&self) -> f64 {
        rational_to_f64(&self.delta)
    }

    fn check_input(&self, sigma: &Operator) -> Result<()> {
        if sigma.dim() != 1 << self.k {
            return Err(Error::DimensionMismatch {
                left: 1 << self.k,
                right: sigma.dim(),
            });
        }
        Ok(())
    }

    fn embed(&self, sigma: &Operator) -> Result<ConfigMixture> {
        self.check_input(sigma)?;
        tape_embed(&self.base, sigma, self.t)
    }

    /// E2(u~^t E1(sigma) u~^t*)
    pub fn apply(&self, sigma: &Operator) -> Result<IndeterminateState> {
        let rho = self.embed(sigma)?;
        let out = evolve_with(&self.rounded.def, self.window_ext, &rho, self.t)?;
        extract_output_with(&self.rounded.def, self.window_ext, &out, self.max_len)
    }

    /// Output of the unrounded machine on the same extended tape.
    pub fn exact_output(&self, sigma: &Operator) -> Result<IndeterminateState> {
        let rho = self.embed(sigma)?;
        let out = evolve_with(&self.machine, self.window_ext, &rho, self.t)?;
        extract_output_with(&self.machine, self.window_ext, &out, self.max_len)
    }

    /// D(Psi(sigma), exact output) for an input dominated by the halting
    /// projection at time t.
    pub fn error_certificate(&self, sigma: &Operator) -> Result<f64> {
        self.check_input(sigma)?;
        if !psd_leq(sigma, &self.halting.p)? {
            return Err(Error::NotDominated(format!(
                "input is not below the halting projection for k={} t={} (rank {})",
                self.k, self.t, self.halting.rank
            )));
        }
        self.error_certificate_any(sigma)
    }

    /// Certificate without the halting precondition; the rounding bound holds
    /// for every input.
    pub fn error_certificate_any(&self, sigma: &Operator) -> Result<f64> {
        trace_distance(
            self.apply(sigma)?.operator(),
            self.exact_output(sigma)?.operator(),
        )
    }

    /// Per-step configuration-space error D(u~^l rho u~^l*, u^l rho u^l*)
    /// paired with the bound gamma * l, for l = 1..=t.
    pub fn accumulation_sweep(&self, sigma: &Operator) -> Result<Vec<AccumulationStep>> {
        let rho = self.embed(sigma)?;
        let gamma = self.gamma_f64();
        let mut exact = rho.clone();
        let mut approx = rho;
        let mut out = Vec::with_capacity(self.t);
        for l in 1..=self.t {
            exact = evolve_with(&self.machine, self.window_ext, &exact, 1)?;
            approx = evolve_with(&self.rounded.def, self.window_ext, &approx, 1)?;
            out.push(AccumulationStep {
                step: l,
                measured: lowrank::trace_distance(&approx, &exact),
                bound: gamma * l as f64,
            });
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccumulationStep {
    pub step: usize,
    pub measured: f64,
    pub bound: f64,
}

impl AccumulationStep {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound
    }
}

/// Smallest denominator exponent of a dyadic rational, if it is dyadic.
pub fn dyadic_exponent(r: &BigRational) -> Option<u32> {
    let d = r.denom();
    if d.is_zero() {
        return None;
    }
    let e = ceil_log2(d);
    ((BigInt::one() << e as usize) == *d).then_some(e)
}
