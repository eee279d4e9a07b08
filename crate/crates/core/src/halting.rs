//! Halting subspaces: for each t the span of k-qubit inputs whose final-state
//! weight is zero before step t and one at step t.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::machine::{embed_bits, trajectory, ConfigSpace, StateVec};
use crate::opalg::{index_to_bits, null_space, Operator, PureState};
use crate::tolerances::{EPS_NUM, ETA_SUB, RANK_MISMATCH};

/// Largest halting time a subspace may be requested for.
pub const T_MAX_LIMIT: usize = 64;

#[derive(Clone, Debug)]
pub struct HaltingProjection {
    pub k: usize,
    pub t: usize,
    pub p: Operator,
    pub rank: usize,
    /// Orthonormal basis of the range of `p`.
    pub basis: Vec<PureState>,
}

/// Trajectories of the 2^k basis inputs for steps 0..=t_max.
struct Trajectories {
    paths: Vec<Vec<StateVec>>,
}

impl Trajectories {
    fn compute(cs: &ConfigSpace, k: usize, t_max: usize) -> Result<Self> {
        if k > cs.window() {
            return Err(Error::InputTooLong {
                len: k,
                window: cs.window(),
            });
        }
        if t_max > T_MAX_LIMIT {
            return Err(Error::OutOfRange(format!(
                "halting time {t_max} exceeds the limit {T_MAX_LIMIT}"
            )));
        }
        let paths = (0..1usize << k)
            .into_par_iter()
            .map(|i| {
                let v = embed_bits(cs, &index_to_bits(i, k))?;
                trajectory(cs.machine(), cs.window(), &v, t_max)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { paths })
    }

    /// Gram matrix of the basis trajectories at `step`, restricted to
    /// configurations selected by `keep`.
    fn gram(&self, step: usize, keep: impl Fn(u16) -> bool) -> DMatrix<Complex64> {
        let n = self.paths.len();
        let restricted: Vec<BTreeMap<_, _>> = self
            .paths
            .iter()
            .map(|p| {
                p[step]
                    .iter()
                    .filter(|(c, _)| keep(c.state))
                    .map(|(c, z)| (*c, *z))
                    .collect()
            })
            .collect();
        let mut g = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let ip = crate::opalg::lowrank::inner(&restricted[a], &restricted[b]);
                g[(a, b)] = ip;
                g[(b, a)] = ip.conj();
            }
        }
        g
    }

    fn projection(&self, final_state: u16, k: usize, t: usize, tol: f64) -> Result<HaltingProjection> {
        let mut m = self.gram(t, |s| s != final_state);
        for s in 0..t {
            m += self.gram(s, |q| q == final_state);
        }
        let basis = null_space(&Operator::new(m)?, tol)?;
        let p = Operator::projector_onto(1 << k, &basis)?.certify(EPS_NUM);
        let trace = p.trace();
        let rank = trace.round();
        if (trace - rank).abs() > RANK_MISMATCH || rank as usize != basis.len() {
            return Err(Error::Diagnostics(format!(
                "halting projection at t={t}: trace {trace} does not round to rank {}",
                basis.len()
            )));
        }
        Ok(HaltingProjection {
            k,
            t,
            p,
            rank: basis.len(),
            basis,
        })
    }
}

/// Projection onto the inputs in Q_k that halt in exactly `t` steps. The
/// stacked constraint operator is the sum of final-state Gram matrices for
/// steps before `t` and the non-final Gram matrix at `t`; its null space at
/// tolerance `eta` is the halting subspace.
pub fn halting_subspace(cs: &ConfigSpace, k: usize, t: usize, eta: f64) -> Result<HaltingProjection> {
    if t == 0 {
        return Err(Error::InvalidArgument("halting time must be at least 1".into()));
    }
    let tr = Trajectories::compute(cs, k, t)?;
    tr.projection(cs.machine().final_state as u16, k, t, eta)
}

/// Nonzero halting projections for t = 1..=t_max in ascending order.
pub fn enumerate_projections(cs: &ConfigSpace, k: usize, t_max: usize) -> Result<Vec<HaltingProjection>> {
    enumerate_projections_within(cs, k, t_max, ETA_SUB)
}

pub fn enumerate_projections_within(
    cs: &ConfigSpace,
    k: usize,
    t_max: usize,
    eta: f64,
) -> Result<Vec<HaltingProjection>> {
    let tr = Trajectories::compute(cs, k, t_max)?;
    let f = cs.machine().final_state as u16;
    let all = (1..=t_max)
        .into_par_iter()
        .map(|t| tr.projection(f, k, t, eta))
        .collect::<Result<Vec<_>>>()?;
    Ok(all.into_iter().filter(|h| h.rank > 0).collect())
}

/// Largest |Tr P_i P_j| over distinct pairs.
pub fn orthogonality_defect(ps: &[HaltingProjection]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in ps.iter().enumerate() {
        for b in &ps[i + 1..] {
            let tr = a.p.mul(&b.p)?.matrix().trace();
            worst = worst.max(tr.norm());
        }
    }
    Ok(worst)
}

pub fn trace_sum(ps: &[HaltingProjection]) -> f64 {
    ps.iter().map(|h| h.p.trace()).sum()
}

/// Halting projection dominating `sigma` (sigma <= P), if any.
pub fn dominating_projection<'a>(
    ps: &'a [HaltingProjection],
    sigma: &Operator,
) -> Result<Option<&'a HaltingProjection>> {
    for h in ps {
        if crate::opalg::psd_leq(sigma, &h.p)? {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::machine::{embed_ensemble, halting_profile, HaltDiagnostic};
    use crate::opalg::{projection_rank, random};
    use crate::tolerances::ETA_HALT;
    use proptest::prelude::*;

    fn cs(name: &str) -> ConfigSpace {
        ConfigSpace::new(corpus::machine(name).unwrap(), 6).unwrap()
    }

    #[test]
    fn identity_subspaces() {
        let id = cs("identity");
        assert_eq!(halting_subspace(&id, 1, 1, ETA_SUB).unwrap().rank, 2);
        assert_eq!(halting_subspace(&id, 1, 2, ETA_SUB).unwrap().rank, 0);
        let all = enumerate_projections(&id, 2, 16).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!((all[0].t, all[0].rank), (1, 4));
        assert!((trace_sum(&all) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn loop_has_no_subspaces() {
        assert!(enumerate_projections(&cs("loop"), 2, 16).unwrap().is_empty());
    }

    #[test]
    fn argument_errors() {
        let id = cs("identity");
        assert!(matches!(
            halting_subspace(&id, 7, 1, ETA_SUB),
            Err(Error::InputTooLong { .. })
        ));
        assert!(matches!(
            halting_subspace(&id, 1, T_MAX_LIMIT + 1, ETA_SUB),
            Err(Error::OutOfRange(_))
        ));
        assert!(halting_subspace(&id, 1, 0, ETA_SUB).is_err());
    }

    /// Span dimension per halting time of a grid of basis states and pairwise
    /// superpositions, each classified by direct simulation.
    fn brute_force_ranks(space: &ConfigSpace, k: usize, t_max: usize) -> BTreeMap<usize, usize> {
        let d = 1 << k;
        let mut grid: Vec<PureState> = (0..d).map(|i| PureState::basis(d, i)).collect();
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        for a in 0..d {
            for b in a + 1..d {
                for ph in phases {
                    let mut v = nalgebra::DVector::zeros(d);
                    v[a] = Complex64::new(1.0, 0.0);
                    v[b] = ph;
                    grid.push(PureState::normalized(v).unwrap());
                }
            }
        }
        let mut by_t: BTreeMap<usize, Vec<PureState>> = BTreeMap::new();
        for psi in grid {
            let rho = embed_ensemble(space, &[(1.0, psi.clone())]).unwrap();
            if let Some(t) = halting_profile(space, &rho, t_max, ETA_HALT).unwrap().time {
                by_t.entry(t).or_default().push(psi);
            }
        }
        by_t.into_iter()
            .map(|(t, states)| {
                let g = DMatrix::from_fn(states.len(), states.len(), |i, j| states[i].inner(&states[j]));
                let ev = crate::opalg::eigh_matrix(&g).values;
                (t, ev.iter().filter(|&&x| x > 1e-9).count())
            })
            .collect()
    }

    #[test]
    fn branch1_ranks_match_brute_force() {
        let space = cs("branch1");
        for k in 1..=3 {
            let ps = enumerate_projections(&space, k, 16).unwrap();
            let got: BTreeMap<usize, usize> = ps.iter().map(|h| (h.t, h.rank)).collect();
            assert_eq!(got, brute_force_ranks(&space, k, 16), "k={k}");
        }
        let k2: Vec<_> = enumerate_projections(&space, 2, 16)
            .unwrap()
            .iter()
            .map(|h| (h.t, h.rank))
            .collect();
        assert_eq!(k2, vec![(2, 1), (3, 3)]);
    }

    #[test]
    fn scan1_ranks() {
        let ps = enumerate_projections(&cs("scan1"), 3, 16).unwrap();
        let got: Vec<_> = ps.iter().map(|h| (h.t, h.rank)).collect();
        assert_eq!(got, vec![(3, 4), (4, 2), (5, 1), (6, 1)]);
    }

    #[test]
    fn corpus_orthogonality_and_trace_sum() {
        for (name, _) in corpus::MACHINES {
            for k in 1..=3 {
                let ps = enumerate_projections(&cs(name), k, 16).unwrap();
                assert!(orthogonality_defect(&ps).unwrap() <= 1e-9, "{name} k={k}");
                assert!(trace_sum(&ps) <= (1 << k) as f64 + 1e-9, "{name} k={k}");
                for h in &ps {
                    assert_eq!(projection_rank(&h.p, 1e-6).unwrap(), h.rank);
                }
            }
        }
    }

    #[test]
    fn membership_and_non_membership() {
        let space = cs("branch1");
        let k = 3;
        let ps = enumerate_projections(&space, k, 16).unwrap();
        let mut rng = random::rng(11);
        for h in &ps {
            for _ in 0..100 {
                let psi = random::random_in_span(&mut rng, &h.basis);
                let rho = embed_ensemble(&space, &[(1.0, psi)]).unwrap();
                assert_eq!(
                    halting_profile(&space, &rho, 16, ETA_HALT).unwrap().time,
                    Some(h.t)
                );
            }
        }
        let mut generic = 0;
        for _ in 0..20 {
            let psi = random::random_pure(&mut rng, 1 << k);
            let rho = embed_ensemble(&space, &[(1.0, psi)]).unwrap();
            let prof = halting_profile(&space, &rho, 16, ETA_HALT).unwrap();
            assert_eq!(prof.time, None);
            if matches!(prof.diagnostic, HaltDiagnostic::Partial { .. }) {
                generic += 1;
            }
        }
        assert_eq!(generic, 20);
        let lp = cs("loop");
        let none = enumerate_projections(&lp, k, 16).unwrap();
        let complement = null_space(&Operator::zeros(1 << k), 1e-9).unwrap();
        assert!(none.is_empty() && complement.len() == 1 << k);
        for _ in 0..20 {
            let psi = random::random_in_span(&mut rng, &complement);
            let rho = embed_ensemble(&lp, &[(1.0, psi)]).unwrap();
            let prof = halting_profile(&lp, &rho, 16, ETA_HALT).unwrap();
            assert_eq!(prof.diagnostic, HaltDiagnostic::NeverHalted);
        }
    }

    #[test]
    fn valid_inputs_are_dominated() {
        let space = cs("copy1");
        let ps = enumerate_projections(&space, 2, 16).unwrap();
        let sigma = Operator::projector(&PureState::from_bits("01").unwrap());
        let h = dominating_projection(&ps, &sigma).unwrap().unwrap();
        assert_eq!(h.t, 5);
        let branch = cs("branch1");
        let ps = enumerate_projections(&branch, 1, 16).unwrap();
        let mixed = Operator::identity(2).scale(0.5);
        assert!(dominating_projection(&ps, &mixed).unwrap().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_mixtures_in_subspace_halt_on_time(seed in any::<u64>()) {
            let space = cs("scan1");
            let ps = enumerate_projections(&space, 2, 16).unwrap();
            let mut rng = random::rng(seed);
            for h in &ps {
                let ens = random::random_ensemble_in_span(&mut rng, &h.basis);
                let rho = embed_ensemble(&space, &ens).unwrap();
                prop_assert_eq!(halting_profile(&space, &rho, 16, ETA_HALT).unwrap().time, Some(h.t));
            }
        }
    }
}
