use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operator::{Flag, Operator};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::tolerances::EPS_NUM;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigh {
    pub fn vector(&self, i: usize) -> DVector<Complex64> {
        self.vectors.column(i).into_owned()
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn eigh_matrix(m: &DMatrix<Complex64>) -> Eigh {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let h = (m + m.adjoint()).scale(0.5);
    let se = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

pub fn eigh(a: &Operator) -> Result<Eigh> {
    require_hermitian(a, EPS_NUM)?;
    Ok(eigh_matrix(a.matrix()))
}

pub(crate) fn eigenvalues_unchecked(a: &Operator) -> Vec<f64> {
    eigh_matrix(a.matrix()).values
}

fn require_hermitian(a: &Operator, tol: f64) -> Result<()> {
    if a.flags().hermitian == Flag::Yes {
        return Ok(());
    }
    let defect = a.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

fn require_psd(a: &Operator, tol: f64) -> Result<Eigh> {
    let e = eigh(a)?;
    if let Some(&min) = e.values.first() {
        if min < -tol {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(e)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    a.check_dim(b)?;
    require_hermitian(a, EPS_NUM)?;
    require_hermitian(b, EPS_NUM)?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5 * eigh_matrix(&diff).values.iter().map(|v| v.abs()).sum::<f64>())
}

/// <psi|sigma|psi>
pub fn fidelity_pure(psi: &PureState, sigma: &Operator) -> Result<f64> {
    Ok(sigma.expectation(psi)?.re)
}

/// `a <= b` in the positive semidefinite order.
pub fn psd_leq(a: &Operator, b: &Operator) -> Result<bool> {
    psd_leq_within(a, b, EPS_NUM)
}

pub fn psd_leq_within(a: &Operator, b: &Operator, tol: f64) -> Result<bool> {
    a.check_dim(b)?;
    require_hermitian(a, tol)?;
    require_hermitian(b, tol)?;
    let diff = b.matrix() - a.matrix();
    Ok(eigh_matrix(&diff).values.first().is_none_or(|&m| m >= -tol))
}

/// Projection onto eigenvectors with eigenvalue at least `theta`; values
/// within tolerance of `theta` are included.
pub fn threshold_projection(o: &Operator, theta: f64) -> Result<Operator> {
    threshold_projection_within(o, theta, EPS_NUM)
}

pub fn threshold_projection_within(o: &Operator, theta: f64, tol: f64) -> Result<Operator> {
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::InvalidThreshold(theta));
    }
    let e = require_psd(o, tol)?;
    let d = o.dim();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (i, &v) in e.values.iter().enumerate() {
        if v >= theta - tol {
            let col = e.vectors.column(i);
            m += col * col.adjoint();
        }
    }
    Ok(Operator::new(m)?.certify(tol))
}

/// Orthonormal basis of the eigenspaces with eigenvalue at most `tol`.
pub fn null_space(a: &Operator, tol: f64) -> Result<Vec<PureState>> {
    let e = eigh(a)?;
    e.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= tol)
        .map(|(i, _)| PureState::normalized(e.vector(i)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityReport {
    pub rank: usize,
    pub threshold: f64,
    pub count: usize,
    pub bound_holds: bool,
}

/// Counts family members with `<e|P|e> > 1 - 1/(4m)` for a rank-m projection
/// and reports whether fewer than 2m of them exist.
pub fn capacity_check(p: &Operator, family: &[PureState]) -> Result<CapacityReport> {
    capacity_check_within(p, family, EPS_NUM)
}

pub fn capacity_check_within(p: &Operator, family: &[PureState], tol: f64) -> Result<CapacityReport> {
    let rank = projection_rank(p, tol)?;
    check_orthonormal(family, tol)?;
    let threshold = if rank == 0 {
        tol
    } else {
        1.0 - 1.0 / (4.0 * rank as f64)
    };
    let mut count = 0;
    for e in family {
        if p.expectation(e)?.re > threshold {
            count += 1;
        }
    }
    let bound_holds = if rank == 0 { count == 0 } else { count < 2 * rank };
    Ok(CapacityReport {
        rank,
        threshold,
        count,
        bound_holds,
    })
}

/// Rank of a projection after verifying the projection flag invariants.
pub fn projection_rank(p: &Operator, tol: f64) -> Result<usize> {
    require_hermitian(p, tol)?;
    let m = p.matrix();
    let defect = super::operator::max_abs(&(m * m - m));
    if defect > tol {
        return Err(Error::NotProjection { defect });
    }
    let e = eigh_matrix(m);
    let mut rank = 0;
    for v in &e.values {
        if (v - 1.0).abs() <= tol {
            rank += 1;
        } else if v.abs() > tol {
            return Err(Error::NotProjection {
                defect: v.abs().min((v - 1.0).abs()),
            });
        }
    }
    Ok(rank)
}

pub fn check_orthonormal(family: &[PureState], tol: f64) -> Result<()> {
    let mut defect = 0.0f64;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i) {
            if a.dim() != b.dim() {
                return Err(Error::DimensionMismatch {
                    left: a.dim(),
                    right: b.dim(),
                });
            }
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((a.inner(b) - Complex64::new(target, 0.0)).norm());
        }
    }
    if defect > tol {
        return Err(Error::NotOrthonormal { defect });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::random;
    use num_traits::Zero;
    use proptest::prelude::*;
    use rand::Rng;

    fn ket(bits: &str) -> PureState {
        PureState::from_bits(bits).unwrap()
    }

    fn plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_slice(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]).unwrap()
    }

    /// Closed-form eigenvalues of a 2x2 Hermitian matrix.
    fn oracle_trace_distance_2x2(a: &Operator, b: &Operator) -> f64 {
        let d = a.matrix() - b.matrix();
        let (p, s) = (d[(0, 0)].re, d[(1, 1)].re);
        let mean = 0.5 * (p + s);
        let rad = (0.25 * (p - s) * (p - s) + d[(0, 1)].norm_sqr()).sqrt();
        0.5 * ((mean + rad).abs() + (mean - rad).abs())
    }

    #[test]
    fn trace_distance_examples() {
        let z = Operator::projector(&ket("0"));
        let o = Operator::projector(&ket("1"));
        let p = Operator::projector(&plus());
        assert!(trace_distance(&z, &z).unwrap().abs() < 1e-12);
        assert!((trace_distance(&z, &o).unwrap() - 1.0).abs() < 1e-12);
        let measured = trace_distance(&z, &p).unwrap();
        assert!((measured - oracle_trace_distance_2x2(&z, &p)).abs() < 1e-12);
        assert!((measured - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_rejects_bad_inputs() {
        let a = Operator::identity(2);
        let b = Operator::identity(3);
        assert!(matches!(
            trace_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        let nh = Operator::new(m).unwrap();
        assert!(matches!(trace_distance(&nh, &a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let z = ket("0");
        assert_eq!(fidelity_pure(&z, &Operator::projector(&z)).unwrap(), 1.0);
        assert_eq!(fidelity_pure(&z, &Operator::projector(&ket("1"))).unwrap(), 0.0);
        assert_eq!(fidelity_pure(&z, &Operator::diagonal(&[0.5, 0.5])).unwrap(), 0.5);
        assert!(fidelity_pure(&z, &Operator::identity(4)).is_err());
    }

    #[test]
    fn psd_order_examples() {
        let a = Operator::diagonal(&[0.3, 0.7]);
        assert!(psd_leq(&a, &a).unwrap());
        assert!(psd_leq(&Operator::diagonal(&[0.5, 0.0]), &Operator::diagonal(&[1.0, 0.2])).unwrap());
        assert!(!psd_leq(&Operator::diagonal(&[1.0, 0.0]), &Operator::diagonal(&[0.5, 1.0])).unwrap());
    }

    #[test]
    fn threshold_examples() {
        let n = threshold_projection(&Operator::diagonal(&[0.9, 0.3]), 0.5).unwrap();
        assert!((n.get(0, 0).re - 1.0).abs() < 1e-12 && n.get(1, 1).norm() < 1e-12);
        let z = threshold_projection(&Operator::zeros(3), 0.5).unwrap();
        assert!(z.trace().abs() < 1e-12);
        assert!(matches!(
            threshold_projection(&Operator::diagonal(&[1.0, -0.5]), 0.5),
            Err(Error::NotPsd { .. })
        ));
        assert!(matches!(
            threshold_projection(&Operator::zeros(2), 0.0),
            Err(Error::InvalidThreshold(_))
        ));
        let tie = threshold_projection(&Operator::diagonal(&[0.5, 0.2]), 0.5).unwrap();
        assert!((tie.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn threshold_trace_bound_on_random_psd() {
        let mut rng = random::rng(11);
        for _ in 0..50 {
            let dim = rng.gen_range(2..=12);
            let rank = rng.gen_range(1..=dim);
            let o = random::random_psd(&mut rng, dim, rank, 3.0);
            let n = threshold_projection(&o, 0.5).unwrap();
            assert_eq!(n.flags().projection, Flag::Yes);
            assert!(n.trace() <= 2.0 * o.trace() + 1e-9);
        }
    }

    #[test]
    fn capacity_examples() {
        let p = Operator::projector(&ket("0"));
        let r = capacity_check(&p, &[ket("0")]).unwrap();
        assert_eq!((r.count, r.rank, r.bound_holds), (1, 1, true));

        // 2m orthonormal vectors each sitting exactly on the threshold.
        let m = 2usize;
        let dim = 8;
        let thr = 1.0 - 1.0 / (4.0 * m as f64);
        let (a, b) = (thr.sqrt(), (1.0 - thr).sqrt());
        let mut family = Vec::new();
        for i in 0..2 * m {
            let mut v = DVector::<Complex64>::zeros(dim);
            v[i] = Complex64::new(a, 0.0);
            v[i + 2 * m] = Complex64::new(b, 0.0);
            family.push(PureState::new(v).unwrap());
        }
        let basis: Vec<_> = (0..2 * m).map(|i| PureState::basis(dim, i)).collect();
        let p4 = Operator::projector_onto(dim, &basis).unwrap();
        let r = capacity_check(&p4, &family).unwrap();
        assert_eq!(r.rank, 4);
        let p2 = Operator::projector_onto(dim, &basis[..m]).unwrap();
        let r2 = capacity_check(&p2, &family).unwrap();
        assert_eq!(r2.count, 0);
        assert!(r2.bound_holds);
    }

    #[test]
    fn capacity_rejects_bad_inputs() {
        let half = Operator::diagonal(&[0.5, 0.5]);
        assert!(matches!(
            capacity_check(&half, &[ket("0")]),
            Err(Error::NotProjection { .. })
        ));
        let p = Operator::identity(2);
        assert!(matches!(
            capacity_check(&p, &[ket("0"), ket("0")]),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn null_space_examples() {
        let n = null_space(&Operator::diagonal(&[0.0, 1.0]), 1e-9).unwrap();
        assert_eq!(n.len(), 1);
        assert!((n[0].coeffs()[0].norm() - 1.0).abs() < 1e-12);
        assert_eq!(null_space(&Operator::zeros(5), 1e-9).unwrap().len(), 5);
        let mut rng = random::rng(3);
        let (p, _) = random::random_projection(&mut rng, 10, 4);
        let ns = null_space(&p, 1e-9).unwrap();
        assert_eq!(ns.len(), 6);
        for v in &ns {
            let pv = p.matrix() * v.coeffs();
            assert!(pv.norm() < 1e-9);
        }
        check_orthonormal(&ns, 1e-9).unwrap();
    }

    #[test]
    fn exact_rational_spectra_match_float() {
        use num_rational::BigRational;
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let a = Operator::exact_diagonal(&[q(1, 3), q(1, 6), q(1, 2)]);
        let b = Operator::exact_diagonal(&[q(1, 2), q(1, 2), q(0, 1)]);
        let fa = Operator::diagonal(&[1.0 / 3.0, 1.0 / 6.0, 0.5]);
        let fb = Operator::diagonal(&[0.5, 0.5, 0.0]);
        assert!((trace_distance(&a, &b).unwrap() - trace_distance(&fa, &fb).unwrap()).abs() < 1e-12);
        // Exact value: (1/6 + 1/3 + 1/2) / 2 = 1/2.
        assert!((trace_distance(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(psd_leq(&a, &b).unwrap(), psd_leq(&fa, &fb).unwrap());
        // Permutation conjugation keeps the spectrum rational.
        let mut perm = vec![crate::exact::ExactComplex::zero(); 9];
        for (r, c) in [(0, 2), (1, 0), (2, 1)] {
            perm[r * 3 + c] = crate::exact::ExactComplex::one();
        }
        let pm = Operator::from_exact(3, perm).unwrap();
        let pa = pm.mul(&a).unwrap().mul(&pm.adjoint()).unwrap();
        assert!(pa.exact().is_some());
        let t_exact = threshold_projection(&pa, 0.3).unwrap();
        assert!((t_exact.trace() - 2.0).abs() < 1e-12);
        assert!(!pa.exact_trace().unwrap().re().is_zero());
    }

    fn arb_density(max_dim: usize) -> impl Strategy<Value = (u64, usize)> {
        (any::<u64>(), 2..=max_dim)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn triangle_inequality((seed, dim) in arb_density(8)) {
            let mut rng = random::rng(seed);
            let a = random::random_density(&mut rng, dim, dim);
            let b = random::random_density(&mut rng, dim, 1);
            let c = random::random_density(&mut rng, dim, 2.min(dim));
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + EPS_NUM);
            prop_assert!((0.0..=1.0 + EPS_NUM).contains(&ab));
        }

        #[test]
        fn fidelity_dominates_one_minus_distance((seed, dim) in arb_density(8)) {
            let mut rng = random::rng(seed);
            let rho = random::random_density(&mut rng, dim, dim);
            let psi = random::random_pure(&mut rng, dim);
            let d = trace_distance(&rho, &Operator::projector(&psi)).unwrap();
            let f = fidelity_pure(&psi, &rho).unwrap();
            prop_assert!(1.0 - d <= f + EPS_NUM);
        }

        #[test]
        fn psd_order_is_monotone_under_trace((seed, dim) in arb_density(6)) {
            let mut rng = random::rng(seed);
            let a = random::random_psd(&mut rng, dim, dim, 1.0);
            let extra = random::random_psd(&mut rng, dim, 1, 1.0);
            let b = a.add(&extra).unwrap();
            prop_assert!(psd_leq(&a, &b).unwrap());
            let c = random::random_psd(&mut rng, dim, dim, 1.0);
            let tac = a.mul(&c).unwrap().matrix().trace().re;
            let tbc = b.mul(&c).unwrap().matrix().trace().re;
            prop_assert!(tac <= tbc + EPS_NUM);
        }

        #[test]
        fn capacity_never_violated(seed in any::<u64>(), m in 1usize..=4, extra in 0usize..=8) {
            let mut rng = random::rng(seed);
            let dim = 2 * m + extra + 1;
            let (p, basis) = random::random_projection(&mut rng, dim, m);
            let family = random::perturbed_family(&mut rng, &basis, dim, 2 * m + 1, 0.05);
            let r = capacity_check(&p, &family).unwrap();
            prop_assert!(r.bound_holds);
        }
    }
}
