//! Threshold-and-count decoder: channel images of the halting projections
//! are cut into length blocks, thresholded at 1/2, and the computational
//! basis strings that score near one are listed in a fixed order.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::channel::ApproxChannel;
use crate::error::{Error, Result};
use crate::halting::enumerate_projections;
use crate::machine::{ConfigSpace, IndeterminateState};
use crate::opalg::{capacity_check_within, index_to_bits, threshold_projection, Flag, Operator, PureState};
use crate::tolerances::{EPS_NUM, THETA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionParam {
    pub k: usize,
    pub j: u64,
}

impl PrecisionParam {
    /// j = 2^(k+5)
    pub fn new(k: usize) -> Result<Self> {
        if k + 5 >= 63 {
            return Err(Error::OutOfRange(format!("program length {k} is too large")));
        }
        Ok(Self { k, j: 1 << (k + 5) })
    }

    pub fn delta(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.j))
    }

    /// 1 - 2^(-k-3) = 1 - 4/j
    pub fn score_threshold(&self) -> f64 {
        1.0 - 4.0 / self.j as f64
    }
}

/// How the precision parameter reaches the machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxMode {
    /// Written in binary on the auxiliary tape.
    Tape(String),
    /// Single-tape machine: j is a fixed parameter of the definition.
    Parameter,
}

impl AuxMode {
    pub fn describe(&self) -> String {
        match self {
            AuxMode::Tape(bits) => format!("aux-tape {bits}"),
            AuxMode::Parameter => "machine-parameter".into(),
        }
    }
}

/// Configuration space carrying j for the decoder runs.
pub fn with_precision(cs: &ConfigSpace, prec: &PrecisionParam) -> (ConfigSpace, AuxMode) {
    if cs.machine().aux_tape().is_some() {
        let bits = format!("{:b}", prec.j);
        (cs.clone().with_aux(bits.clone()), AuxMode::Tape(bits))
    } else {
        (cs.clone(), AuxMode::Parameter)
    }
}

#[derive(Clone, Debug)]
pub struct BuiltO {
    pub t: usize,
    pub rank: usize,
    pub o: IndeterminateState,
}

/// O_t = Psi^{t,1/j}(P_t) for every nonzero halting projection up to t_max.
pub fn build_o(cs: &ConfigSpace, k: usize, prec: &PrecisionParam, t_max: usize) -> Result<Vec<BuiltO>> {
    let (cs, _) = with_precision(cs, prec);
    let ps = enumerate_projections(&cs, k, t_max)?;
    let out = ps
        .into_par_iter()
        .map(|h| {
            let (t, rank, p) = (h.t, h.rank, h.p.clone());
            let ch = ApproxChannel::from_projection(&cs, h, prec.delta())?;
            Ok(BuiltO {
                t,
                rank,
                o: ch.apply(&p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = out.iter().map(|b| b.o.trace()).sum();
    if total > (1u64 << k) as f64 + EPS_NUM {
        return Err(Error::BoundViolation(format!(
            "sum of Tr O_t = {total} exceeds 2^{k}"
        )));
    }
    Ok(out)
}

/// The Q_ell diagonal block.
pub fn restrict_length(o: &IndeterminateState, ell: usize) -> Result<Operator> {
    o.block(ell)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageRow {
    pub t: usize,
    pub ell: usize,
    pub y: String,
    pub score: f64,
}

#[derive(Clone, Debug)]
pub struct CoverageTable {
    pub k: usize,
    pub j: u64,
    pub window: usize,
    pub ell_max: usize,
    pub aux: AuxMode,
    pub rows: Vec<CoverageRow>,
    pub bound_2k1: usize,
    /// Sum over t of Tr O_t.
    pub trace_o: f64,
    /// Sum over t and ell of Tr N^ell_t.
    pub trace_n: f64,
    /// Largest eigenvalue over all O^ell_t blocks.
    pub max_eigenvalue: f64,
}

impl CoverageTable {
    pub fn within_bound(&self) -> bool {
        self.rows.len() <= self.bound_2k1
    }

    /// Line-oriented record form.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "coverage k {} j {} window {} ell_max {} aux {} order t,ell,y\n",
            self.k,
            self.j,
            self.window,
            self.ell_max,
            self.aux.describe()
        );
        for r in &self.rows {
            let y = if r.y.is_empty() { "-" } else { r.y.as_str() };
            s.push_str(&format!("row {} {} {} {:.12}\n", r.t, r.ell, y, r.score));
        }
        s
    }
}

pub fn coverage_table(
    cs: &ConfigSpace,
    k: usize,
    t_max: usize,
    ell_max: Option<usize>,
) -> Result<CoverageTable> {
    let prec = PrecisionParam::new(k)?;
    let ell_max = ell_max.unwrap_or(cs.window()).min(cs.window());
    let (_, aux) = with_precision(cs, &prec);
    let built = build_o(cs, k, &prec, t_max)?;
    let threshold = prec.score_threshold();
    let mut rows = Vec::new();
    let (mut trace_n, mut max_eigenvalue) = (0.0, 0.0f64);
    for b in &built {
        let per_ell = (0..=ell_max)
            .into_par_iter()
            .map(|ell| {
                let o = restrict_length(&b.o, ell)?;
                let top = crate::opalg::eigh(&o)?.values.last().copied().unwrap_or(0.0);
                let n = threshold_projection(&o, THETA)?;
                let found: Vec<CoverageRow> = (0..1usize << ell)
                    .filter_map(|i| {
                        let score = n.get(i, i).re;
                        (score >= threshold).then(|| CoverageRow {
                            t: b.t,
                            ell,
                            y: index_to_bits(i, ell),
                            score,
                        })
                    })
                    .collect();
                Ok((found, n.trace(), top))
            })
            .collect::<Result<Vec<_>>>()?;
        for (found, tr, top) in per_ell {
            rows.extend(found);
            trace_n += tr;
            max_eigenvalue = max_eigenvalue.max(top);
        }
    }
    Ok(CoverageTable {
        k,
        j: prec.j,
        window: cs.window(),
        ell_max,
        aux,
        rows,
        bound_2k1: 1 << (k + 1),
        trace_o: built.iter().map(|b| b.o.trace()).sum(),
        trace_n,
        max_eigenvalue,
    })
}

/// The y of the b-th row (1-based).
pub fn decode_from(table: &CoverageTable, b: usize) -> Result<String> {
    if b == 0 || b > table.rows.len() || b > table.bound_2k1 {
        return Err(Error::OutOfRange(format!(
            "index b={b} (table has {} rows, at most {})",
            table.rows.len(),
            table.bound_2k1
        )));
    }
    Ok(table.rows[b - 1].y.clone())
}

pub fn decode(cs: &ConfigSpace, k: usize, b: usize, t_max: usize) -> Result<String> {
    decode_from(&coverage_table(cs, k, t_max, None)?, b)
}

/// Every b decoding to `y`.
pub fn encode(table: &CoverageTable, y: &str) -> Vec<usize> {
    table
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.y == y)
        .map(|(i, _)| i + 1)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NearOneCount {
    pub count: usize,
    pub bound: f64,
    /// Count reported by the capacity predicate on the computational basis.
    pub capacity_count: usize,
    pub holds: bool,
}

/// Counts basis strings with <y|N|y> >= 1 - 2^(-k-3) and checks the count
/// against 2 Tr N.
pub fn near_one_count_check(n: &Operator, k: usize) -> Result<NearOneCount> {
    let defect = n
        .mul(n)?
        .sub(n)?
        .matrix()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if n.flags().projection != Flag::Yes && defect > EPS_NUM {
        return Err(Error::NotProjection { defect });
    }
    let threshold = PrecisionParam::new(k)?.score_threshold();
    let d = n.dim();
    let count = (0..d).filter(|&i| n.get(i, i).re >= threshold).count();
    let basis: Vec<PureState> = (0..d).map(|i| PureState::basis(d, i)).collect();
    let capacity = capacity_check_within(n, &basis, EPS_NUM)?;
    let bound = 2.0 * n.trace();
    Ok(NearOneCount {
        count,
        bound,
        capacity_count: capacity.count,
        holds: (count as f64) <= bound + EPS_NUM && capacity.bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::machine::{embed_ensemble, evolve, extract_output, halting_profile};
    use crate::opalg::{psd_leq, random, trace_distance};
    use crate::tolerances::ETA_HALT;
    use nalgebra::DVector;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn cs(name: &str) -> ConfigSpace {
        ConfigSpace::new(corpus::machine(name).unwrap(), 6).unwrap()
    }

    #[test]
    fn precision_parameter() {
        let p = PrecisionParam::new(2).unwrap();
        assert_eq!(p.j, 128);
        assert_eq!(p.score_threshold(), 1.0 - 1.0 / 32.0);
        assert_eq!(p.delta(), BigRational::new(1.into(), 128.into()));
    }

    #[test]
    fn identity_o_and_table() {
        let space = cs("identity");
        let prec = PrecisionParam::new(1).unwrap();
        let os = build_o(&space, 1, &prec, 16).unwrap();
        assert_eq!(os.len(), 1);
        assert!((os[0].o.trace() - 2.0).abs() < 1e-12);
        let table = coverage_table(&space, 1, 16, None).unwrap();
        let rows: Vec<_> = table.rows.iter().map(|r| (r.t, r.ell, r.y.as_str())).collect();
        assert_eq!(rows, vec![(1, 1, "0"), (1, 1, "1")]);
        assert!(table.rows.iter().all(|r| (r.score - 1.0).abs() < 1e-12));
        assert_eq!(decode_from(&table, 1).unwrap(), "0");
        assert_eq!(decode_from(&table, 2).unwrap(), "1");
        assert!(decode_from(&table, 3).is_err());
        assert!(decode_from(&table, 0).is_err());
        assert_eq!(table.aux, AuxMode::Parameter);
    }

    #[test]
    fn loop_is_empty() {
        let space = cs("loop");
        assert!(build_o(&space, 2, &PrecisionParam::new(2).unwrap(), 16)
            .unwrap()
            .is_empty());
        assert!(coverage_table(&space, 2, 16, None).unwrap().rows.is_empty());
    }

    #[test]
    fn restriction_blocks() {
        let mut rng = random::rng(3);
        let op = random::random_psd(&mut rng, 15, 4, 1.0);
        let o = IndeterminateState::new(3, op).unwrap();
        for ell in 0..=3 {
            let b = restrict_length(&o, ell).unwrap();
            assert_eq!(b.dim(), 1 << ell);
            assert!(b.trace() <= o.trace() + 1e-12);
        }
        assert!(restrict_length(&o, 4).is_err());
        let c = IndeterminateState::classical("10", 3).unwrap();
        assert_eq!(restrict_length(&c, 1).unwrap().trace(), 0.0);
        assert_eq!(restrict_length(&c, 2).unwrap().get(2, 2).re, 1.0);
    }

    /// Output of each classical program of length k that halts with a single
    /// classical output string.
    fn classical_outputs(space: &ConfigSpace, k: usize) -> Vec<(String, usize, String)> {
        let mut out = Vec::new();
        for i in 0..1usize << k {
            let x = index_to_bits(i, k);
            let rho = embed_ensemble(space, &[(1.0, PureState::from_bits(&x).unwrap())]).unwrap();
            if let Some(t) = halting_profile(space, &rho, 16, ETA_HALT).unwrap().time {
                let o = extract_output(space, &evolve(space, &rho, t).unwrap(), space.window()).unwrap();
                let d = o.operator().dim();
                if let Some(y) = (0..d).find(|&r| o.operator().get(r, r).re > 1.0 - 1e-9) {
                    let ell = (0..=space.window()).rev().find(|&l| y >= (1 << l) - 1).unwrap();
                    out.push((x, t, index_to_bits(y + 1 - (1 << ell), ell)));
                }
            }
        }
        out
    }

    #[test]
    fn copy1_table_matches_brute_force() {
        let space = cs("copy1");
        let table = coverage_table(&space, 2, 16, None).unwrap();
        assert!(table.rows.len() <= 8);
        let mut expected: Vec<_> = classical_outputs(&space, 2)
            .into_iter()
            .map(|(_, t, y)| (t, y.len(), y))
            .collect();
        expected.sort();
        let got: Vec<_> = table.rows.iter().map(|r| (r.t, r.ell, r.y.clone())).collect();
        assert_eq!(got, expected);
        for r in &table.rows {
            assert_eq!(decode_from(&table, encode(&table, &r.y)[0]).unwrap(), r.y);
        }
    }

    #[test]
    fn soundness_completeness_and_fidelity_chain() {
        for name in ["identity", "copy1", "scan1", "branch1", "hadamard", "rot35"] {
            let space = cs(name);
            for k in 1..=2 {
                let prec = PrecisionParam::new(k).unwrap();
                let j = prec.j as f64;
                let table = coverage_table(&space, k, 16, None).unwrap();
                assert!(table.within_bound(), "{name} k={k}");
                for (_, _, y) in classical_outputs(&space, k) {
                    assert!(!encode(&table, &y).is_empty(), "{name} k={k} misses {y}");
                }
                let ps = enumerate_projections(&space, k, 16).unwrap();
                let d = 1 << k;
                let mut programs: Vec<PureState> = (0..d).map(|i| PureState::basis(d, i)).collect();
                for a in 0..d {
                    for b in a + 1..d {
                        for s in [1.0, -1.0] {
                            let mut v = DVector::zeros(d);
                            v[a] = Complex64::new(1.0, 0.0);
                            v[b] = Complex64::new(s, 0.0);
                            programs.push(PureState::normalized(v).unwrap());
                        }
                    }
                }
                for row in &table.rows {
                    let target = IndeterminateState::classical(&row.y, space.window()).unwrap();
                    let h = ps.iter().find(|h| h.t == row.t).unwrap();
                    let ch = ApproxChannel::from_projection(&space, h.clone(), prec.delta()).unwrap();
                    let o_ell = restrict_length(&ch.apply(&h.p).unwrap(), row.ell).unwrap();
                    let idx = crate::opalg::bits_to_index(&row.y).unwrap();
                    let mut candidates = programs.clone();
                    candidates.push(best_program(&ch, h, &row.y));
                    let witness = candidates.iter().find_map(|psi| {
                        let sigma = Operator::projector(psi);
                        if !psd_leq(&sigma, &h.p).unwrap() {
                            return None;
                        }
                        let exact = ch.exact_output(&sigma).unwrap();
                        let dist = trace_distance(exact.operator(), target.operator()).unwrap();
                        (dist < 2.0 / j).then(|| ch.apply(&sigma).unwrap())
                    });
                    let xi = witness.unwrap_or_else(|| panic!("{name} k={k}: no witness for {}", row.y));
                    let f = xi.weight_of(&row.y).unwrap();
                    assert!(1.0 - 2.0 / j < f, "{name}");
                    assert!(f <= o_ell.get(idx, idx).re + 1e-12, "{name}");
                    if o_ell.get(idx, idx).re >= 1.0 - 2.0 / j {
                        assert!(row.score >= 1.0 - 4.0 / j);
                    }
                }
            }
        }
    }

    /// Pure input in the range of `h` maximizing <y|exact output|y>: the top
    /// eigenvector of the Hermitian form recovered by polarization.
    fn best_program(ch: &ApproxChannel, h: &crate::halting::HaltingProjection, y: &str) -> PureState {
        let f = |v: DVector<Complex64>| {
            let sigma = Operator::new(&v * v.adjoint()).unwrap();
            ch.exact_output(&sigma).unwrap().weight_of(y).unwrap()
        };
        let b: Vec<DVector<Complex64>> = h.basis.iter().map(|s| s.coeffs().clone()).collect();
        let r = b.len();
        let diag: Vec<f64> = b.iter().map(|v| f(v.clone())).collect();
        let mut form = nalgebra::DMatrix::<Complex64>::zeros(r, r);
        for a in 0..r {
            form[(a, a)] = Complex64::new(diag[a], 0.0);
            for c in a + 1..r {
                let re = (f(&b[a] + &b[c]) - diag[a] - diag[c]) / 2.0;
                let im = -(f(&b[a] + &b[c] * Complex64::new(0.0, 1.0)) - diag[a] - diag[c]) / 2.0;
                form[(a, c)] = Complex64::new(re, im);
                form[(c, a)] = Complex64::new(re, -im);
            }
        }
        let e = crate::opalg::eigh_matrix(&form);
        let top = e.vector(r - 1);
        let v = b
            .iter()
            .enumerate()
            .fold(DVector::zeros(b[0].len()), |acc, (a, v)| acc + v * top[a]);
        PureState::normalized(v).unwrap()
    }

    #[test]
    fn near_one_examples() {
        let id = near_one_count_check(&Operator::identity(4), 2).unwrap();
        assert_eq!((id.count, id.bound), (4, 8.0));
        assert!(id.holds);
        let zero = near_one_count_check(&Operator::zeros(4), 2).unwrap();
        assert_eq!(zero.count, 0);
        assert!(near_one_count_check(&Operator::diagonal(&[0.5, 1.0]), 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn near_one_bound_on_random_projections(seed in any::<u64>(), lg in 1usize..=5, k in 0usize..=3) {
            let mut rng = random::rng(seed);
            let dim = 1 << lg;
            let m = (seed as usize % dim) + 1;
            let (p, _) = random::random_projection(&mut rng, dim, m);
            let r = near_one_count_check(&p, k).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.count as f64 <= 2.0 * m as f64);
        }
    }
}
