//! Seeded random states and operators for experiments and tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::operator::Operator;
use super::state::PureState;

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector(rng: &mut impl Rng, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| gaussian(rng))
}

/// Haar-distributed pure state.
pub fn random_pure(rng: &mut impl Rng, dim: usize) -> PureState {
    loop {
        if let Ok(s) = PureState::normalized(gaussian_vector(rng, dim)) {
            return s;
        }
    }
}

/// Random positive weights summing to one.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Density matrix of the given rank (rank clipped to `dim`).
pub fn random_density(rng: &mut impl Rng, dim: usize, rank: usize) -> Operator {
    let rank = rank.clamp(1, dim);
    let weights = random_weights(rng, rank);
    let terms: Vec<(f64, PureState)> = weights.into_iter().map(|w| (w, random_pure(rng, dim))).collect();
    Operator::mixture(dim, &terms).expect("dimensions agree")
}

/// PSD operator with trace `scale`.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize, scale: f64) -> Operator {
    random_density(rng, dim, rank).scale(scale)
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    unitary_factor(g)
}

fn unitary_factor(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let qr = m.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Random rank-`rank` projection and an orthonormal basis of its range.
pub fn random_projection(rng: &mut impl Rng, dim: usize, rank: usize) -> (Operator, Vec<PureState>) {
    let u = random_unitary(rng, dim);
    let basis: Vec<PureState> = (0..rank)
        .map(|c| PureState::normalized(u.column(c).into_owned()).expect("unit column"))
        .collect();
    let p = Operator::projector_onto(dim, &basis).expect("dimensions agree");
    (p, basis)
}

/// Orthonormal family of `count` vectors obtained by completing `anchor` to a
/// basis and rotating it by a unitary within `noise` of the identity.
pub fn perturbed_family(
    rng: &mut impl Rng,
    anchor: &[PureState],
    dim: usize,
    count: usize,
    noise: f64,
) -> Vec<PureState> {
    let mut cols = DMatrix::<Complex64>::zeros(dim, dim);
    for (c, a) in anchor.iter().enumerate().take(dim) {
        cols.set_column(c, a.coeffs());
    }
    for c in anchor.len()..dim {
        cols.set_column(c, &gaussian_vector(rng, dim));
    }
    let frame = unitary_factor(cols);
    let near_id = DMatrix::<Complex64>::identity(dim, dim)
        + DMatrix::from_fn(dim, dim, |_, _| gaussian(rng)).scale(noise);
    let w = unitary_factor(near_id);
    let rotated = frame * w;
    (0..count.min(dim))
        .map(|c| PureState::normalized(rotated.column(c).into_owned()).expect("unit column"))
        .collect()
}

/// Random unit vector in the span of an orthonormal family.
pub fn random_in_span(rng: &mut impl Rng, basis: &[PureState]) -> PureState {
    let dim = basis[0].dim();
    loop {
        let mut v = DVector::<Complex64>::zeros(dim);
        for b in basis {
            v += b.coeffs() * gaussian(rng);
        }
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Random density operator supported in the span of `basis`, as an explicit
/// ensemble with between one and `basis.len()` members.
pub fn random_ensemble_in_span(rng: &mut impl Rng, basis: &[PureState]) -> Vec<(f64, PureState)> {
    let n = rng.gen_range(1..=basis.len());
    random_weights(rng, n)
        .into_iter()
        .map(|w| (w, random_in_span(rng, basis)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a = random_pure(&mut rng(5), 4);
        let b = random_pure(&mut rng(5), 4);
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(&mut rng(1), 6);
        let d = &u * u.adjoint() - DMatrix::<Complex64>::identity(6, 6);
        assert!(d.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn perturbed_family_is_orthonormal_and_close() {
        let mut r = rng(2);
        let (p, basis) = random_projection(&mut r, 10, 3);
        let fam = perturbed_family(&mut r, &basis, 10, 6, 0.01);
        crate::opalg::spectral::check_orthonormal(&fam, 1e-9).unwrap();
        for e in &fam[..3] {
            assert!(p.expectation(e).unwrap().re > 0.99);
        }
    }
}
