//! Exact and float operators: trace distance, Loewner order, thresholding
//! and the projection capacity count.

use qtmlab::exact::ExactComplex;
use qtmlab::opalg::{
    capacity_check, psd_leq, random, threshold_projection, trace_distance, Operator, PureState,
};

fn main() -> qtmlab::Result<()> {
    let zero = PureState::from_exact(vec![ExactComplex::one(), ExactComplex::zero()])?;
    let plus = PureState::from_exact(vec![
        ExactComplex::from_ints(3, 5, 0, 1),
        ExactComplex::from_ints(0, 1, 4, 5),
    ])?;
    let (a, b) = (Operator::projector(&zero), Operator::projector(&plus));
    println!("D(|0>, 3/5|0> + 4i/5|1>) = {:.6}", trace_distance(&a, &b)?);
    println!("Tr exact = {}", a.exact_trace().expect("exact"));
    println!("|0><0|/2 <= |0><0|: {}", psd_leq(&a.scale(0.5), &a)?);

    let mut rng = random::rng(7);
    let o = random::random_psd(&mut rng, 8, 3, 1.0);
    let n = threshold_projection(&o, 0.5)?;
    println!(
        "eigenvalues >= 1/2 of a random PSD operator span rank {}",
        n.trace().round()
    );

    let (p, basis) = random::random_projection(&mut rng, 16, 3);
    let family = random::perturbed_family(&mut rng, &basis, 16, 10, 0.05);
    let rep = capacity_check(&p, &family)?;
    println!(
        "capacity: rank {} threshold {:.4} count {} bound holds {}",
        rep.rank, rep.threshold, rep.count, rep.bound_holds
    );
    Ok(())
}
