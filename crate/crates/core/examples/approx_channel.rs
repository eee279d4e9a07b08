//! Build the elementary approximation channel for a halting projection and
//! certify its output error on random inputs below P_t.

use num_bigint::BigInt;
use num_rational::BigRational;
use qtmlab::channel::ApproxChannel;
use qtmlab::corpus;
use qtmlab::machine::ConfigSpace;
use qtmlab::opalg::{random, Operator};

fn main() -> qtmlab::Result<()> {
    let cs = ConfigSpace::from_machine(corpus::machine("hadamard")?)?;
    let mut rng = random::rng(1);
    for j in [4, 8, 32] {
        let delta = BigRational::new(BigInt::from(1), BigInt::from(j));
        let ch = ApproxChannel::new(&cs, 2, 1, delta)?;
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let sigma = Operator::projector(&random::random_in_span(&mut rng, &ch.halting.basis));
            worst = worst.max(ch.error_certificate(&sigma)?);
        }
        let sweep = ch.accumulation_sweep(&Operator::projector(&ch.halting.basis[0]))?;
        println!(
            "delta 1/{j}: {} fraction bits, damping {:?}, worst D = {:.2e}, per-step bound holds {}",
            ch.rounded.bits.unwrap_or(0),
            ch.rounded.damping.as_ref().map(|d| d.to_string()),
            worst,
            sweep.iter().all(|s| s.holds())
        );
    }
    Ok(())
}
