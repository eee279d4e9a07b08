//! Run a machine on a superposed input, watch the final-state weight and read
//! out the indeterminate-length output.

use num_complex::Complex64;
use qtmlab::corpus;
use qtmlab::machine::{embed_vector, evolve, extract_output, final_weight, halting_profile, ConfigSpace};
use qtmlab::opalg::LowRank;
use qtmlab::tolerances::ETA_HALT;

fn main() -> qtmlab::Result<()> {
    let cs = ConfigSpace::from_machine(corpus::machine("copy1")?)?;
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    // (|01> + |10>)/sqrt 2 on two qubits.
    let input = [Complex64::default(), h, h, Complex64::default()];
    let mut rho = LowRank::pure(embed_vector(&cs, &input)?);
    let prof = halting_profile(&cs, &rho, 16, ETA_HALT)?;
    println!("halting: {:?} at {:?}", prof.diagnostic, prof.time);
    for t in 1..=prof.time.unwrap_or(0) {
        rho = evolve(&cs, &rho, 1)?;
        println!(
            "t = {t}: final weight {:.3}",
            final_weight(cs.machine(), &rho) + 0.0
        );
    }
    let out = extract_output(&cs, &rho, cs.window())?;
    for y in ["011", "101"] {
        println!("<{y}|out|{y}> = {:.3}", out.weight_of(y)?);
    }
    Ok(())
}
