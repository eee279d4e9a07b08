//! Build the declared mixture nu from lower-computation streams, check
//! domination and compare its diagonal with m(x).

use qtmlab::algprob::{build_nu, diagonal_vs_m, ToyUniversalMixture};
use qtmlab::complexity::toy_m;
use qtmlab::corpus;

fn main() -> qtmlab::Result<()> {
    let mix = ToyUniversalMixture::parse(corpus::MIX)?;
    let nu = build_nu(&mix, 100)?;
    println!(
        "Tr nu = {:.6}, domination {:?}",
        nu.diagonal_sum(),
        nu.domination()?
    );
    let d = diagonal_vs_m(&mix, 100, toy_m)?;
    println!(
        "c1 = {} (at {:?}), c2 = {} (at {:?})",
        d.c1, d.c1_witness, d.c2, d.c2_witness
    );
    Ok(())
}
