//! Enumerate the halting projections P_t and check that they are mutually
//! orthogonal with total trace at most 2^k.

use qtmlab::corpus;
use qtmlab::halting::{enumerate_projections, orthogonality_defect, trace_sum};
use qtmlab::machine::ConfigSpace;

fn main() -> qtmlab::Result<()> {
    for name in ["scan1", "branch1", "hadamard"] {
        let cs = ConfigSpace::from_machine(corpus::machine(name)?)?;
        for k in 1..=3 {
            let ps = enumerate_projections(&cs, k, 16)?;
            let ranks: Vec<String> = ps.iter().map(|h| format!("t{}:{}", h.t, h.rank)).collect();
            println!(
                "{name:<8} k {k}: {} | max Tr PiPj {:.1e} | sum Tr {:.3} <= {}",
                ranks.join(" "),
                orthogonality_defect(&ps)?,
                trace_sum(&ps),
                1 << k
            );
        }
    }
    Ok(())
}
