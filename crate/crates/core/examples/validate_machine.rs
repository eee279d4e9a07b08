//! Parse the shipped machines and check that their evolution is unitary.

use qtmlab::corpus;
use qtmlab::machine::{exact_wellformed_check, wellformed_check, ConfigSpace};

fn main() -> qtmlab::Result<()> {
    for def in corpus::all_machines() {
        let exact = def.is_exact();
        let cs = ConfigSpace::from_machine(def)?;
        let wf = wellformed_check(&cs)?;
        let exact_ok = if exact {
            Some(exact_wellformed_check(&cs)?)
        } else {
            None
        };
        println!(
            "{:<9} dim {:>5} completion {:<7} |uu* - I| = {:.1e} exact check {:?}",
            cs.machine().name,
            wf.dim,
            wf.completion.name(),
            wf.unitary_defect,
            exact_ok
        );
    }
    Ok(())
}
