//! Threshold-and-count coverage table, decoding by index and the round trip
//! back to the index.

use qtmlab::corpus;
use qtmlab::decoder::{coverage_table, decode_from, encode};
use qtmlab::machine::ConfigSpace;

fn main() -> qtmlab::Result<()> {
    let cs = ConfigSpace::from_machine(corpus::machine("branch1")?)?;
    for k in 1..=3 {
        let table = coverage_table(&cs, k, 16, None)?;
        print!("{}", table.to_text());
        for b in 1..=table.rows.len() {
            let y = decode_from(&table, b)?;
            assert!(encode(&table, &y).contains(&b));
        }
        println!(
            "k {k}: {} rows <= {}, round trips ok",
            table.rows.len(),
            table.bound_2k1
        );
    }
    Ok(())
}
