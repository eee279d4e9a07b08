//! Plain complexity on a classical reference machine against BvL complexity
//! on a quantum one, over every string of length at most 4.

use qtmlab::complexity::{
    decoder_cross_check, mueller_gap, parse_corpus, BvlSearch, Dictionary, ReferenceMachine,
};
use qtmlab::corpus;
use qtmlab::machine::ConfigSpace;

fn main() -> qtmlab::Result<()> {
    let rm = ReferenceMachine::parse(corpus::RM)?;
    let cs = ConfigSpace::from_machine(corpus::machine("hadamard")?)?;
    let search = BvlSearch::new(&cs, Dictionary::basic(4), 4)?;
    let strings = parse_corpus(corpus::CORPUS4)?;
    let gap = mueller_gap(&strings, &rm, &search, 12)?;
    print!("{}", gap.to_text());
    let dec = decoder_cross_check(&cs, &rm, &[1, 2, 3], 16, 12)?;
    println!(
        "decoder overhead c_dec = {} over {} decoded strings",
        dec.c_dec,
        dec.entries.len()
    );
    Ok(())
}
