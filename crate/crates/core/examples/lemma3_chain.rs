//! The six links from the halting-projection operator nu to the prefix
//! complexity bound, at eps = 1/3.

use qtmlab::complexity::{lemma3_chain, parse_corpus, third, BvlSearch, Dictionary, LemmaNu};
use qtmlab::corpus;
use qtmlab::machine::ConfigSpace;

fn main() -> qtmlab::Result<()> {
    let cs = ConfigSpace::from_machine(corpus::machine("hadamard")?)?;
    let search = BvlSearch::new(&cs, Dictionary::basic(4), 4)?;
    let nu = LemmaNu::build(&search, 4, third())?;
    let report = lemma3_chain(&search, &nu, &parse_corpus(corpus::CORPUS4)?)?;
    print!("{}", report.to_text());
    println!("all links hold: {}", report.holds());
    Ok(())
}
