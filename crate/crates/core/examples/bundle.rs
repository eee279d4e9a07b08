//! Run the whole pipeline in-process and print the report archive summary.

use qtmlab::cli::{bundle_archive, RunConfig};

fn main() -> qtmlab::Result<()> {
    let cfg = RunConfig {
        levels: 2,
        t_max: 16,
        samples: 4,
        steps: 100,
        k_max: 4,
        l_max: 12,
        decoder_k: vec![1, 2],
        dict: "basic".into(),
        ..RunConfig::default()
    };
    let (archive, checks) = bundle_archive(&cfg)?;
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    println!(
        "{} lines, {} checks, {} failed",
        archive.lines().count(),
        checks.len(),
        failed.len()
    );
    for c in failed {
        println!("{}", c.line());
    }
    Ok(())
}
