use num_rational::BigRational;
use proptest::prelude::*;

use qtmlab::channel::ApproxChannel;
use qtmlab::corpus;
use qtmlab::decoder::{coverage_table, decode_from, encode};
use qtmlab::halting::{dominating_projection, enumerate_projections};
use qtmlab::machine::{embed_input, halting_profile, ConfigSpace, HaltDiagnostic};
use qtmlab::opalg::{random, Operator};
use qtmlab::tolerances::{EPS_NUM, ETA_HALT};

const HALTING: [&str; 6] = ["identity", "copy1", "scan1", "branch1", "hadamard", "rot35"];

fn space(name: &str) -> ConfigSpace {
    ConfigSpace::from_machine(corpus::machine(name).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn states_in_a_halting_subspace_halt_at_its_time(
        m in 0..HALTING.len(), k in 1usize..=3, pick in 0usize..8, seed in any::<u64>()
    ) {
        let cs = space(HALTING[m]);
        let ps = enumerate_projections(&cs, k, 16).unwrap();
        let p = &ps[pick % ps.len()];
        let mut rng = random::rng(seed);
        let sigma = Operator::projector(&random::random_in_span(&mut rng, &p.basis));
        let prof = halting_profile(&cs, &embed_input(&cs, &sigma).unwrap(), 16, ETA_HALT).unwrap();
        prop_assert_eq!(prof.diagnostic, HaltDiagnostic::Halted);
        prop_assert_eq!(prof.time, Some(p.t));
        let found = dominating_projection(&ps, &sigma).unwrap().map(|h| h.t);
        prop_assert_eq!(found, Some(p.t));
    }

    #[test]
    fn channel_outputs_are_semi_densities(
        m in 0..HALTING.len(), k in 1usize..=2, t in 1usize..=6, den in 2u32..=6, seed in any::<u64>()
    ) {
        let cs = space(HALTING[m]);
        let delta = BigRational::new(1.into(), (1u64 << den).into());
        let ch = ApproxChannel::new(&cs, k, t, delta).unwrap();
        let mut rng = random::rng(seed);
        let sigma = random::random_density(&mut rng, 1 << k, 1 + (seed as usize % (1 << k)));
        let out = ch.apply(&sigma).unwrap();
        prop_assert!(out.trace() <= 1.0 + EPS_NUM);
        prop_assert!(out.operator().hermitian_defect() <= EPS_NUM);
        let d = ch.error_certificate_any(&sigma).unwrap();
        prop_assert!(d <= ch.gamma_f64() * t as f64 + EPS_NUM);
    }

    #[test]
    fn decoding_inverts_encoding(m in 0..HALTING.len(), k in 1usize..=3) {
        let table = coverage_table(&space(HALTING[m]), k, 16, None).unwrap();
        prop_assert!(table.rows.len() <= 1 << (k + 1));
        for b in 1..=table.rows.len() {
            let y = decode_from(&table, b).unwrap();
            prop_assert!(encode(&table, &y).contains(&b));
        }
        prop_assert!(decode_from(&table, table.rows.len() + 1).is_err());
    }
}
