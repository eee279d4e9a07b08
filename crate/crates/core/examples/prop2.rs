//! Calibrate c' in "a < b + c implies a + K(a) < b + K(b) + c'" on the toy
//! prefix machine.

use qtmlab::complexity::{c_prime_form, calibrate, prop2_check, sample_grid};

fn main() {
    let cal = calibrate(64, 8);
    print!("{}", cal.to_text());
    let out = prop2_check(&sample_grid(64, 8), |c| c_prime_form(c, cal.constant));
    println!(
        "c' = c + 2 bitlen(c) {:+}: holds on {} samples: {}",
        cal.constant,
        out.checked,
        out.holds()
    );
    println!(
        "single constant for 2 bitlen(c) + const: {}",
        cal.log_only_constant_is_uniform()
    );
}
