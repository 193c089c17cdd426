#![no_main]

use libfuzzer_sys::fuzz_target;
use teissier::kappa::{compute_kappa, KappaConfig};
use teissier::poly::{parse_polynomial, weierstrass_validate, VarContext};
use teissier::ring::Field;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let config = KappaConfig { truncation: 12, ..KappaConfig::default() };
    let Ok(f) = parse_polynomial(text, &VarContext::new(2, 1), &Field::prime(2).unwrap()) else { return };
    let Ok(w) = weierstrass_validate(&f) else { return };
    let _ = compute_kappa(&w, &config);
});
