#![no_main]

use libfuzzer_sys::fuzz_target;
use teissier::poly::parse_univariate;
use teissier::ring::Field;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_univariate(text, &Field::prime(2).unwrap());
    let _ = parse_univariate(text, &Field::prime(5).unwrap());
});
