#![no_main]

use libfuzzer_sys::fuzz_target;
use teissier::poly::{parse_polynomial, VarContext};
use teissier::ring::Field;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let ctx = VarContext::new(3, 2);
    for field in [Field::rational(), Field::prime(3).unwrap()] {
        if let Ok(f) = parse_polynomial(text, &ctx, &field) {
            let again = parse_polynomial(&f.to_string(), &ctx, &field).expect("printed form parses");
            assert_eq!(again.to_string(), f.to_string());
        }
    }
});
