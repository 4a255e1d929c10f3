#![no_main]

use libfuzzer_sys::fuzz_target;
use signorini_core::poly::text::{parse_poly, parse_poly_infer, write_poly};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_poly(text, 3);
    if let Ok(p) = parse_poly_infer(text) {
        // written form is canonical
        let back = parse_poly(&write_poly(&p), p.nvars()).expect("written polynomial reparses");
        assert_eq!(back, p);
    }
});
