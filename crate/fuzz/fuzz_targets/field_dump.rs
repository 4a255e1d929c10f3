#![no_main]

use libfuzzer_sys::fuzz_target;
use signorini_core::geometry::io::{field_to_string, parse_field};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = parse_field(text) {
        let again = parse_field(&field_to_string(&field)).expect("dump reparses");
        assert_eq!(again.values(), field.values());
    }
});
