#![no_main]

use libfuzzer_sys::fuzz_target;
use signorini_core::poly::Obstacle;
use signorini_core::solver::Boundary;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for n in [2, 3] {
        if let Ok(b) = Boundary::parse(text, n) {
            let x = [0.25, -0.5, 0.125];
            let _ = b.eval(&x[..n]);
            let again = Boundary::parse(&b.to_text(), n).expect("boundary text reparses");
            assert_eq!(again.to_text(), b.to_text());
        }
        if let Ok(o) = Obstacle::parse(text, n - 1) {
            let again = Obstacle::parse(&o.to_text(), n - 1).expect("obstacle text reparses");
            assert_eq!(again, o);
        }
    }
});
