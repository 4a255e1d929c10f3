#![no_main]

use libfuzzer_sys::fuzz_target;
use signorini_core::solver::SignoriniProblem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = SignoriniProblem::from_config_str(text) {
        let resolved = p.to_config_string();
        let again = SignoriniProblem::from_config_str(&resolved).expect("resolved config reparses");
        assert_eq!(again.to_config_string(), resolved);
    }
});
