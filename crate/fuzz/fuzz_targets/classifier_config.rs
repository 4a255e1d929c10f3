#![no_main]

use libfuzzer_sys::fuzz_target;
use signorini_core::classifier::ClassifierConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ClassifierConfig::from_config_str(text) {
        let again = ClassifierConfig::from_config_str(&cfg.to_config_string()).expect("config reparses");
        assert_eq!(again, cfg);
    }
});
