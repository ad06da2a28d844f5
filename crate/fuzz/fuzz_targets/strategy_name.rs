#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::strategies::StrategyId;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(id) = s.parse::<StrategyId>() {
        let name = id.to_string();
        let again: StrategyId = name.parse().expect("display output parses");
        assert_eq!(again.to_string(), name);
    }
});
