#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::frequency::FrequencyTable;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = FrequencyTable::parse(s) {
        for line in s.lines() {
            if let Some(z) = line.split('\t').next().and_then(|w| t.lookup(w)) {
                assert!(z.is_finite());
            }
        }
    }
});
