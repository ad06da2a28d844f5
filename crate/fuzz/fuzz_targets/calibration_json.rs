#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::allocation::CalibrationTable;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = CalibrationTable::from_json(s) {
        assert!(t.b_full.values().all(|b| (0.0..=1.0).contains(b)));
        let again = CalibrationTable::from_json(&t.to_json()).expect("own output parses");
        assert_eq!(again, t);
    }
});
