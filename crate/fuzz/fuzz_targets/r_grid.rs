#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::harness::parse_r_grid;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_r_grid(s) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|&r| r > 0.0 && r <= 1.0));
    }
});
