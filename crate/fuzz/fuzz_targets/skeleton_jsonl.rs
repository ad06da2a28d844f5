#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::strategies::Skeleton;

fuzz_target!(|data: &[u8]| {
    for line in data.split(|&b| b == b'\n') {
        if let Ok(s) = serde_json::from_slice::<Skeleton>(line) {
            let text = serde_json::to_string(&s).unwrap();
            let back: Skeleton = serde_json::from_str(&text).unwrap();
            assert_eq!(back.id, s.id);
            assert_eq!(back.skeleton, s.skeleton);
            assert_eq!(back.strategy.to_string(), s.strategy.to_string());
        }
    }
});
