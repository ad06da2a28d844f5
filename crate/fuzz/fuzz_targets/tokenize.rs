#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::text::{tokenize_units, Lang};

fuzz_target!(|data: &[u8]| {
    let Some((&flag, rest)) = data.split_first() else {
        return;
    };
    let lang = if flag & 1 == 0 { Lang::English } else { Lang::Presegmented };
    let units: Vec<char> = String::from_utf8_lossy(rest).chars().collect();
    let spans = tokenize_units(&units, lang);
    let mut pos = 0;
    for s in &spans {
        assert_eq!(s.start, pos);
        assert!(s.end > s.start);
        pos = s.end;
    }
    assert_eq!(pos, units.len());
});
