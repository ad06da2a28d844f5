#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::semantic::SurprisalFile;

fuzz_target!(|data: &[u8]| {
    let _ = SurprisalFile::read(data);
});
