#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::corpus::{read_corpus, rejoin};

fuzz_target!(|data: &[u8]| {
    let Some((&limit, body)) = data.split_first() else {
        return;
    };
    if let Ok(chunks) = read_corpus(body, usize::from(limit)) {
        assert!(limit > 0);
        assert!(chunks.iter().all(|c| c.len() >= 1));
        let _ = rejoin(&chunks);
    }
});
