#![no_main]
use libfuzzer_sys::fuzz_target;
use textskel::harness::{encode, EncoderContext};
use textskel::strategies::StrategyId;
use textskel::text::Chunk;

const STRATEGIES: [StrategyId; 5] = [
    StrategyId::Step,
    StrategyId::Gaussian,
    StrategyId::Bernoulli,
    StrategyId::Poisson,
    StrategyId::WordLen,
];

fuzz_target!(|data: &[u8]| {
    let [a, b, rest @ ..] = data else {
        return;
    };
    let text = String::from_utf8_lossy(rest);
    let Ok(chunk) = Chunk::english("f", text.as_ref()) else {
        return;
    };
    let r = (f64::from(*a) + 1.0) / 256.0;
    let strategy = STRATEGIES[usize::from(*b) % STRATEGIES.len()];
    let sk = encode(&chunk, strategy, r, u64::from(*b), &EncoderContext::default()).unwrap();
    let mut it = chunk.text().chars();
    assert!(sk.skeleton.chars().all(|c| it.any(|h| h == c)));
    assert!(sk.kept() >= 1 && sk.kept() <= chunk.len());
});
