use std::sync::Arc;

use proptest::prelude::*;

use textskel::decoder::{
    within_window, DecodeCall, Decoder, DecoderError, ReconstructionClient, ReconstructionRequest, RetryPolicy,
    TemplateKind,
};
use textskel::text::Lang;

/// Emits lengths from a script, one per call, cycling.
struct Scripted(Vec<usize>, std::sync::atomic::AtomicUsize);

impl Decoder for Scripted {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn decode(&self, _: &DecodeCall<'_>) -> Result<String, DecoderError> {
        let i = self.1.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
        Ok("y".repeat(self.0[i % self.0.len()]))
    }
}

fn request(estimate: usize) -> ReconstructionRequest {
    ReconstructionRequest {
        id: "p".into(),
        skeleton: "sk".into(),
        original_len_estimate: estimate,
        lang: Lang::English,
        template: TemplateKind::Reconstruct,
        strategy: None,
    }
}

proptest! {
    #[test]
    fn window_matches_rational_bounds(len in 0usize..3000, est in 1usize..2000) {
        let r = len as f64 / est as f64;
        // away from the boundaries the float ratio decides; on them the integer test includes
        if (r - 0.85).abs() > 1e-9 && (r - 1.15).abs() > 1e-9 {
            prop_assert_eq!(within_window(len, est), (0.85..=1.15).contains(&r));
        }
    }

    #[test]
    fn accepted_outputs_fit_the_window(lens in prop::collection::vec(0usize..300, 1..6), est in 1usize..200, retries in 0u32..4) {
        let d = Arc::new(Scripted(lens.clone(), Default::default()));
        let client = ReconstructionClient::new(d, RetryPolicy::immediate(retries));
        let out = client.reconstruct(&request(est)).unwrap();
        let n = out.text.chars().count();
        prop_assert!(out.attempts >= 1 && out.attempts <= retries + 1);
        prop_assert_eq!(out.latency_ms.len(), out.attempts as usize);
        if out.accepted {
            prop_assert!(within_window(n, est));
            // the first in-window attempt wins
            let first = lens.iter().cycle().take(retries as usize + 1).position(|&l| l > 0 && within_window(l, est)).unwrap();
            prop_assert_eq!(out.attempts as usize, first + 1);
        } else {
            prop_assert_eq!(out.attempts, retries + 1);
        }
    }
}
