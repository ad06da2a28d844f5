use proptest::prelude::*;

use textskel::harness::{config_hash, parse_r_grid, SweepConfig};
use textskel::metrics::{cer, rouge_l_text, ExactMatch, SimilarityProvider};
use textskel::strategies::StrategyId;
use textskel::text::Lang;

proptest! {
    #[test]
    fn cer_zero_iff_equal(a in "[a-c ]{1,30}", b in "[a-c ]{0,30}") {
        let c = cer(&a, &b).unwrap();
        prop_assert!(c >= 0.0);
        prop_assert_eq!(c == 0.0, a == b);
    }

    #[test]
    fn rouge_in_unit_interval(a in "[a-d ,.]{0,60}", b in "[a-d ,.]{0,60}") {
        let r = rouge_l_text(&a, &b, Lang::English);
        prop_assert!((0.0..=1.0).contains(&r.f));
        prop_assert!((0.0..=1.0).contains(&r.precision));
        prop_assert!((0.0..=1.0).contains(&r.recall));
    }

    #[test]
    fn exact_match_bounds(a in "[a-c]{1,20}", b in "[a-c]{1,20}") {
        let s = ExactMatch.score(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s == 1.0, a == b);
    }

    #[test]
    fn grid_values_in_range(start in 1u32..50, width in 0u32..50, step in 1u32..20) {
        let (a, b, s) = (start as f64 / 100.0, (start + width) as f64 / 100.0, step as f64 / 100.0);
        let grid = parse_r_grid(&format!("{a}:{b}:{s}")).unwrap();
        prop_assert!(grid.iter().all(|&r| r > 0.0 && r <= 1.0));
        prop_assert_eq!(grid.len(), (width / step) as usize + 1);
    }

    #[test]
    fn hash_ignores_key_order_and_out_dir(seed in any::<u64>(), out in "[a-z]{1,8}") {
        let mut cfg = SweepConfig::new(vec![StrategyId::Step, StrategyId::Opt], "corpus.jsonl", out);
        cfg.seed = seed;
        let v = serde_json::to_value(&cfg).unwrap();
        let obj = v.as_object().unwrap();
        // serialize with keys reversed
        let reversed = format!(
            "{{{}}}",
            obj.iter().rev().map(|(k, v)| format!("{}:{}", serde_json::to_string(k).unwrap(), v)).collect::<Vec<_>>().join(",")
        );
        let again: serde_json::Value = serde_json::from_str(&reversed).unwrap();
        prop_assert_eq!(config_hash(&again), config_hash(&v));
        let mut moved = cfg.clone();
        moved.out_dir = "elsewhere".into();
        prop_assert_eq!(moved.hash(), cfg.hash());
    }
}
