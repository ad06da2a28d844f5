use proptest::prelude::*;

use textskel::allocation::{objective, solve_allocation, CalibrationTable};
use textskel::frequency::{BucketProfile, SchemeMode};
use textskel::semantic::HybridConfig;
use textskel::strategies::apportion;

fn instance() -> impl Strategy<Value = (SchemeMode, Vec<usize>, Vec<f64>, f64)> {
    prop_oneof![Just(SchemeMode::ThreeClass), Just(SchemeMode::SixClass), Just(SchemeMode::Tertile)].prop_flat_map(
        |mode| {
            let k = mode.buckets().len();
            (
                Just(mode),
                prop::collection::vec(0usize..300, k).prop_filter("non-empty", |c| c.iter().sum::<usize>() > 0),
                prop::collection::vec(0.0f64..=1.0, k),
                0.01f64..=1.0,
            )
        },
    )
}

proptest! {
    #[test]
    fn greedy_weights_are_feasible((mode, counts, b, r) in instance()) {
        let profile = BucketProfile::from_counts(mode.buckets(), &counts);
        let calib = CalibrationTable::from_pairs(mode, mode.buckets().iter().copied().zip(b.iter().copied()));
        let a = solve_allocation(&profile, &calib, r).unwrap();
        let p = profile.p();
        prop_assert!(a.w.iter().all(|&w| (0.0..=1.0).contains(&w)));
        let covered: f64 = p.iter().zip(&a.w).map(|(p, w)| p * w).sum();
        prop_assert!(covered >= 1.0 - r - 1e-12);
        prop_assert!(a.fractional_count() <= 1);
        prop_assert!((a.objective - objective(&p, &b, &a.w)).abs() <= 1e-12);
    }

    #[test]
    fn greedy_beats_random_feasible_points((mode, counts, b, r) in instance(), raw in prop::collection::vec(0.0f64..=1.0, 6)) {
        let profile = BucketProfile::from_counts(mode.buckets(), &counts);
        let calib = CalibrationTable::from_pairs(mode, mode.buckets().iter().copied().zip(b.iter().copied()));
        let a = solve_allocation(&profile, &calib, r).unwrap();
        let p = profile.p();
        let w: Vec<f64> = raw[..p.len()].to_vec();
        let covered: f64 = p.iter().zip(&w).map(|(p, w)| p * w).sum();
        if covered >= 1.0 - r {
            prop_assert!(objective(&p, &b, &w) <= a.objective + 1e-12);
        }
    }

    #[test]
    fn apportion_is_within_one(counts in prop::collection::vec(0usize..100, 1..8), frac in 0.0f64..=1.0) {
        let len: usize = counts.iter().sum();
        prop_assume!(len > 0);
        let total = (frac * len as f64).floor() as usize;
        let quotas: Vec<f64> = counts.iter().map(|&c| (total * c) as f64 / len as f64).collect();
        let order: Vec<usize> = (0..counts.len()).collect();
        let parts = apportion(&quotas, &counts, total, &order);
        prop_assert_eq!(parts.iter().sum::<usize>(), total);
        for ((d, q), c) in parts.iter().zip(&quotas).zip(&counts) {
            prop_assert!((*d as f64 - q).abs() < 1.0);
            prop_assert!(d <= c);
        }
    }

    #[test]
    fn alpha_domain(a in -2.0f64..3.0) {
        prop_assert_eq!(HybridConfig::new(a).is_ok(), (0.0..=1.0).contains(&a));
    }
}
