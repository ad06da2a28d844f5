//! Largest-remainder apportionment of a deletion total across classes.

/// Splits `total` into integer parts proportional to `quotas`.
///
/// Quotas are rescaled to sum to `total` first. Each part is capped by
/// `caps[k]`; `priority` lists class indices in tie-break order (earlier wins
/// equal remainders, and receives overflow when caps bind).
///
/// Panics when `total` exceeds the sum of caps.
pub fn apportion(quotas: &[f64], caps: &[usize], total: usize, priority: &[usize]) -> Vec<usize> {
    assert_eq!(quotas.len(), caps.len());
    assert!(
        total <= caps.iter().sum::<usize>(),
        "cannot apportion {total} units over capacity {}",
        caps.iter().sum::<usize>()
    );
    let k = quotas.len();
    let mut parts = vec![0usize; k];
    if total == 0 {
        return parts;
    }
    let sum: f64 = quotas.iter().sum();
    let scaled: Vec<f64> = if sum > 0.0 {
        let exact = sum == total as f64;
        quotas
            .iter()
            .map(|&q| if exact { q } else { q * total as f64 / sum })
            .collect()
    } else {
        vec![0.0; k]
    };

    let mut assigned = 0usize;
    let mut rema: Vec<(usize, f64)> = Vec::with_capacity(k);
    for i in 0..k {
        let floor = scaled[i].floor().max(0.0) as usize;
        parts[i] = floor.min(caps[i]);
        assigned += parts[i];
        rema.push((i, scaled[i] - scaled[i].floor()));
    }
    // Rounding noise can overshoot by a unit when quotas are rescaled.
    while assigned > total {
        let i = *priority
            .iter()
            .rev()
            .find(|&&i| parts[i] > 0)
            .expect("overshoot implies a positive part");
        parts[i] -= 1;
        assigned -= 1;
    }

    let rank = |i: usize| priority.iter().position(|&p| p == i).unwrap_or(usize::MAX);
    rema.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| rank(a.0).cmp(&rank(b.0))));
    let mut deficit = total - assigned;
    for &(i, frac) in &rema {
        if deficit == 0 {
            break;
        }
        if frac > 0.0 && parts[i] < caps[i] {
            parts[i] += 1;
            deficit -= 1;
        }
    }
    // Caps bound: hand out what is left in priority order.
    for i in priority.iter().copied().chain(0..k) {
        if deficit == 0 {
            break;
        }
        let take = (caps[i] - parts[i]).min(deficit);
        parts[i] += take;
        deficit -= take;
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn proportional_example() {
        // p = {0.2, 0.3, 0.5}, L = 100, D = 40
        let parts = apportion(&[8.0, 12.0, 20.0], &[20, 30, 50], 40, &[0, 1, 2]);
        assert_eq!(parts, vec![8, 12, 20]);
    }

    #[test]
    fn remainders_break_by_size_then_priority() {
        // 10 split by thirds: 3.33 each, one extra to the first in priority.
        let q = [10.0 / 3.0; 3];
        assert_eq!(apportion(&q, &[10, 10, 10], 10, &[2, 0, 1]), vec![3, 3, 4]);
        assert_eq!(apportion(&q, &[10, 10, 10], 10, &[0, 1, 2]), vec![4, 3, 3]);
    }

    #[test]
    fn caps_redirect_overflow() {
        let parts = apportion(&[5.0, 5.0], &[2, 10], 10, &[0, 1]);
        assert_eq!(parts, vec![2, 8]);
    }

    #[test]
    fn zero_quotas_follow_priority() {
        assert_eq!(apportion(&[0.0, 0.0], &[3, 3], 4, &[1, 0]), vec![1, 3]);
    }

    proptest! {
        #[test]
        fn sums_and_stays_within_one(counts in prop::collection::vec(0usize..60, 1..7), frac in 0.0f64..=1.0) {
            let len: usize = counts.iter().sum();
            prop_assume!(len > 0);
            let total = ((len as f64) * frac).floor() as usize;
            let quotas: Vec<f64> = counts.iter().map(|&c| (total * c) as f64 / len as f64).collect();
            let order: Vec<usize> = (0..counts.len()).collect();
            let parts = apportion(&quotas, &counts, total, &order);
            prop_assert_eq!(parts.iter().sum::<usize>(), total);
            for k in 0..counts.len() {
                prop_assert!(parts[k] <= counts[k]);
                prop_assert!((parts[k] as f64 - quotas[k]).abs() < 1.0);
            }
        }
    }
}
