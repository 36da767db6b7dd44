#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thinning::{Alphabet, JointMeasure, PiecewiseProfile};

pub fn alphabet(m: usize) -> Alphabet {
    Alphabet::new((0..m).map(|i| format!("s{i}"))).unwrap()
}

/// Probability vector from raw nonnegative weights, with at least one positive entry.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut v = vec![0.0; raw.len()];
        v[0] = 1.0;
        return v;
    }
    raw.iter().map(|x| x / total).collect()
}

/// Profiles with `|X| ≤ 3` and at most four pieces.
pub fn profile_strategy() -> impl Strategy<Value = PiecewiseProfile> {
    (1usize..=3, 1usize..=4)
        .prop_flat_map(|(m, r)| {
            (
                Just(m),
                proptest::collection::vec(0.01f64..0.99, r - 1),
                proptest::collection::vec(proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], m), r),
            )
        })
        .prop_filter_map("distinct breakpoints", |(m, mut cuts, raw)| {
            cuts.sort_by(f64::total_cmp);
            if cuts.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                return None;
            }
            let mut bps = vec![0.0];
            bps.extend(cuts);
            bps.push(1.0);
            let measures = raw.iter().map(|v| normalize(v)).collect();
            PiecewiseProfile::new(alphabet(m), bps, measures).ok()
        })
}

/// A random measure on `X^n`; roughly a quarter of the entries are zero.
pub fn random_measure(alpha: Alphabet, n: usize, seed: u64) -> JointMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = alpha.len().pow(n as u32);
    let raw: Vec<f64> = (0..len)
        .map(|_| if rng.random::<f64>() < 0.25 { 0.0 } else { -rng.random::<f64>().ln() })
        .collect();
    JointMeasure::new(alpha, n, normalize(&raw)).unwrap()
}

/// Profiles drawn from a seed, for the fixed-size acceptance-style sweeps.
pub fn seeded_profile(seed: u64) -> PiecewiseProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=3);
    let r = rng.random_range(1..=4);
    let mut cuts: Vec<f64> = (0..r - 1).map(|_| rng.random_range(0.05..0.95)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bps = vec![0.0];
    bps.extend(cuts);
    bps.push(1.0);
    let measures = (0..r)
        .map(|_| normalize(&(0..m).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
        .collect();
    PiecewiseProfile::new(alphabet(m), bps, measures).unwrap()
}
