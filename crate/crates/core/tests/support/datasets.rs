//! Seeded random training sets with few distinct values per attribute.

#![allow(dead_code)]

use lft_core::{ClassLabel, DesignPoint, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Up to 50 rows. Labels follow a simple rule 70 % of the time so trees have
/// some depth, and are random otherwise.
pub fn random_dataset(rng: &mut ChaCha8Rng) -> Vec<Sample> {
    let n = rng.random_range(2..=50);
    (0..n)
        .map(|_| {
            let features = [
                1.0 + 0.5 * rng.random_range(0..5) as f64,
                rng.random_range(2..=6) as f64,
                rng.random_range(2..=5) as f64,
                0.8 + 0.3 * rng.random_range(0..5) as f64,
                rng.random_range(0..=5) as f64,
            ];
            let label = if rng.random_bool(0.7) {
                if features[0] > 2.0 {
                    ClassLabel::Excellent
                } else if features[1] > 4.0 {
                    ClassLabel::General
                } else {
                    ClassLabel::Bad
                }
            } else {
                ClassLabel::ALL[rng.random_range(0..3)]
            };
            Sample { features, label }
        })
        .collect()
}

pub fn datasets(seed: u64, count: usize) -> Vec<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_dataset(&mut rng)).collect()
}

/// Uniform point in the admissible design box.
pub fn random_design(rng: &mut ChaCha8Rng) -> DesignPoint {
    DesignPoint::new(
        rng.random_range(2..=6),
        rng.random_range(2..=5),
        rng.random_range(1.0..=3.0),
        rng.random_range(0.8..=2.0),
        rng.random_range(0.0..=5.0),
    )
}
