//! Seeded random probabilities and streams, shared by tests, sweeps and the
//! command-line oracle runs.

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};

use crate::rational::RationalProbability;

/// Deterministic generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniformly random reduced probability of bit size at most `b`:
/// denominator uniform in `[1, 2^b]`, numerator uniform over the admissible
/// range.
pub fn random_probability(rng: &mut dyn RngCore, b: u64, allow_zero: bool) -> RationalProbability {
    assert!(b >= 1 && b <= 62, "bit budget out of the supported range");
    let max = 1u64 << b;
    let s = rng.random_range(1..=max);
    let lo = if allow_zero { 0 } else { 1 };
    let r = rng.random_range(lo..=s);
    RationalProbability::from_u64(r, s).expect("sampled within range")
}

/// Stream of `len` elements, each of bit size at most `b`.
pub fn random_stream(
    rng: &mut dyn RngCore,
    b: u64,
    len: usize,
    allow_zero: bool,
) -> Vec<RationalProbability> {
    (0..len)
        .map(|_| random_probability(rng, b, allow_zero))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_elements_respect_the_budget() {
        let mut rng = seeded_rng(7);
        for _ in 0..500 {
            let q = random_probability(&mut rng, 8, true);
            assert!(q.bit_size() <= 8);
        }
    }

    #[test]
    fn zero_is_excluded_on_request() {
        let mut rng = seeded_rng(11);
        for _ in 0..500 {
            assert!(!random_probability(&mut rng, 4, false).is_zero());
        }
    }

    #[test]
    fn seeding_is_reproducible() {
        let a = random_stream(&mut seeded_rng(3), 6, 20, true);
        let b = random_stream(&mut seeded_rng(3), 6, 20, true);
        assert_eq!(a, b);
    }
}
