//! Prime generation by segmented sieve, factorization support and the
//! `p_k <= k (ln k + ln ln k)` sanity bound.

use crate::error::{Error, Result};

/// Ascending table of the first `K` primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    /// Sieve the first `count` primes.
    ///
    /// The sieve limit comes from the classical bound
    /// `p_k <= k (ln k + ln ln k)` for `k >= 6`, rounded up with a margin so
    /// a rounding slip can never shorten the table.
    pub fn first_primes(count: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Precondition("prime count must be positive".into()));
        }
        let mut limit = upper_bound_for_nth_prime(count);
        loop {
            let primes = sieve_up_to(limit, Some(count));
            if primes.len() as u64 >= count {
                return Ok(Self {
                    primes: primes.into_iter().take(count as usize).collect(),
                });
            }
            // Unreachable with a correct bound; grow defensively anyway.
            limit = limit + limit / 4 + 16;
        }
    }

    pub fn len(&self) -> u64 {
        self.primes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// 1-indexed access, matching the usual `p_1 = 2` convention.
    pub fn nth(&self, k: u64) -> u64 {
        self.primes[(k - 1) as usize]
    }

    /// Check `p_k <= k (ln k + ln ln k)` for a single `k >= 6`, with the
    /// right-hand side rounded *down* so floating-point error can only make
    /// the check stricter.
    pub fn bound_holds(&self, k: u64) -> bool {
        assert!(k >= 6 && k <= self.len());
        let rhs = nth_prime_bound_rounded_down(k);
        (self.nth(k) as f64) <= rhs
    }
}

/// `k (ln k + ln ln k)` rounded down a few ulps: a conservative lower bound
/// on the true value.
fn nth_prime_bound_rounded_down(k: u64) -> f64 {
    let kf = k as f64;
    let ln_k = down(kf.ln());
    let ln_ln_k = down(down(kf.ln()).ln());
    down(kf * down(ln_k + ln_ln_k))
}

/// Same expression rounded up, used to size the sieve.
fn upper_bound_for_nth_prime(k: u64) -> u64 {
    if k < 6 {
        return 14; // p_5 = 11
    }
    let kf = k as f64;
    let ln_k = up(kf.ln());
    let ln_ln_k = up(up(kf.ln()).ln());
    (up(kf * up(ln_k + ln_ln_k)) as u64) + 2
}

fn down(x: f64) -> f64 {
    x.next_down().next_down().next_down().next_down()
}

fn up(x: f64) -> f64 {
    x.next_up().next_up().next_up().next_up()
}

const SEGMENT: usize = 1 << 16;

/// Segmented sieve of Eratosthenes over `[2, limit]`.  With `stop_after`
/// set, sieving ends as soon as that many primes were collected.
fn sieve_up_to(limit: u64, stop_after: Option<u64>) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 2;
    let base = simple_sieve(root.min(limit));
    let mut primes = Vec::new();
    let mut low = 2u64;
    let mut segment = vec![true; SEGMENT];
    while low <= limit {
        let high = (low + SEGMENT as u64 - 1).min(limit);
        let len = (high - low + 1) as usize;
        segment[..len].fill(true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = low.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut idx = start;
            while idx <= high {
                segment[(idx - low) as usize] = false;
                idx += p;
            }
        }
        for i in 0..len {
            if segment[i] {
                primes.push(low + i as u64);
                if let Some(cap) = stop_after {
                    if primes.len() as u64 >= cap {
                        return primes;
                    }
                }
            }
        }
        low = high + 1;
    }
    primes
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2usize;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| is_prime[i]).map(|i| i as u64).collect()
}

/// Number of primes at most `x`.
pub fn count_primes_up_to(x: u64) -> u64 {
    sieve_up_to(x, None).len() as u64
}

/// Primes at most `x`, ascending.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    sieve_up_to(x, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes_examples() {
        assert_eq!(PrimeTable::first_primes(4).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(
            PrimeTable::first_primes(6).unwrap().primes(),
            &[2, 3, 5, 7, 11, 13]
        );
        assert!(PrimeTable::first_primes(0).is_err());
    }

    #[test]
    fn bound_holds_at_small_k() {
        let t = PrimeTable::first_primes(100).unwrap();
        // p_6 = 13 <= 6 (ln 6 + ln ln 6) ~ 14.25
        assert!(t.bound_holds(6));
        for k in 6..=100 {
            assert!(t.bound_holds(k), "bound failed at k = {k}");
        }
    }

    /// Independent oracle: trial division.
    fn trial_division_primes(count: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        let mut cand = 2u64;
        while out.len() < count {
            if (2..cand).take_while(|d| d * d <= cand).all(|d| cand % d != 0) {
                out.push(cand);
            }
            cand += 1;
        }
        out
    }

    #[test]
    fn agrees_with_trial_division() {
        let oracle = trial_division_primes(10_000);
        let table = PrimeTable::first_primes(10_000).unwrap();
        assert_eq!(table.primes(), &oracle[..]);
    }

    #[test]
    fn counting_matches_table() {
        assert_eq!(count_primes_up_to(1), 0);
        assert_eq!(count_primes_up_to(2), 1);
        assert_eq!(count_primes_up_to(4), 2);
        assert_eq!(count_primes_up_to(100), 25);
        assert_eq!(count_primes_up_to(65_536), 6_542);
    }

    #[test]
    fn segments_have_no_seams() {
        // A limit straddling several segments.
        let ps = primes_up_to(3 * SEGMENT as u64 + 17);
        for w in ps.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(ps.first(), Some(&2));
        let t = PrimeTable::first_primes(ps.len() as u64).unwrap();
        assert_eq!(t.primes(), &ps[..]);
    }
}
