//! Exact rational probabilities and the product oracle.
//!
//! Everything downstream is tested against this module: values are reduced
//! fractions over unbounded integers, bit sizes are computed from integer
//! bit lengths (never through floating point), and [`exact_product`] is the
//! ground-truth product every approximation is compared with.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact nonnegative rational, always kept reduced by `num-rational`.
pub type Rational = Ratio<BigUint>;

/// Reduced fraction in `[0, 1]`.
///
/// Zero is canonically `0/1`, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalProbability {
    value: Rational,
}

impl RationalProbability {
    /// Build `r/s`, rejecting `s = 0` and `r > s`.
    pub fn new(numer: BigUint, denom: BigUint) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if numer > denom {
            return Err(Error::NotAProbability {
                numer: numer.to_string(),
                denom: denom.to_string(),
            });
        }
        Ok(Self {
            value: Ratio::new(numer, denom),
        })
    }

    pub fn from_u64(numer: u64, denom: u64) -> Result<Self> {
        Self::new(BigUint::from(numer), BigUint::from(denom))
    }

    /// Wrap an already-validated rational in `[0, 1]`.
    pub fn from_ratio(value: Rational) -> Result<Self> {
        if value > Rational::one() {
            return Err(Error::NotAProbability {
                numer: value.numer().to_string(),
                denom: value.denom().to_string(),
            });
        }
        Ok(Self { value })
    }

    pub fn zero() -> Self {
        Self {
            value: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            value: Rational::one(),
        }
    }

    pub fn numer(&self) -> &BigUint {
        self.value.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.value.denom()
    }

    pub fn as_ratio(&self) -> &Rational {
        &self.value
    }

    pub fn into_ratio(self) -> Rational {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// Bit size: the larger of the numerator's and denominator's
    /// ceiling log2; zero has bit size zero.
    pub fn bit_size(&self) -> u64 {
        bit_size_ratio(&self.value)
    }
}

impl fmt::Display for RationalProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

/// `ceil(log2(x))` for a positive integer, via bit length.  `x = 1` gives 0.
pub fn ceil_log2(x: &BigUint) -> u64 {
    if x.is_zero() || x.is_one() {
        0
    } else {
        (x - 1u8).bits()
    }
}

/// `ceil(log2(n/d))` for a positive rational, decided exactly: the smallest
/// `t` with `2^t >= n/d`.  Values at most one give... the signed result.
pub fn ceil_log2_ratio(numer: &BigUint, denom: &BigUint) -> i64 {
    assert!(!numer.is_zero() && !denom.is_zero());
    // Search around the bit-length difference; at most two candidates apply.
    let hint = numer.bits() as i64 - denom.bits() as i64;
    let mut t = hint - 1;
    loop {
        // 2^t >= n/d  <=>  d << t >= n (for t >= 0), n <= d >> -t otherwise.
        let holds = if t >= 0 {
            denom << (t as u64) >= *numer
        } else {
            *denom >= numer << ((-t) as u64)
        };
        if holds {
            return t;
        }
        t += 1;
    }
}

/// Bit size of a reduced nonnegative rational.
pub fn bit_size_ratio(q: &Rational) -> u64 {
    if q.is_zero() {
        return 0;
    }
    ceil_log2(q.numer()).max(ceil_log2(q.denom()))
}

/// Declared slice of admissible input streams: length at most `n`, every
/// element of bit size at most `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamParameters {
    n: u64,
    b: u64,
}

impl StreamParameters {
    pub fn new(n: u64, b: u64) -> Result<Self> {
        if n == 0 || b == 0 {
            return Err(Error::Precondition(format!(
                "stream parameters must be positive, got n = {n}, b = {b}"
            )));
        }
        Ok(Self { n, b })
    }

    pub fn max_len(&self) -> u64 {
        self.n
    }

    pub fn max_bits(&self) -> u64 {
        self.b
    }

    /// Reject elements above the declared per-element bit budget.
    pub fn check_element(&self, q: &RationalProbability) -> Result<()> {
        let got = q.bit_size();
        if got > self.b {
            Err(Error::OversizedElement { got, limit: self.b })
        } else {
            Ok(())
        }
    }
}

/// Exact reduced product of a stream; the empty product is one.
pub fn exact_product<'a, I>(stream: I) -> Rational
where
    I: IntoIterator<Item = &'a RationalProbability>,
{
    let elems: Vec<&RationalProbability> = stream.into_iter().collect();
    let (n, d) = raw_product(&elems);
    Ratio::new(n, d)
}

/// Unreduced numerator/denominator product, multiplied as a balanced tree so
/// oracle runs over long streams stay cheap.
pub(crate) fn raw_product(elems: &[&RationalProbability]) -> (BigUint, BigUint) {
    fn go(elems: &[&RationalProbability]) -> (BigUint, BigUint) {
        match elems.len() {
            0 => (BigUint::one(), BigUint::one()),
            1 => (elems[0].numer().clone(), elems[0].denom().clone()),
            len => {
                let (ln, ld) = go(&elems[..len / 2]);
                let (rn, rd) = go(&elems[len / 2..]);
                (ln * rn, ld * rd)
            }
        }
    }
    go(elems)
}

/// Exact power of a reduced rational; reduction is preserved by powering.
pub fn ratio_pow(base: &Rational, exp: u32) -> Rational {
    Ratio::new_raw(base.numer().pow(exp), base.denom().pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rp(n: u64, d: u64) -> RationalProbability {
        RationalProbability::from_u64(n, d).unwrap()
    }

    #[test]
    fn construction_reduces() {
        assert_eq!(rp(0, 7), RationalProbability::zero());
        assert_eq!(rp(0, 7).to_string(), "0/1");
        assert_eq!(rp(2, 4), rp(1, 2));
        assert_eq!(rp(6, 10), rp(3, 5));
        assert_eq!(rp(6, 10).to_string(), "3/5");
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            RationalProbability::from_u64(3, 2),
            Err(Error::NotAProbability { .. })
        ));
        assert!(matches!(
            RationalProbability::from_u64(1, 0),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn bit_size_examples() {
        assert_eq!(RationalProbability::zero().bit_size(), 0);
        assert_eq!(rp(1, 2).bit_size(), 1);
        assert_eq!(rp(3, 5).bit_size(), 3);
        assert_eq!(RationalProbability::one().bit_size(), 0);
        assert_eq!(rp(1, 256).bit_size(), 8);
        assert_eq!(rp(255, 256).bit_size(), 8);
    }

    #[test]
    fn ceil_log2_ratio_examples() {
        let b = |x: u64| BigUint::from(x);
        assert_eq!(ceil_log2_ratio(&b(8), &b(1)), 3);
        assert_eq!(ceil_log2_ratio(&b(9), &b(1)), 4);
        assert_eq!(ceil_log2_ratio(&b(1), &b(2)), -1);
        assert_eq!(ceil_log2_ratio(&b(3), &b(2)), 1);
        assert_eq!(ceil_log2_ratio(&b(1), &b(1)), 0);
        // 1.6e11, the per-state bound of the largest stock configuration.
        assert_eq!(ceil_log2_ratio(&b(160_000_000_000), &b(1)), 38);
    }

    #[test]
    fn exact_product_examples() {
        assert_eq!(exact_product([]), Rational::one());
        let s = [rp(1, 2), rp(1, 2)];
        assert_eq!(exact_product(&s), Ratio::new(1u8.into(), 4u8.into()));
        let s = [rp(2, 3), rp(3, 5), rp(3, 7)];
        assert_eq!(exact_product(&s), Ratio::new(6u8.into(), 35u8.into()));
    }

    #[test]
    fn stream_parameters_validate() {
        assert!(StreamParameters::new(0, 1).is_err());
        assert!(StreamParameters::new(1, 0).is_err());
        let p = StreamParameters::new(4, 2).unwrap();
        assert!(p.check_element(&rp(1, 4)).is_ok());
        assert!(matches!(
            p.check_element(&rp(1, 5)),
            Err(Error::OversizedElement { got: 3, limit: 2 })
        ));
    }

    proptest! {
        // 2^bit_size bounds max(numer, denom) tightly from above.
        #[test]
        fn bit_size_brackets_value(n in 0u64..10_000, d in 1u64..10_000) {
            prop_assume!(n <= d);
            let q = rp(n, d);
            if q.is_zero() {
                prop_assert_eq!(q.bit_size(), 0);
            } else {
                let m = q.numer().max(q.denom()).clone();
                let bs = q.bit_size();
                prop_assert!(BigUint::from(1u8) << bs >= m);
                if m > BigUint::one() {
                    prop_assert!(BigUint::from(1u8) << (bs - 1) < m);
                }
            }
        }

        // The exact product is order-independent.
        #[test]
        fn product_is_order_independent(elems in proptest::collection::vec((0u64..60, 1u64..60), 0..12)) {
            let stream: Vec<_> = elems
                .iter()
                .map(|&(r, s)| rp(r.min(s), s))
                .collect();
            let mut rev = stream.clone();
            rev.reverse();
            prop_assert_eq!(exact_product(&stream), exact_product(&rev));
        }
    }
}
