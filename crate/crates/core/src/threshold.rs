//! Threshold decisions: is the product of the stream strictly below the
//! leading threshold element?
//!
//! Two interchangeable automatons answer it.  The store-all baseline keeps
//! every nontrivial element and compares exactly.  The prime-vector
//! automaton keeps, for every prime up to `2^b`, how often it occurs in the
//! running product (denominator occurrences negative), plus a counter of
//! elements strictly below one: once that counter reaches `ceil(B ln B)`
//! the product has provably fallen below `1/B`, which is at most any
//! positive threshold of bit size `b`, and the automaton latches its
//! decision without looking at anything else.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::primes::primes_up_to;
use crate::rational::{exact_product, RationalProbability, StreamParameters};
use crate::streaming::StreamingAutomaton;

/// Sparse factorization map: prime to signed occurrence count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeExponentVector {
    exps: BTreeMap<u64, BigInt>,
}

impl PrimeExponentVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&u64, &BigInt)> {
        self.exps.iter()
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent_of(&self, prime: u64) -> BigInt {
        self.exps.get(&prime).cloned().unwrap_or_default()
    }

    fn add_entry(&mut self, prime: u64, delta: BigInt) {
        let slot = self.exps.entry(prime).or_default();
        *slot += delta;
        if slot.is_zero() {
            self.exps.remove(&prime);
        }
    }

    /// Entrywise sum; zero entries vanish.
    pub fn add(&mut self, other: &PrimeExponentVector) {
        for (&p, e) in &other.exps {
            self.add_entry(p, e.clone());
        }
    }

    /// Clamp every exponent's magnitude to `2^cap_bits - 1`; `cap_bits = 0`
    /// erases the vector.  Deliberately lossy, for demonstrating what a
    /// too-small memory does to correctness.
    pub fn clamp_magnitudes(&mut self, cap_bits: u32) {
        if cap_bits == 0 {
            self.exps.clear();
            return;
        }
        let max: BigInt = (BigInt::one() << cap_bits) - 1;
        for e in self.exps.values_mut() {
            if e.magnitude() > max.magnitude() {
                *e = match e.sign() {
                    Sign::Minus => -max.clone(),
                    _ => max.clone(),
                };
            }
        }
    }

    /// Split into an exact numerator/denominator pair:
    /// positive exponents multiply into the numerator, negative ones into
    /// the denominator.
    pub fn to_fraction(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (&p, e) in &self.exps {
            let mag: u64 = e
                .magnitude()
                .to_u64()
                .expect("exponent magnitude fits u64 at supported scales");
            let factor = pow_u64(p, mag);
            match e.sign() {
                Sign::Plus => num *= factor,
                Sign::Minus => den *= factor,
                Sign::NoSign => {}
            }
        }
        (num, den)
    }
}

fn pow_u64(base: u64, exp: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut sq = BigUint::from(base);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Factor a positive probability of bit size at most `b` over the primes up
/// to `2^b`; denominator occurrences count negative.
pub fn factor_over_primes(q: &RationalProbability, b: u64) -> Result<PrimeExponentVector> {
    if q.is_zero() {
        return Err(Error::ZeroHasNoBucket);
    }
    let got = q.bit_size();
    if got > b {
        return Err(Error::OversizedElement { got, limit: b });
    }
    check_prime_vector_budget(b)?;
    let trial = primes_up_to(1u64 << b.div_ceil(2));
    let mut vec = PrimeExponentVector::new();
    factor_into(&mut vec, q, &trial);
    Ok(vec)
}

fn factor_into(vec: &mut PrimeExponentVector, q: &RationalProbability, trial: &[u64]) {
    let n = q.numer().to_u64().expect("numerator fits u64");
    let d = q.denom().to_u64().expect("denominator fits u64");
    for (p, e) in factor_u64(n, trial) {
        vec.add_entry(p, BigInt::from(e));
    }
    for (p, e) in factor_u64(d, trial) {
        vec.add_entry(p, -BigInt::from(e));
    }
}

fn factor_u64(mut x: u64, trial: &[u64]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &p in trial {
        if p * p > x {
            break;
        }
        if x % p == 0 {
            let mut e = 0u64;
            while x % p == 0 {
                x /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

const MAX_PRIME_VECTOR_BITS: u64 = 40;

fn check_prime_vector_budget(b: u64) -> Result<()> {
    if b > MAX_PRIME_VECTOR_BITS {
        Err(Error::Unsupported(format!(
            "prime-vector mode supports bit budgets up to {MAX_PRIME_VECTOR_BITS}, got {b}"
        )))
    } else {
        Ok(())
    }
}

/// `ceil(B ln B)` for `B = 2^b`, rounded up so the early exit can only be
/// delayed, never taken too soon.
pub fn early_exit_count(b: u64) -> u64 {
    assert!(b >= 1 && b <= MAX_PRIME_VECTOR_BITS);
    let big_b = (1u64 << b) as f64;
    let x = big_b * (b as f64) * std::f64::consts::LN_2.next_up();
    let mut x = x;
    for _ in 0..8 {
        x = x.next_up();
    }
    x.ceil() as u64
}

/// Which representation the automaton keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TppMode {
    StoreAll,
    PrimeVector,
}

/// Threshold decision state: the captured threshold (first element), the
/// zero/early-exit flags, the small-factor counter and the mode-specific
/// body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdState {
    threshold: Option<RationalProbability>,
    saw_zero: bool,
    early_exit: bool,
    small_factor_count: u64,
    body: TppBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TppBody {
    StoreAll { stored: Vec<RationalProbability> },
    PrimeVector { vector: PrimeExponentVector },
}

impl ThresholdState {
    pub fn threshold(&self) -> Option<&RationalProbability> {
        self.threshold.as_ref()
    }

    pub fn saw_zero(&self) -> bool {
        self.saw_zero
    }

    pub fn early_exit(&self) -> bool {
        self.early_exit
    }

    pub fn small_factor_count(&self) -> u64 {
        self.small_factor_count
    }

    pub fn vector(&self) -> Option<&PrimeExponentVector> {
        match &self.body {
            TppBody::PrimeVector { vector } => Some(vector),
            TppBody::StoreAll { .. } => None,
        }
    }

    pub fn stored(&self) -> Option<&[RationalProbability]> {
        match &self.body {
            TppBody::StoreAll { stored } => Some(stored),
            TppBody::PrimeVector { .. } => None,
        }
    }
}

/// Threshold decision automaton.  The threshold travels as the first stream
/// element; ones are ignored entirely.
pub struct TppAutomaton {
    params: StreamParameters,
    mode: TppMode,
    exponent_cap_bits: Option<u32>,
    trial_primes: Vec<u64>,
    exit_count: u64,
}

impl TppAutomaton {
    pub fn new(params: StreamParameters, mode: TppMode) -> Result<Self> {
        let (trial_primes, exit_count) = match mode {
            TppMode::PrimeVector => {
                check_prime_vector_budget(params.max_bits())?;
                (
                    primes_up_to(1u64 << params.max_bits().div_ceil(2)),
                    early_exit_count(params.max_bits()),
                )
            }
            TppMode::StoreAll => (Vec::new(), 0),
        };
        Ok(Self {
            params,
            mode,
            exponent_cap_bits: None,
            trial_primes,
            exit_count,
        })
    }

    /// Lossy variant clamping exponent magnitudes to `cap_bits` bits; used
    /// to witness pigeonhole violations on the fooling families.
    pub fn with_exponent_cap(params: StreamParameters, cap_bits: u32) -> Result<Self> {
        let mut a = Self::new(params, TppMode::PrimeVector)?;
        a.exponent_cap_bits = Some(cap_bits);
        Ok(a)
    }

    pub fn mode(&self) -> TppMode {
        self.mode
    }

    pub fn params(&self) -> &StreamParameters {
        &self.params
    }

    pub fn exponent_cap_bits(&self) -> Option<u32> {
        self.exponent_cap_bits
    }

    /// The latched early-exit trigger `ceil(B ln B)`.
    pub fn exit_count(&self) -> u64 {
        self.exit_count
    }

    /// Decide `product of the post-threshold stream < threshold`.
    pub fn decide(&self, state: &ThresholdState) -> Result<bool> {
        let t = state.threshold.as_ref().ok_or(Error::MissingThreshold)?;
        if t.is_zero() {
            return Ok(false); // nothing is below zero
        }
        if state.saw_zero {
            return Ok(true);
        }
        if state.early_exit {
            return Ok(true);
        }
        match &state.body {
            TppBody::StoreAll { stored } => Ok(exact_product(stored) < *t.as_ratio()),
            TppBody::PrimeVector { vector } => {
                let (num, den) = vector.to_fraction();
                // num/den < tn/td
                Ok(num * t.denom() < den * t.numer())
            }
        }
    }

    /// Structural space accounting for the current state.
    pub fn space_report(&self, state: &ThresholdState) -> TppSpaceReport {
        let n = self.params.max_len();
        let b = self.params.max_bits();
        TppSpaceReport {
            actual_state_bits: self.serialize_state(state).len() as u64,
            store_all_formula_bits: 2 * (n + 1) * b,
            tracked_primes: state.vector().map(|v| v.len() as u64),
            prime_count_bound: if matches!(self.mode, TppMode::PrimeVector) && b <= 26 {
                Some(crate::primes::count_primes_up_to(1u64 << b))
            } else {
                None
            },
            exponent_magnitude_bound: n.saturating_mul(b),
            effective_length_cap: if matches!(self.mode, TppMode::PrimeVector) {
                Some(self.exit_count)
            } else {
                None
            },
        }
    }

    fn push_element(&self, bits: &mut Bits, q: &RationalProbability) {
        let b = self.params.max_bits();
        bits.push_fixed(q.numer(), b);
        bits.push_fixed(&(q.denom() - 1u8), b);
    }

    fn read_element(&self, r: &mut crate::bits::BitReader<'_>) -> Result<RationalProbability> {
        let b = self.params.max_bits();
        let numer = r.read_fixed(b)?;
        let denom = r.read_fixed(b)? + 1u8;
        RationalProbability::new(numer, denom)
    }
}

/// Structural space report of a threshold run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TppSpaceReport {
    pub actual_state_bits: u64,
    /// `2 (n+1) b`: the stream plus its threshold, stored verbatim.
    pub store_all_formula_bits: u64,
    pub tracked_primes: Option<u64>,
    /// `pi(2^b)`, computed when affordable.
    pub prime_count_bound: Option<u64>,
    /// Any single exponent magnitude is at most `n b`.
    pub exponent_magnitude_bound: u64,
    /// `ceil(B ln B)`: elements below one that matter before the exit.
    pub effective_length_cap: Option<u64>,
}

impl StreamingAutomaton for TppAutomaton {
    type State = ThresholdState;
    type Output = bool;

    fn initial_state(&self, _rng: &mut dyn RngCore) -> Self::State {
        ThresholdState {
            threshold: None,
            saw_zero: false,
            early_exit: false,
            small_factor_count: 0,
            body: match self.mode {
                TppMode::StoreAll => TppBody::StoreAll { stored: Vec::new() },
                TppMode::PrimeVector => TppBody::PrimeVector {
                    vector: PrimeExponentVector::new(),
                },
            },
        }
    }

    fn step(&self, mut state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        self.params.check_element(q)?;
        if state.threshold.is_none() {
            state.threshold = Some(q.clone());
            return Ok(state);
        }
        if state.early_exit || q.is_one() {
            // Latched exit, and ones never change the product.
            return Ok(state);
        }
        // Anything below one of bit size b is at most (B-1)/B.
        let b = self.params.max_bits();
        debug_assert!(
            q.is_zero()
                || *q.as_ratio() >= num_rational::Ratio::one()
                || q.numer() * (BigUint::one() << b)
                    <= q.denom() * ((BigUint::one() << b) - 1u8)
        );
        state.small_factor_count += 1;
        if q.is_zero() {
            state.saw_zero = true;
            return Ok(state);
        }
        match &mut state.body {
            TppBody::StoreAll { stored } => stored.push(q.clone()),
            TppBody::PrimeVector { vector } => {
                factor_into(vector, q, &self.trial_primes);
                if let Some(cap) = self.exponent_cap_bits {
                    vector.clamp_magnitudes(cap);
                }
                if state.small_factor_count >= self.exit_count {
                    state.early_exit = true;
                }
            }
        }
        Ok(state)
    }

    fn output(&self, state: &Self::State) -> Result<bool> {
        self.decide(state)
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        let b = self.params.max_bits();
        let mut bits = Bits::new();
        bits.push_bit(state.threshold.is_some());
        if let Some(t) = &state.threshold {
            self.push_element(&mut bits, t);
        }
        bits.push_bit(state.saw_zero);
        bits.push_bit(state.early_exit);
        bits.push_minimal(&BigUint::from(state.small_factor_count));
        match &state.body {
            TppBody::StoreAll { stored } => {
                bits.push_fixed_u64(stored.len() as u64, 32);
                for q in stored {
                    self.push_element(&mut bits, q);
                }
            }
            TppBody::PrimeVector { vector } => {
                bits.push_fixed_u64(vector.len() as u64, 32);
                for (&p, e) in vector.entries() {
                    bits.push_fixed_u64(p - 2, b);
                    bits.push_bit(e.sign() == Sign::Minus);
                    bits.push_minimal(e.magnitude());
                }
            }
        }
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let threshold = if r.read_bit()? {
            Some(self.read_element(&mut r)?)
        } else {
            None
        };
        let saw_zero = r.read_bit()?;
        let early_exit = r.read_bit()?;
        let small_factor_count = r
            .read_minimal()?
            .to_u64()
            .ok_or_else(|| Error::MalformedState("counter overflows u64".into()))?;
        let entries = r.read_fixed_u64(32)?;
        let body = match self.mode {
            TppMode::StoreAll => {
                let mut stored = Vec::with_capacity(entries as usize);
                for _ in 0..entries {
                    stored.push(self.read_element(&mut r)?);
                }
                TppBody::StoreAll { stored }
            }
            TppMode::PrimeVector => {
                let mut vector = PrimeExponentVector::new();
                let b = self.params.max_bits();
                for _ in 0..entries {
                    let p = r.read_fixed_u64(b)? + 2;
                    let neg = r.read_bit()?;
                    let mag = r.read_minimal()?;
                    let e = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, mag);
                    vector.add_entry(p, e);
                }
                TppBody::PrimeVector { vector }
            }
        };
        Ok(ThresholdState {
            threshold,
            saw_zero,
            early_exit,
            small_factor_count,
            body,
        })
    }
}

/// Exact oracle for the threshold decision: product of `stream` strictly
/// below `threshold`.
pub fn threshold_oracle(threshold: &RationalProbability, stream: &[RationalProbability]) -> bool {
    if threshold.is_zero() {
        return false;
    }
    exact_product(stream).cmp(threshold.as_ratio()) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_probability, random_stream, seeded_rng};
    use crate::streaming::run_stream;
    use proptest::prelude::*;

    fn rp(n: u64, d: u64) -> RationalProbability {
        RationalProbability::from_u64(n, d).unwrap()
    }

    fn tpp(n: u64, b: u64, mode: TppMode) -> TppAutomaton {
        TppAutomaton::new(StreamParameters::new(n, b).unwrap(), mode).unwrap()
    }

    fn run(a: &TppAutomaton, stream: &[RationalProbability]) -> ThresholdState {
        run_stream(a, &mut seeded_rng(0), stream).unwrap()
    }

    #[test]
    fn factorization_examples() {
        let v = factor_over_primes(&rp(2, 3), 2).unwrap();
        assert_eq!(v.exponent_of(2), BigInt::from(1));
        assert_eq!(v.exponent_of(3), BigInt::from(-1));
        assert_eq!(v.len(), 2);

        let v = factor_over_primes(&RationalProbability::one(), 4).unwrap();
        assert!(v.is_empty());

        let v = factor_over_primes(&rp(9, 35), 6).unwrap();
        assert_eq!(v.exponent_of(3), BigInt::from(2));
        assert_eq!(v.exponent_of(5), BigInt::from(-1));
        assert_eq!(v.exponent_of(7), BigInt::from(-1));

        assert!(factor_over_primes(&RationalProbability::zero(), 4).is_err());
    }

    #[test]
    fn vector_sums_and_cancellation() {
        let a = tpp(4, 4, TppMode::PrimeVector);
        let s = run(&a, &[rp(1, 2), rp(2, 3), rp(3, 5)]);
        let v = s.vector().unwrap();
        assert_eq!(v.exponent_of(2), BigInt::from(1));
        assert_eq!(v.exponent_of(3), BigInt::zero());
        assert_eq!(v.exponent_of(5), BigInt::from(-1));
        assert_eq!(v.len(), 2); // the 3 cancelled and is not stored
    }

    #[test]
    fn early_exit_triggers_and_latches() {
        // b = 1: B = 2 and ceil(2 ln 2) = 2.
        assert_eq!(early_exit_count(1), 2);
        assert_eq!(early_exit_count(4), 45);
        let a = tpp(8, 1, TppMode::PrimeVector);
        let s = run(&a, &[rp(1, 2), rp(1, 2), rp(1, 2)]);
        assert!(s.early_exit());
        assert_eq!(s.small_factor_count(), 2); // latched: third step ignored
        assert!(a.decide(&s).unwrap());
    }

    #[test]
    fn ones_are_ignored() {
        let a = tpp(8, 2, TppMode::PrimeVector);
        let s0 = run(&a, &[rp(1, 2)]);
        let s1 = a.step(s0.clone(), &RationalProbability::one()).unwrap();
        assert_eq!(s0, s1);
    }

    #[test]
    fn decide_examples() {
        for mode in [TppMode::StoreAll, TppMode::PrimeVector] {
            let a = tpp(4, 3, mode);
            // product 2/7 is not strictly below the threshold 2/7
            let s = run(&a, &[rp(2, 7), rp(2, 3), rp(3, 7)]);
            assert!(!a.decide(&s).unwrap(), "{mode:?}");
            // 9/35 < 10/35
            let s = run(&a, &[rp(2, 7), rp(3, 5), rp(3, 7)]);
            assert!(a.decide(&s).unwrap(), "{mode:?}");
            // zero threshold: nothing is below zero
            let s = run(&a, &[RationalProbability::zero(), rp(1, 2)]);
            assert!(!a.decide(&s).unwrap(), "{mode:?}");
            // zero element with positive threshold
            let s = run(&a, &[rp(1, 2), RationalProbability::zero()]);
            assert!(a.decide(&s).unwrap(), "{mode:?}");
        }
    }

    #[test]
    fn decide_needs_threshold() {
        let a = tpp(4, 3, TppMode::StoreAll);
        let s = a.initial_state(&mut seeded_rng(0));
        assert!(matches!(a.decide(&s), Err(Error::MissingThreshold)));
    }

    #[test]
    fn space_report_examples() {
        let a = tpp(1, 1, TppMode::StoreAll);
        let s = run(&a, &[rp(1, 2), rp(1, 2)]);
        let r = a.space_report(&s);
        assert_eq!(r.store_all_formula_bits, 4); // 2 (n+1) b

        let a = tpp(4, 2, TppMode::PrimeVector);
        let r = a.space_report(&run(&a, &[rp(1, 2)]));
        assert_eq!(r.prime_count_bound, Some(2)); // pi(4)

        let a = tpp(4, 4, TppMode::PrimeVector);
        let r = a.space_report(&run(&a, &[rp(1, 2)]));
        assert_eq!(r.effective_length_cap, Some(45));
        assert_eq!(r.exponent_magnitude_bound, 16);
    }

    #[test]
    fn serialization_round_trips() {
        for mode in [TppMode::StoreAll, TppMode::PrimeVector] {
            let a = tpp(16, 5, mode);
            let mut rng = seeded_rng(4);
            for _ in 0..40 {
                let mut stream = vec![random_probability(&mut rng, 5, false)];
                stream.extend(random_stream(&mut rng, 5, 10, true));
                let s = run(&a, &stream);
                let back = a.deserialize_state(&a.serialize_state(&s)).unwrap();
                assert_eq!(back, s);
            }
        }
    }

    #[test]
    fn exponent_cap_forgets() {
        let params = StreamParameters::new(4, 3).unwrap();
        let a = TppAutomaton::with_exponent_cap(params, 0).unwrap();
        let s = run(&a, &[rp(2, 7), rp(2, 3)]);
        assert!(s.vector().unwrap().is_empty());
    }

    proptest! {
        // Vector homomorphism: factoring a product equals summing factors.
        #[test]
        fn factoring_is_homomorphic(n1 in 1u64..64, d1 in 1u64..64, n2 in 1u64..64, d2 in 1u64..64) {
            prop_assume!(n1 <= d1 && n2 <= d2);
            let q1 = rp(n1, d1);
            let q2 = rp(n2, d2);
            let product = q1.as_ratio() * q2.as_ratio();
            let mut sum = factor_over_primes(&q1, 6).unwrap();
            sum.add(&factor_over_primes(&q2, 6).unwrap());
            let direct = factor_over_primes(
                &RationalProbability::from_ratio(product).unwrap(),
                12,
            )
            .unwrap();
            prop_assert_eq!(sum, direct);
        }

        // Both modes agree with the exact oracle on random streams.
        #[test]
        fn modes_agree_with_oracle(seed in 0u64..400) {
            let mut rng = seeded_rng(seed);
            let threshold = random_probability(&mut rng, 4, true);
            let body = random_stream(&mut rng, 4, (seed % 9) as usize, true);
            let mut stream = vec![threshold.clone()];
            stream.extend(body.iter().cloned());
            let expected = threshold_oracle(&threshold, &body);
            for mode in [TppMode::StoreAll, TppMode::PrimeVector] {
                let a = tpp(16, 4, mode);
                let s = run(&a, &stream);
                prop_assert_eq!(a.decide(&s).unwrap(), expected);
                // Early exits must be sound whenever they fire.
                if s.early_exit() {
                    prop_assert!(expected);
                }
            }
        }
    }
}
