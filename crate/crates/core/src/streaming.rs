//! The streaming-automaton abstraction, the product-approximation automaton
//! and the error-amplification wrapper.
//!
//! A streaming automaton is a family member for one declared slice of
//! inputs: it owns an initial state, a transition on one element, an output
//! function, and an injective serialization of its memory state.  The
//! serialization is what the space reports meter and what the protocol
//! simulator ships from Alice to Bob.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;

use crate::bits::Bits;
use crate::buckets::{bucket_boundary, ApproxParams, BucketEngine, Render, Rendered};
use crate::error::{Error, Result};
use crate::rational::{ceil_log2_ratio, Rational, RationalProbability, StreamParameters};

/// One member of a streaming-algorithm family.
///
/// Deterministic automatons ignore the random source; randomized ones must
/// draw all their randomness from it at initialization or inside `step`,
/// never from ambient state.
pub trait StreamingAutomaton {
    type State: Clone;
    type Output;

    fn initial_state(&self, rng: &mut dyn RngCore) -> Self::State;

    /// Consume one element, returning the successor state.
    fn step(&self, state: Self::State, q: &RationalProbability) -> Result<Self::State>;

    fn output(&self, state: &Self::State) -> Result<Self::Output>;

    /// Injective encoding of the memory state.  Bookkeeping that only guards
    /// preconditions (for example a consumed-element counter) is not part of
    /// the memory state and is not encoded.
    fn serialize_state(&self, state: &Self::State) -> Bits;

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State>;
}

/// Fold a whole stream from the initial state.
pub fn run_stream<'a, A, I>(automaton: &A, rng: &mut dyn RngCore, stream: I) -> Result<A::State>
where
    A: StreamingAutomaton,
    I: IntoIterator<Item = &'a RationalProbability>,
{
    let mut state = automaton.initial_state(rng);
    for q in stream {
        state = automaton.step(state, q)?;
    }
    Ok(state)
}

/// Continue an existing state over more elements.
pub fn continue_stream<'a, A, I>(automaton: &A, state: A::State, stream: I) -> Result<A::State>
where
    A: StreamingAutomaton,
    I: IntoIterator<Item = &'a RationalProbability>,
{
    let mut state = state;
    for q in stream {
        state = automaton.step(state, q)?;
    }
    Ok(state)
}

/// Output of the product approximators: either an exactly-zero product was
/// seen, or the value `base^index_sum`.
///
/// Ordered by the value it denotes (larger exponent means smaller value);
/// only outputs of the same automaton are comparable meaningfully.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxOutput {
    Zero,
    Power { index_sum: BigUint },
}

impl ApproxOutput {
    pub fn index_sum(&self) -> Option<&BigUint> {
        match self {
            ApproxOutput::Zero => None,
            ApproxOutput::Power { index_sum } => Some(index_sum),
        }
    }
}

impl Ord for ApproxOutput {
    fn cmp(&self, other: &Self) -> Ordering {
        use ApproxOutput::*;
        match (self, other) {
            (Zero, Zero) => Ordering::Equal,
            (Zero, Power { .. }) => Ordering::Less,
            (Power { .. }, Zero) => Ordering::Greater,
            (Power { index_sum: a }, Power { index_sum: b }) => b.cmp(a),
        }
    }
}

impl PartialOrd for ApproxOutput {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Streaming state of the product approximator: the running bucket-index
/// sum, a zero flag, and the consumed-element count (precondition
/// bookkeeping, excluded from the space accounting).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductApproxState {
    index_sum: BigUint,
    count: u64,
    saw_zero: bool,
}

impl ProductApproxState {
    pub fn index_sum(&self) -> &BigUint {
        &self.index_sum
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn saw_zero(&self) -> bool {
        self.saw_zero
    }
}

/// Deterministic product approximation within the multiplicative band
/// `((1-eps) P, P / (1-eps))`.
///
/// Each element contributes its bucket index under the base `1 - eps/n`;
/// only the running index sum is remembered.
pub struct AppAutomaton {
    params: StreamParameters,
    eps: ApproxParams,
    engine: BucketEngine,
}

impl AppAutomaton {
    /// Requires `0 < eps < 1/2`.
    pub fn new(params: StreamParameters, eps: Rational) -> Result<Self> {
        let eps = ApproxParams::new(eps, params.max_len())?;
        let bound = eps.per_element_index_bound(params.max_bits());
        let hint = (bound.numer() / bound.denom())
            .to_u64()
            .unwrap_or(u64::MAX / 2);
        let engine = BucketEngine::new(eps.base().clone(), hint.saturating_add(2))?;
        Ok(Self {
            params,
            eps,
            engine,
        })
    }

    pub fn params(&self) -> &StreamParameters {
        &self.params
    }

    pub fn eps(&self) -> &ApproxParams {
        &self.eps
    }

    pub fn base(&self) -> &Rational {
        self.eps.base()
    }

    /// Bucket index this automaton assigns to a single nonzero element.
    pub fn element_index(&self, q: &RationalProbability) -> Result<u64> {
        self.engine.index_of(q.numer(), q.denom())
    }

    /// Render the output value exactly (subject to the blow-up cap) or as a
    /// rounded decimal.
    pub fn render_output(&self, state: &ProductApproxState, mode: Render) -> Result<Rendered> {
        if state.saw_zero {
            return Ok(match mode {
                Render::Exact => Rendered::Exact(Rational::zero()),
                Render::Decimal(_) => Rendered::Decimal("0".into()),
            });
        }
        bucket_boundary(&state.index_sum, self.eps.base(), mode)
    }

    /// Exact verdict of the approximation guarantee
    /// `(1-eps) P < base^sum < P / (1-eps)` against an exact product
    /// `p_num/p_den > 0` (need not be reduced).
    pub fn guarantee_holds(
        &self,
        state: &ProductApproxState,
        p_num: &BigUint,
        p_den: &BigUint,
    ) -> bool {
        band_check(
            &self.engine,
            self.eps.eps(),
            &state.index_sum,
            state.saw_zero,
            p_num,
            p_den,
        )
    }

    /// Space accounting: actual serialized bits against the formula bound
    /// `ceil(2 log2 n + log2 b - log2 eps)` and the exact index bounds.
    pub fn space_report(&self, state: &ProductApproxState) -> AppSpaceReport {
        let n = self.params.max_len();
        let b = self.params.max_bits();
        let eps = self.eps.eps();
        let formula = ceil_log2_ratio(&(eps.denom() * n * n * b), eps.numer()).max(0) as u64;
        AppSpaceReport {
            actual_state_bits: self.serialize_state(state).len() as u64,
            index_sum_bits: state.index_sum.bits(),
            formula_bound_bits: formula,
            per_element_index_bound: self.eps.per_element_index_bound(b),
            state_sum_bound: self.eps.state_sum_bound(b),
        }
    }
}

/// Shared band check: `(1-eps) P < base^sum < P / (1-eps)`, all exact.
pub(crate) fn band_check(
    engine: &BucketEngine,
    eps: &Rational,
    index_sum: &BigUint,
    saw_zero: bool,
    p_num: &BigUint,
    p_den: &BigUint,
) -> bool {
    if saw_zero || p_num.is_zero() {
        // Zero admits no multiplicative approximation other than itself.
        return saw_zero && p_num.is_zero();
    }
    let one_minus_num = eps.denom() - eps.numer();
    let one_minus_den = eps.denom();
    // lower bound: base^sum > (1-eps) P  <=>  base^sum > (dn-en) p_num / (dn p_den)
    let lo_num = &one_minus_num * p_num;
    let lo_den = one_minus_den * p_den;
    if engine.cmp_pow_big(index_sum, &lo_num, &lo_den) != Ordering::Greater {
        return false;
    }
    // upper bound: base^sum < P / (1-eps)  <=>  < dn p_num / ((dn-en) p_den)
    let hi_num = one_minus_den * p_num;
    let hi_den = &one_minus_num * p_den;
    engine.cmp_pow_big(index_sum, &hi_num, &hi_den) == Ordering::Less
}

/// Space report of one product-approximation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppSpaceReport {
    pub actual_state_bits: u64,
    pub index_sum_bits: u64,
    pub formula_bound_bits: u64,
    pub per_element_index_bound: Rational,
    pub state_sum_bound: Rational,
}

impl StreamingAutomaton for AppAutomaton {
    type State = ProductApproxState;
    type Output = ApproxOutput;

    fn initial_state(&self, _rng: &mut dyn RngCore) -> Self::State {
        ProductApproxState {
            index_sum: BigUint::zero(),
            count: 0,
            saw_zero: false,
        }
    }

    fn step(&self, mut state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        if state.count >= self.params.max_len() {
            return Err(Error::StreamOverflow {
                n: self.params.max_len(),
            });
        }
        self.params.check_element(q)?;
        if q.is_zero() {
            state.saw_zero = true;
        } else {
            let idx = self.engine.index_of(q.numer(), q.denom())?;
            state.index_sum += idx;
        }
        state.count += 1;
        Ok(state)
    }

    fn output(&self, state: &Self::State) -> Result<Self::Output> {
        Ok(if state.saw_zero {
            ApproxOutput::Zero
        } else {
            ApproxOutput::Power {
                index_sum: state.index_sum.clone(),
            }
        })
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        // One zero-flag bit plus the index sum in minimal binary; the count
        // is precondition bookkeeping, not memory state.
        let mut bits = Bits::new();
        bits.push_bit(state.saw_zero);
        bits.push_fixed(&state.index_sum, state.index_sum.bits());
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let saw_zero = r.read_bit()?;
        let width = r.remaining() as u64;
        let index_sum = r.read_fixed(width)?;
        if index_sum.bits() != width {
            return Err(Error::MalformedState(
                "index sum has leading zeros".into(),
            ));
        }
        Ok(ProductApproxState {
            index_sum,
            count: 0,
            saw_zero,
        })
    }
}

/// Median or majority selection over independent copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplifierMode {
    /// Median of totally ordered outputs.
    Median,
    /// Majority of boolean outputs; over an odd copy count this is the
    /// median of the sorted outputs, so both modes share one mechanism.
    Majority,
}

/// Configuration of the error amplifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplifierConfig {
    pub copies: usize,
    pub mode: AmplifierMode,
    /// Documentation of the targeted residual error; not consumed anywhere.
    pub target_error: Option<Rational>,
}

impl AmplifierConfig {
    pub fn median(copies: usize) -> Self {
        Self {
            copies,
            mode: AmplifierMode::Median,
            target_error: None,
        }
    }

    pub fn majority(copies: usize) -> Self {
        Self {
            copies,
            mode: AmplifierMode::Majority,
            target_error: None,
        }
    }
}

/// Wrap an automaton in `copies` independent instances; the output is the
/// median (for booleans: the majority) of the instance outputs.
pub struct Amplifier<A> {
    inner: A,
    cfg: AmplifierConfig,
}

/// Build the composite automaton; the copy count must be odd.
pub fn amplify<A: StreamingAutomaton>(inner: A, cfg: AmplifierConfig) -> Result<Amplifier<A>> {
    if cfg.copies == 0 || cfg.copies % 2 == 0 {
        return Err(Error::EvenCopies(cfg.copies));
    }
    Ok(Amplifier { inner, cfg })
}

impl<A> Amplifier<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn config(&self) -> &AmplifierConfig {
        &self.cfg
    }
}

impl<A> StreamingAutomaton for Amplifier<A>
where
    A: StreamingAutomaton,
    A::Output: Ord,
{
    type State = Vec<A::State>;
    type Output = A::Output;

    fn initial_state(&self, rng: &mut dyn RngCore) -> Self::State {
        // Sequential draws from one injected source give each copy its own
        // independent randomness.
        (0..self.cfg.copies)
            .map(|_| self.inner.initial_state(rng))
            .collect()
    }

    fn step(&self, state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        state
            .into_iter()
            .map(|s| self.inner.step(s, q))
            .collect()
    }

    fn output(&self, state: &Self::State) -> Result<Self::Output> {
        let mut outputs = state
            .iter()
            .map(|s| self.inner.output(s))
            .collect::<Result<Vec<_>>>()?;
        outputs.sort();
        let mid = outputs.len() / 2;
        Ok(outputs.swap_remove(mid))
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        let mut bits = Bits::new();
        for s in state {
            let inner = self.inner.serialize_state(s);
            bits.push_fixed_u64(inner.len() as u64, 32);
            let mut r = inner.reader();
            for _ in 0..inner.len() {
                bits.push_bit(r.read_bit().expect("in range"));
            }
        }
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let mut state = Vec::with_capacity(self.cfg.copies);
        for _ in 0..self.cfg.copies {
            let len = r.read_fixed_u64(32)?;
            let mut inner = Bits::new();
            for _ in 0..len {
                inner.push_bit(r.read_bit()?);
            }
            state.push(self.inner.deserialize_state(&inner)?);
        }
        Ok(state)
    }
}

/// Fault injection for exercising the amplifier: flips the wrapped boolean
/// automaton's output for the whole run with probability
/// `error_num / error_den`, drawn once at initialization from the injected
/// source.
pub struct FaultInjector<A> {
    inner: A,
    error_num: u32,
    error_den: u32,
}

impl<A> FaultInjector<A> {
    pub fn new(inner: A, error_num: u32, error_den: u32) -> Self {
        assert!(error_den > 0 && error_num <= error_den);
        Self {
            inner,
            error_num,
            error_den,
        }
    }
}

impl<A> StreamingAutomaton for FaultInjector<A>
where
    A: StreamingAutomaton<Output = bool>,
{
    type State = (A::State, bool);
    type Output = bool;

    fn initial_state(&self, rng: &mut dyn RngCore) -> Self::State {
        use rand::Rng;
        let lie = rng.random_range(0..self.error_den) < self.error_num;
        (self.inner.initial_state(rng), lie)
    }

    fn step(&self, state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        let (s, lie) = state;
        Ok((self.inner.step(s, q)?, lie))
    }

    fn output(&self, state: &Self::State) -> Result<bool> {
        Ok(self.inner.output(&state.0)? ^ state.1)
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        let mut bits = Bits::new();
        bits.push_bit(state.1);
        let inner = self.inner.serialize_state(&state.0);
        let mut r = inner.reader();
        for _ in 0..inner.len() {
            bits.push_bit(r.read_bit().expect("in range"));
        }
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let lie = r.read_bit()?;
        let mut inner = Bits::new();
        for _ in 0..r.remaining() {
            inner.push_bit(r.read_bit()?);
        }
        Ok((self.inner.deserialize_state(&inner)?, lie))
    }
}
