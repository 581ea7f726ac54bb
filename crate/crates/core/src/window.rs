//! Sliding-window product approximation: a ring of the last `m` bucket
//! indices plus their running sum, and the store-everything baseline.
//!
//! The window is implicitly padded with ones before the stream starts, so
//! the buffer always holds exactly `m` slots.  Zero elements cannot live in
//! a bucket; they are tracked positionally and force the output to exactly
//! zero until they fall out of the window.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::RngCore;

use crate::bits::Bits;
use crate::buckets::{bucket_boundary, ApproxParams, BucketEngine, Render, Rendered};
use crate::error::{Error, Result};
use crate::rational::{ceil_log2_ratio, exact_product, Rational, RationalProbability};
use crate::streaming::{band_check, ApproxOutput, StreamingAutomaton};

/// One window slot: a zero element or a bucket index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Zero,
    Index(u64),
}

/// Ring buffer of exactly `m` slots (oldest first) plus the sum of the
/// non-zero slots' indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowState {
    slots: VecDeque<Slot>,
    index_sum: BigUint,
}

impl WindowState {
    pub fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.slots.iter()
    }

    pub fn index_sum(&self) -> &BigUint {
        &self.index_sum
    }

    pub fn has_zero(&self) -> bool {
        self.slots.iter().any(|s| matches!(s, Slot::Zero))
    }
}

/// Bucket-index sliding-window approximator with per-element base
/// `1 - eps/m`.
pub struct SwappAutomaton {
    m: u64,
    b: u64,
    eps: ApproxParams,
    engine: BucketEngine,
    slot_width: u64,
}

impl SwappAutomaton {
    pub fn new(m: u64, b: u64, eps: Rational) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("window size must be positive".into()));
        }
        if b == 0 {
            return Err(Error::Precondition("bit budget must be positive".into()));
        }
        let eps = ApproxParams::new(eps, m)?;
        let bound = eps.per_element_index_bound(b);
        let hint = (bound.numer() / bound.denom())
            .to_u64()
            .unwrap_or(u64::MAX / 2);
        let engine = BucketEngine::new(eps.base().clone(), hint.saturating_add(2))?;
        // Fixed per-slot width: ceil(log2(m b / eps)) + 1 bits; the all-ones
        // pattern is reserved for the zero marker and no legal index reaches
        // it.
        let slot_width = (ceil_log2_ratio(
            &(eps.eps().denom() * m * b),
            eps.eps().numer(),
        )
        .max(1) as u64)
            + 1;
        if slot_width > 62 {
            return Err(Error::Unsupported(format!(
                "per-slot width of {slot_width} bits is beyond the supported range"
            )));
        }
        Ok(Self {
            m,
            b,
            eps,
            engine,
            slot_width,
        })
    }

    pub fn window_size(&self) -> u64 {
        self.m
    }

    pub fn max_bits(&self) -> u64 {
        self.b
    }

    pub fn eps(&self) -> &ApproxParams {
        &self.eps
    }

    pub fn base(&self) -> &Rational {
        self.eps.base()
    }

    pub fn slot_width(&self) -> u64 {
        self.slot_width
    }

    fn zero_sentinel(&self) -> u64 {
        (1u64 << self.slot_width) - 1
    }

    pub fn render_output(&self, state: &WindowState, mode: Render) -> Result<Rendered> {
        if state.has_zero() {
            return Ok(match mode {
                Render::Exact => Rendered::Exact(Rational::zero()),
                Render::Decimal(_) => Rendered::Decimal("0".into()),
            });
        }
        bucket_boundary(&state.index_sum, self.eps.base(), mode)
    }

    /// Exact verdict of the windowed guarantee against the exact window
    /// product `w_num/w_den`.
    pub fn guarantee_holds(&self, state: &WindowState, w_num: &BigUint, w_den: &BigUint) -> bool {
        band_check(
            &self.engine,
            self.eps.eps(),
            &state.index_sum,
            state.has_zero(),
            w_num,
            w_den,
        )
    }

    pub fn space_report(&self, state: &WindowState) -> SwappSpaceReport {
        SwappSpaceReport {
            actual_state_bits: self.serialize_state(state).len() as u64,
            slot_width_bits: self.slot_width,
            encoded_bound_bits: self.m * self.slot_width,
            per_slot_index_bound: self.eps.per_element_index_bound(self.b),
            naive_formula_bits: 2 * self.m * self.b,
        }
    }
}

/// Space accounting of a window run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwappSpaceReport {
    pub actual_state_bits: u64,
    pub slot_width_bits: u64,
    /// `m * (ceil(log2(m b / eps)) + 1)`, the fixed-width encoding bound.
    pub encoded_bound_bits: u64,
    pub per_slot_index_bound: Rational,
    /// `2 m b`: the trivial store-the-window bound.
    pub naive_formula_bits: u64,
}

impl StreamingAutomaton for SwappAutomaton {
    type State = WindowState;
    type Output = ApproxOutput;

    fn initial_state(&self, _rng: &mut dyn RngCore) -> Self::State {
        WindowState {
            slots: std::iter::repeat_n(Slot::Index(0), self.m as usize).collect(),
            index_sum: BigUint::zero(),
        }
    }

    fn step(&self, mut state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        let got = q.bit_size();
        if got > self.b {
            return Err(Error::OversizedElement { got, limit: self.b });
        }
        let incoming = if q.is_zero() {
            Slot::Zero
        } else {
            Slot::Index(self.engine.index_of(q.numer(), q.denom())?)
        };
        let evicted = state.slots.pop_front().expect("window is never empty");
        if let Slot::Index(i) = evicted {
            state.index_sum -= i;
        }
        if let Slot::Index(i) = incoming {
            state.index_sum += i;
        }
        state.slots.push_back(incoming);
        Ok(state)
    }

    fn output(&self, state: &Self::State) -> Result<Self::Output> {
        Ok(if state.has_zero() {
            ApproxOutput::Zero
        } else {
            ApproxOutput::Power {
                index_sum: state.index_sum.clone(),
            }
        })
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        // Exactly m fixed-width slots; the running sum is derived data.
        let mut bits = Bits::new();
        for slot in &state.slots {
            let v = match slot {
                Slot::Zero => self.zero_sentinel(),
                Slot::Index(i) => {
                    debug_assert!(*i < self.zero_sentinel());
                    *i
                }
            };
            bits.push_fixed_u64(v, self.slot_width);
        }
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let mut slots = VecDeque::with_capacity(self.m as usize);
        let mut index_sum = BigUint::zero();
        for _ in 0..self.m {
            let v = r.read_fixed_u64(self.slot_width)?;
            if v == self.zero_sentinel() {
                slots.push_back(Slot::Zero);
            } else {
                index_sum += v;
                slots.push_back(Slot::Index(v));
            }
        }
        Ok(WindowState { slots, index_sum })
    }
}

/// Store-the-window baseline: remembers the last `m` elements verbatim and
/// outputs their exact product.
pub struct SwappNaive {
    m: u64,
    b: u64,
}

impl SwappNaive {
    pub fn new(m: u64, b: u64) -> Result<Self> {
        if m == 0 || b == 0 {
            return Err(Error::Precondition(
                "window size and bit budget must be positive".into(),
            ));
        }
        Ok(Self { m, b })
    }

    /// `2 m b`: two `b`-bit integers per window element.
    pub fn formula_bits(&self) -> u64 {
        2 * self.m * self.b
    }
}

impl StreamingAutomaton for SwappNaive {
    type State = VecDeque<RationalProbability>;
    type Output = Rational;

    fn initial_state(&self, _rng: &mut dyn RngCore) -> Self::State {
        std::iter::repeat_n(RationalProbability::one(), self.m as usize).collect()
    }

    fn step(&self, mut state: Self::State, q: &RationalProbability) -> Result<Self::State> {
        let got = q.bit_size();
        if got > self.b {
            return Err(Error::OversizedElement { got, limit: self.b });
        }
        state.pop_front();
        state.push_back(q.clone());
        Ok(state)
    }

    fn output(&self, state: &Self::State) -> Result<Rational> {
        Ok(exact_product(state.iter()))
    }

    fn serialize_state(&self, state: &Self::State) -> Bits {
        let mut bits = Bits::new();
        for q in state {
            bits.push_fixed(q.numer(), self.b);
            bits.push_fixed(&(q.denom() - 1u8), self.b);
        }
        bits
    }

    fn deserialize_state(&self, bits: &Bits) -> Result<Self::State> {
        let mut r = bits.reader();
        let mut state = VecDeque::with_capacity(self.m as usize);
        for _ in 0..self.m {
            let numer = r.read_fixed(self.b)?;
            let denom = r.read_fixed(self.b)? + 1u8;
            state.push_back(RationalProbability::new(numer, denom)?);
        }
        Ok(state)
    }
}

/// Exact product of the last `m` elements of `stream` (implicit one
/// padding): the windowed oracle.
pub fn window_product(stream: &[RationalProbability], m: u64) -> Rational {
    let start = stream.len().saturating_sub(m as usize);
    exact_product(&stream[start..])
}
