//! Streaming algorithms for products of rational probabilities.
//!
//! Everything is exact: stream elements are reduced fractions over unbounded
//! integers, approximation guarantees are verified by exact comparison, and
//! the floating point that does appear only ever supplies search hints that
//! are then certified (see [`dyadic`]).
//!
//! The crate provides
//!
//! * a product approximator maintaining a single bucket-index sum
//!   ([`streaming`]),
//! * threshold deciders, store-all and prime-exponent-vector, with the
//!   `ceil(B ln B)` early exit ([`threshold`]),
//! * sliding-window product approximation ([`window`]),
//! * generators for the adversarial instance families that force those
//!   algorithms to remember things ([`adversary`]), and
//! * a one-way communication-protocol simulator driving the automatons as
//!   Alice/Bob message machines ([`protocols`]).
//!
//! # Example
//!
//! ```
//! use num_rational::Ratio;
//! use probstream::sampling::seeded_rng;
//! use probstream::{
//!     exact_product, AppAutomaton, RationalProbability, StreamParameters,
//!     StreamingAutomaton,
//! };
//!
//! let params = StreamParameters::new(8, 4).unwrap();
//! let eps = Ratio::new(1u8.into(), 10u8.into());
//! let app = AppAutomaton::new(params, eps).unwrap();
//!
//! let stream: Vec<RationalProbability> = [(1, 2), (3, 5), (7, 16)]
//!     .into_iter()
//!     .map(|(r, s)| RationalProbability::from_u64(r, s).unwrap())
//!     .collect();
//! let mut state = app.initial_state(&mut seeded_rng(0));
//! for q in &stream {
//!     state = app.step(state, q).unwrap();
//! }
//!
//! // The output provably sits inside ((1-eps) P, P/(1-eps)).
//! let p = exact_product(&stream);
//! assert!(app.guarantee_holds(&state, p.numer(), p.denom()));
//! ```

pub mod adversary;
pub mod bits;
pub mod buckets;
pub mod dyadic;
pub mod error;
pub mod primes;
pub mod protocols;
pub mod rational;
pub mod sampling;
pub mod streaming;
pub mod threshold;
pub mod window;

pub use bits::Bits;
pub use buckets::{
    bucket_boundary, bucket_index, bucket_of_value, ApproxParams, BucketEngine, BucketIndex,
    Render, Rendered,
};
pub use error::{Error, Result};
pub use primes::PrimeTable;
pub use rational::{exact_product, Rational, RationalProbability, StreamParameters};
pub use streaming::{
    amplify, AmplifierConfig, AmplifierMode, AppAutomaton, ApproxOutput, StreamingAutomaton,
};
pub use threshold::{factor_over_primes, PrimeExponentVector, TppAutomaton, TppMode};
pub use window::{SwappAutomaton, SwappNaive};
