//! A growable bit string used for state serialization and message-size
//! accounting.
//!
//! The space reports and protocol costs in this crate count bits, not bytes,
//! so serialized states are built bit by bit.  Encodings write either
//! fixed-width fields or minimal (no leading zero) binary with an explicit
//! length prefix, which keeps every encoding self-delimiting.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Bit string with MSB-first write/read order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    bits: Vec<bool>,
}

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Append `value` in exactly `width` bits, most significant first.
    pub fn push_fixed(&mut self, value: &BigUint, width: u64) {
        debug_assert!(value.bits() <= width, "value does not fit in width");
        for i in (0..width).rev() {
            self.bits.push(value.bit(i));
        }
    }

    pub fn push_fixed_u64(&mut self, value: u64, width: u64) {
        self.push_fixed(&BigUint::from(value), width);
    }

    /// Append `value` in minimal binary (zero takes zero bits) behind a
    /// 7-bit prefix holding the bit length.  Values up to 127 bits long.
    pub fn push_minimal(&mut self, value: &BigUint) {
        let width = value.bits();
        debug_assert!(width < 128, "minimal encoding limited to 127-bit values");
        self.push_fixed_u64(width, 7);
        self.push_fixed(value, width);
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    /// Raw bit length of the minimal binary encoding of `value`, without
    /// any framing.  This is the quantity the space reports count.
    pub fn minimal_len(value: &BigUint) -> u64 {
        value.bits()
    }
}

/// Sequential reader over a [`Bits`] buffer.
pub struct BitReader<'a> {
    bits: &'a Bits,
    pos: usize,
}

impl BitReader<'_> {
    pub fn read_bit(&mut self) -> Result<bool> {
        let b = self
            .bits
            .bits
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::MalformedState("unexpected end of bits".into()))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_fixed(&mut self, width: u64) -> Result<BigUint> {
        let mut v = BigUint::zero();
        for _ in 0..width {
            v <<= 1u8;
            if self.read_bit()? {
                v += 1u8;
            }
        }
        Ok(v)
    }

    pub fn read_fixed_u64(&mut self, width: u64) -> Result<u64> {
        debug_assert!(width <= 64);
        let v = self.read_fixed(width)?;
        v.try_into()
            .map_err(|_| Error::MalformedState("field overflows u64".into()))
    }

    pub fn read_minimal(&mut self) -> Result<BigUint> {
        let width = self.read_fixed_u64(7)?;
        self.read_fixed(width)
    }

    pub fn remaining(&self) -> usize {
        self.bits.bits.len() - self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_round_trip() {
        let mut b = Bits::new();
        b.push_fixed_u64(5, 3);
        b.push_fixed_u64(0, 4);
        b.push_fixed_u64(u64::MAX, 64);
        assert_eq!(b.len(), 71);
        let mut r = b.reader();
        assert_eq!(r.read_fixed_u64(3).unwrap(), 5);
        assert_eq!(r.read_fixed_u64(4).unwrap(), 0);
        assert_eq!(r.read_fixed_u64(64).unwrap(), u64::MAX);
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn minimal_round_trip() {
        for v in [0u64, 1, 2, 4, 5, 554_200, u64::MAX] {
            let mut b = Bits::new();
            b.push_minimal(&BigUint::from(v));
            let got = b.reader().read_minimal().unwrap();
            assert_eq!(got, BigUint::from(v));
        }
    }

    #[test]
    fn minimal_is_injective_on_values() {
        // Distinct values produce distinct bit strings even without framing,
        // because the length is part of the identity.
        let mut seen = std::collections::HashSet::new();
        for v in 0u64..200 {
            let mut b = Bits::new();
            b.push_fixed(&BigUint::from(v), BigUint::from(v).bits());
            b.push_bit(false);
            assert!(seen.insert(b.bits.clone()), "collision at {v}");
        }
    }

    #[test]
    fn truncated_read_errors() {
        let mut b = Bits::new();
        b.push_fixed_u64(3, 2);
        let mut r = b.reader();
        assert!(r.read_fixed_u64(3).is_err());
    }
}
