//! Bitstring representation shared by encoders, decoders, and samplers.
//!
//! A bitstring over `len` binary variables is stored as the `len` low bits
//! of a `u64`. Variable `i` is bit `i`, i.e. the least significant bit of a
//! basis-state index is variable 0. The canonical string form lists variable
//! 0 first, so `Bits { value: 0b01, len: 2 }` displays as `"10"`.

use std::fmt;

use crate::{Error, Result};

/// A fixed-length bitstring (at most 64 variables).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    pub value: u64,
    pub len: usize,
}

impl Bits {
    pub fn new(value: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Bits { value: value & mask, len }
    }

    /// Value of variable `i` as 0 or 1.
    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        ((self.value >> i) & 1) as u8
    }

    /// Spin value of variable `i` under `b = (1 - z) / 2`: bit 0 -> +1.
    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        1 - 2 * self.bit(i) as i8
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.bit(i) == 1)
    }

    /// Parses a canonical bitstring ('0'/'1' characters, variable 0 first)
    /// and checks it against an expected variable count.
    pub fn parse(s: &str, expected_len: usize) -> Result<Self> {
        if s.len() != expected_len {
            return Err(Error::BitLength { expected: expected_len, got: s.len() });
        }
        if expected_len > 64 {
            return Err(Error::InvalidBits(format!("{expected_len} variables exceed 64")));
        }
        let mut value = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => value |= 1u64 << i,
                '0' => {}
                other => return Err(Error::InvalidBits(format!("unexpected character {other:?}"))),
            }
        }
        Ok(Bits { value, len: expected_len })
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}
