//! Fixed-length bit strings.
//!
//! A string `b_1 b_2 ... b_len` is packed into a `u64` with `b_1` in the most
//! significant of the `len` low bits. This is the same convention as statevector
//! indices (qubit 0 is the most significant bit), so the string `x` read off the
//! first `m` qubits of an `n`-qubit basis index `i` is simply `i >> (n - m)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_BITS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: u8,
    value: u64,
}

/// Mask with the `len` low bits set.
#[inline]
pub fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// The packed-bit position of index `j` in a string of length `len`.
#[inline]
pub fn bit_of(len: usize, j: usize) -> u64 {
    debug_assert!(j < len);
    1u64 << (len - 1 - j)
}

/// Parity of the inner product `a . b` modulo 2.
#[inline]
pub fn dot(a: u64, b: u64) -> u32 {
    (a & b).count_ones() & 1
}

/// `(-1)^{a.b}` as a float.
#[inline]
pub fn sign_of_dot(a: u64, b: u64) -> f64 {
    if dot(a, b) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Bits {
    pub fn new(len: usize, value: u64) -> Result<Self> {
        if len == 0 || len > MAX_BITS {
            return Err(Error::invalid(format!("bit-string length {len} not in 1..=64")));
        }
        if value & !low_mask(len) != 0 {
            return Err(Error::invalid(format!(
                "value {value:#x} does not fit in {len} bits"
            )));
        }
        Ok(Bits {
            len: len as u8,
            value,
        })
    }

    pub fn zeros(len: usize) -> Self {
        Bits::new(len, 0).expect("length checked by caller")
    }

    pub fn ones(len: usize) -> Self {
        Bits::new(len, low_mask(len)).expect("length checked by caller")
    }

    /// String with ones exactly at `positions` (0-based, index 0 first).
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut v = 0u64;
        for &p in positions {
            if p >= len {
                return Err(Error::invalid(format!("position {p} out of range for {len} bits")));
            }
            v |= bit_of(len, p);
        }
        Bits::new(len, v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        self.value & bit_of(self.len(), j) != 0
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.value.count_ones() as usize
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Indices `j` with `b_j = 1`, ascending.
    pub fn ones_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.get(j)).collect()
    }

    /// Pads to `n` bits by appending zeros on the right: `s` becomes `s 0^{n-len}`.
    pub fn extend_to(&self, n: usize) -> Result<Bits> {
        if n < self.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot extend a {}-bit string to {n} bits",
                self.len()
            )));
        }
        Bits::new(n, self.value << (n - self.len()))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_BITS {
            return Err(Error::invalid(format!("bit string {s:?} must have 1..=64 characters")));
        }
        let mut v = 0u64;
        for c in s.chars() {
            v = (v << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::invalid(format!("bad character {c:?} in bit string {s:?}"))),
                };
        }
        Bits::new(s.len(), v)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
