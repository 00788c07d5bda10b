//! Little-endian bit strings.
//!
//! Qubit 1 is the least significant bit of a basis index, and every public
//! qubit index in this crate is 1-based. A [`BitStr`] renders with qubit 1
//! as the rightmost character, so `X` on qubit 2 of a 4-qubit zero state
//! reads `0010`.

use std::fmt;

use crate::error::{Error, Result};

/// Widest representable bit string.
pub const MAX_BITS: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitStr {
    value: u64,
    nbits: usize,
}

impl BitStr {
    pub fn new(value: u64, nbits: usize) -> Result<Self> {
        if nbits == 0 || nbits > MAX_BITS {
            return Err(Error::validation(format!(
                "bit string width {nbits} outside 1..={MAX_BITS}"
            )));
        }
        if value >> nbits != 0 {
            return Err(Error::validation(format!(
                "value {value} does not fit in {nbits} bits"
            )));
        }
        Ok(BitStr { value, nbits })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    /// Bit of qubit `i` (1-based).
    pub fn bit_at(&self, i: usize) -> Result<u8> {
        if i == 0 || i > self.nbits {
            return Err(Error::Range {
                what: "qubit",
                index: i,
                max: self.nbits,
            });
        }
        Ok(((self.value >> (i - 1)) & 1) as u8)
    }

    /// Bits ordered qubit 1 first.
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.nbits)
            .map(|k| ((self.value >> k) & 1) as u8)
            .collect()
    }

    /// Inverse of [`BitStr::to_bits`].
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::validation("empty bit list"));
        }
        let mut value = 0u64;
        for (k, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => value |= 1 << k,
                other => {
                    return Err(Error::validation(format!(
                        "entry {} is {other}, expected 0 or 1",
                        k + 1
                    )))
                }
            }
        }
        BitStr::new(value, bits.len())
    }

    /// Parses a binary literal written with qubit 1 rightmost, e.g. `"0010"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars().rev() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                '_' => {}
                other => {
                    return Err(Error::validation(format!(
                        "invalid character {other:?} in bit string"
                    )))
                }
            }
        }
        BitStr::from_bits(&bits)
    }

    /// Plain binary digits, qubit 1 rightmost.
    pub fn to_binary_string(&self) -> String {
        (0..self.nbits)
            .rev()
            .map(|k| if (self.value >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for BitStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (2)", self.to_binary_string())
    }
}

/// Checks whether basis `index` satisfies the control pattern. Locations are
/// 1-based, config entries are 1 for a normal control and 0 for an inverse one.
pub fn ctrl_match(index: u64, ctrl_locs: &[usize], ctrl_config: &[u8]) -> Result<bool> {
    if ctrl_locs.len() != ctrl_config.len() {
        return Err(Error::validation(format!(
            "{} control locations but {} config entries",
            ctrl_locs.len(),
            ctrl_config.len()
        )));
    }
    let (mask, want) = ctrl_masks(ctrl_locs, ctrl_config)?;
    Ok(index & mask == want)
}

/// Packs 1-based control locations into a (mask, expected value) pair.
pub(crate) fn ctrl_masks(ctrl_locs: &[usize], ctrl_config: &[u8]) -> Result<(u64, u64)> {
    let mut mask = 0u64;
    let mut want = 0u64;
    for (&loc, &cfg) in ctrl_locs.iter().zip(ctrl_config) {
        if loc == 0 || loc > MAX_BITS {
            return Err(Error::Range {
                what: "control",
                index: loc,
                max: MAX_BITS,
            });
        }
        let bit = 1u64 << (loc - 1);
        if mask & bit != 0 {
            return Err(Error::validation(format!("duplicate control location {loc}")));
        }
        mask |= bit;
        match cfg {
            0 => {}
            1 => want |= bit,
            other => {
                return Err(Error::validation(format!(
                    "control config {other} is not 0 or 1"
                )))
            }
        }
    }
    Ok((mask, want))
}

/// Gathers the bits of `index` at 0-based `positions` into a compact integer,
/// `positions[0]` becoming bit 0.
#[inline]
pub(crate) fn extract_bits(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &p)| acc | (((index >> p) & 1) << k))
}

/// Inverse of [`extract_bits`]: scatters the low bits of `compact` onto `positions`.
#[inline]
pub(crate) fn deposit_bits(compact: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &p)| acc | (((compact >> k) & 1) << p))
}

/// Spreads `j` over the bit positions not in `fixed` (which must be sorted
/// ascending): zero bits are inserted at every fixed position.
#[inline]
pub(crate) fn insert_zero_bits(mut j: usize, fixed_sorted: &[usize]) -> usize {
    for &p in fixed_sorted {
        let low = j & ((1usize << p) - 1);
        j = ((j >> p) << (p + 1)) | low;
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_at_examples() {
        let b = BitStr::new(0b0010, 4).unwrap();
        assert_eq!(b.bit_at(2).unwrap(), 1);
        assert_eq!(BitStr::new(0, 4).unwrap().bit_at(1).unwrap(), 0);
        assert_eq!(BitStr::new(0b1011, 4).unwrap().bit_at(4).unwrap(), 1);
        assert!(matches!(b.bit_at(5), Err(Error::Range { .. })));
        assert!(matches!(b.bit_at(0), Err(Error::Range { .. })));
    }

    #[test]
    fn to_bits_is_little_endian() {
        assert_eq!(BitStr::new(0b0010, 4).unwrap().to_bits(), vec![0, 1, 0, 0]);
        assert_eq!(BitStr::new(0, 4).unwrap().to_bits(), vec![0, 0, 0, 0]);
        assert_eq!(BitStr::new(0b1111, 4).unwrap().to_bits(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn from_bits_examples() {
        assert_eq!(
            BitStr::from_bits(&[0, 1, 0, 0]).unwrap(),
            BitStr::new(0b0010, 4).unwrap()
        );
        assert_eq!(BitStr::from_bits(&[1]).unwrap(), BitStr::new(1, 1).unwrap());
        let b = BitStr::from_bits(&[1, 0, 1]).unwrap();
        assert_eq!((b.value(), b.nbits()), (5, 3));
        assert!(BitStr::from_bits(&[0, 2]).is_err());
        assert!(BitStr::from_bits(&[]).is_err());
    }

    #[test]
    fn width_limits() {
        assert!(BitStr::new(0, 0).is_err());
        assert!(BitStr::new(0, 64).is_err());
        assert!(BitStr::new(16, 4).is_err());
        assert!(BitStr::new(u64::MAX >> 1, 63).is_ok());
    }

    #[test]
    fn rendering() {
        let b = BitStr::new(0b0010, 4).unwrap();
        assert_eq!(b.to_binary_string(), "0010");
        assert_eq!(b.to_string(), "0010 (2)");
        assert_eq!(BitStr::parse("1010").unwrap().value(), 10);
    }

    #[test]
    fn ctrl_match_examples() {
        assert!(ctrl_match(2, &[2], &[1]).unwrap());
        assert!(ctrl_match(0, &[1], &[0]).unwrap());
        assert!(!ctrl_match(0, &[1], &[1]).unwrap());
        assert!(ctrl_match(123, &[], &[]).unwrap());
        assert!(ctrl_match(0, &[1, 2], &[1]).is_err());
        assert!(ctrl_match(0, &[1, 1], &[1, 1]).is_err());
    }

    #[test]
    fn bit_helpers_round_trip() {
        let pos = [3usize, 0, 5];
        for c in 0..8 {
            assert_eq!(extract_bits(deposit_bits(c, &pos), &pos), c);
        }
        // inserting zeros at 1 and 3: j = 0b11 -> 0b0101
        assert_eq!(insert_zero_bits(0b11, &[1, 3]), 0b0101);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip(nbits in 1usize..=MAX_BITS, raw in any::<u64>()) {
                let value = raw & ((1u64 << nbits) - 1);
                let b = BitStr::new(value, nbits).unwrap();
                prop_assert_eq!(BitStr::from_bits(&b.to_bits()).unwrap(), b);
                let sum: u64 = b.to_bits().iter().enumerate().map(|(i, &x)| (x as u64) << i).sum();
                prop_assert_eq!(sum, value);
                prop_assert_eq!(BitStr::parse(&b.to_binary_string()).unwrap(), b);
            }
        }
    }
}
