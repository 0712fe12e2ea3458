use std::fmt;

use rand::Rng;

use super::window::{Window, MAX_WINDOW_POINTS};
use crate::error::{Error, Result};

/// Characteristic function of a W-operator: one output bit per subset of the
/// window. Bit `p` is the output for the subset whose members are the window
/// points at the set bit positions of `p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    vars: usize,
    words: Vec<u64>,
}

impl TruthTable {
    /// All-zero table over `vars` window points.
    pub fn zeros(vars: usize) -> Result<Self> {
        if vars > MAX_WINDOW_POINTS {
            return Err(Error::InvalidParameter(format!(
                "truth table over {vars} points exceeds the limit of {MAX_WINDOW_POINTS}"
            )));
        }
        let len = 1usize << vars;
        Ok(Self {
            vars,
            words: vec![0; len.div_ceil(64)],
        })
    }

    pub fn ones(vars: usize) -> Result<Self> {
        let mut t = Self::zeros(vars)?;
        for p in 0..t.len() {
            t.set(p, true);
        }
        Ok(t)
    }

    /// Table whose length `bits.len()` must be a power of two.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if !bits.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "truth table length {} is not a power of two",
                bits.len()
            )));
        }
        let mut t = Self::zeros(bits.len().trailing_zeros() as usize)?;
        for (p, &b) in bits.iter().enumerate() {
            t.set(p, b);
        }
        Ok(t)
    }

    /// Builds the table by evaluating `f` on every pattern index.
    pub fn from_fn(vars: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut t = Self::zeros(vars)?;
        for p in 0..t.len() {
            t.set(p, f(p));
        }
        Ok(t)
    }

    /// Number of window points the table is defined over.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Number of entries, `2^vars`.
    pub fn len(&self) -> usize {
        1 << self.vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, pattern: usize) -> bool {
        debug_assert!(pattern < self.len());
        (self.words[pattern >> 6] >> (pattern & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pattern: usize, value: bool) {
        debug_assert!(pattern < self.len());
        let mask = 1u64 << (pattern & 63);
        if value {
            self.words[pattern >> 6] |= mask;
        } else {
            self.words[pattern >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pattern: usize) {
        debug_assert!(pattern < self.len());
        self.words[pattern >> 6] ^= 1u64 << (pattern & 63);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming(&self, other: &TruthTable) -> usize {
        assert_eq!(self.vars, other.vars, "tables over different windows");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Pointwise `self <= other`.
    pub fn le(&self, other: &TruthTable) -> bool {
        self.vars == other.vars
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|p| self.get(p))
    }

    /// Little-endian hex: digit `k` holds entries `4k..4k+4`, entry `4k` in
    /// its least significant bit.
    pub fn to_hex(&self) -> String {
        let bits: Vec<bool> = self.iter().collect();
        bits_to_hex(&bits)
    }

    /// Inverse of [`TruthTable::to_hex`]. The digit count must be exactly
    /// `ceil(2^vars / 4)` and padding bits must be zero.
    pub fn from_hex(vars: usize, hex: &str) -> Result<Self> {
        let mut t = Self::zeros(vars)?;
        let len = t.len();
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::InvalidParameter(format!(
                "expected {digits} hex digits for {len} entries, got {}",
                hex.len()
            )));
        }
        for (k, c) in hex.chars().enumerate() {
            let nibble = match c {
                '0'..='9' | 'a'..='f' => c.to_digit(16).unwrap() as usize,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "invalid hex digit {c:?} (lowercase only)"
                    )))
                }
            };
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let p = 4 * k + b;
                    if p >= len {
                        return Err(Error::InvalidParameter(
                            "nonzero padding bits in final hex digit".into(),
                        ));
                    }
                    t.set(p, true);
                }
            }
        }
        Ok(t)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}, {})", self.vars, self.to_hex())
    }
}

pub(crate) fn bits_to_hex(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|chunk| {
            let nibble = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (b, &v)| acc | (u32::from(v) << b));
            char::from_digit(nibble, 16).unwrap()
        })
        .collect()
}

/// Independent fair coin per entry.
pub fn random_truth_table<R: Rng + ?Sized>(window: &Window, rng: &mut R) -> TruthTable {
    let mut t = TruthTable::zeros(window.len()).expect("window size is bounded");
    for p in 0..t.len() {
        if rng.gen::<bool>() {
            t.set(p, true);
        }
    }
    t
}
