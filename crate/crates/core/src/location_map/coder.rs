//! Adaptive order-0 arithmetic coder over a three-symbol alphabet.
//!
//! Classic 32-bit integer arithmetic coding with bit-level output, so the
//! compressed length is an exact bit count. The model starts every count at
//! 1, adds 1 per coded symbol and halves all counts once their total reaches
//! 2^16.

use crate::bits::{BitSlice, Bits};
use crate::error::{corrupt, Result};

pub const ALPHABET: usize = 3;

const CODE_BITS: u32 = 32;
const TOP: u64 = (1 << CODE_BITS) - 1;
const HALF: u64 = 1 << (CODE_BITS - 1);
const QUARTER: u64 = 1 << (CODE_BITS - 2);
const MAX_TOTAL: u32 = 1 << 16;

/// Adaptive frequency model.
#[derive(Debug, Clone)]
pub struct Model {
    counts: [u32; ALPHABET],
}

impl Default for Model {
    fn default() -> Self {
        Self {
            counts: [1; ALPHABET],
        }
    }
}

impl Model {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn count(&self, sym: u8) -> u32 {
        self.counts[sym as usize]
    }

    fn interval(&self, sym: u8) -> (u64, u64) {
        let lo: u32 = self.counts[..sym as usize].iter().sum();
        (lo as u64, (lo + self.counts[sym as usize]) as u64)
    }

    pub fn update(&mut self, sym: u8) {
        self.counts[sym as usize] += 1;
        if self.total() >= MAX_TOTAL {
            for c in &mut self.counts {
                *c = c.div_ceil(2);
            }
        }
    }
}

/// Encode `symbols` (each `< 3`). An empty input yields an empty stream.
pub fn encode(symbols: &[u8]) -> Bits {
    let mut out = Bits::new();
    if symbols.is_empty() {
        return out;
    }
    let mut model = Model::default();
    let (mut low, mut high) = (0u64, TOP);
    let mut pending = 0u64;

    let emit = |out: &mut Bits, bit: bool, pending: &mut u64| {
        out.push(bit);
        for _ in 0..*pending {
            out.push(!bit);
        }
        *pending = 0;
    };

    for &sym in symbols {
        assert!((sym as usize) < ALPHABET, "symbol {sym} outside alphabet");
        let total = model.total() as u64;
        let (cl, ch) = model.interval(sym);
        let range = high - low + 1;
        high = low + range * ch / total - 1;
        low += range * cl / total;
        loop {
            if high < HALF {
                emit(&mut out, false, &mut pending);
            } else if low >= HALF {
                emit(&mut out, true, &mut pending);
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < 3 * QUARTER {
                pending += 1;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
        }
        model.update(sym);
    }
    pending += 1;
    emit(&mut out, low >= QUARTER, &mut pending);
    out
}

/// Decode exactly `count` symbols from `bits`.
///
/// A stream of `L` bits never needs more than `L + 30` reads (zero filled
/// past the end); asking for more means the stream was cut short.
pub fn decode(bits: &BitSlice, count: usize) -> Result<Vec<u8>> {
    let mut symbols = Vec::with_capacity(count);
    if count == 0 {
        return Ok(symbols);
    }
    let limit = bits.len() + (CODE_BITS as usize - 2);
    let mut next = 0usize;
    let mut read = || -> Result<u64> {
        if next >= limit {
            return Err(corrupt("location map bit stream exhausted"));
        }
        let b = bits.get(next).map_or(0, |b| *b as u64);
        next += 1;
        Ok(b)
    };

    let mut model = Model::default();
    let (mut low, mut high) = (0u64, TOP);
    let mut value = 0u64;
    for _ in 0..CODE_BITS {
        value = (value << 1) | read()?;
    }
    for _ in 0..count {
        let total = model.total() as u64;
        let range = high - low + 1;
        let scaled = ((value - low + 1) * total - 1) / range;
        let mut sym = 0u8;
        while model.interval(sym).1 <= scaled {
            sym += 1;
            if sym as usize == ALPHABET {
                return Err(corrupt("arithmetic decoder left the code interval"));
            }
        }
        let (cl, ch) = model.interval(sym);
        high = low + range * ch / total - 1;
        low += range * cl / total;
        loop {
            if high < HALF {
            } else if low >= HALF {
                value -= HALF;
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < 3 * QUARTER {
                value -= QUARTER;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | read()?;
        }
        model.update(sym);
        symbols.push(sym);
    }
    Ok(symbols)
}
