//! Big-endian bit sequences used for payloads, headers and side data.

use bitvec::prelude::*;

use crate::error::{corrupt, Result};

/// Bit sequence, most significant bit of each byte first.
pub type Bits = BitVec<u8, Msb0>;
pub type BitSlice = bitvec::slice::BitSlice<u8, Msb0>;

/// Append the low `width` bits of `value`, most significant first.
pub fn push_uint(out: &mut Bits, value: u64, width: usize) {
    debug_assert!(width <= 64);
    debug_assert!(width == 64 || value >> width == 0, "{value} needs more than {width} bits");
    for k in (0..width).rev() {
        out.push((value >> k) & 1 == 1);
    }
}

/// Sequential reader over a bit slice.
pub struct BitReader<'a> {
    bits: &'a BitSlice,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitSlice) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn read_uint(&mut self, width: usize) -> Result<u64> {
        let chunk = self.take(width)?;
        Ok(chunk.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64))
    }

    pub fn take(&mut self, len: usize) -> Result<&'a BitSlice> {
        if self.remaining() < len {
            return Err(corrupt(format!(
                "bit stream ends at {} but {len} more bits were expected",
                self.bits.len()
            )));
        }
        let out = &self.bits[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }
}

/// Pack bits into bytes (last byte zero padded).
pub fn to_bytes(bits: &BitSlice) -> Vec<u8> {
    let mut owned = bits.to_bitvec();
    owned.set_uninitialized(false);
    owned.into_vec()
}

/// First `len` bits of `bytes`, big-endian within each byte.
pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Bits> {
    let all = bytes.view_bits::<Msb0>();
    all.get(..len).map(BitSlice::to_bitvec)
}
