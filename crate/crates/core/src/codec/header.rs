//! Fixed 112-bit stego header and the LSB slots that carry it.

use crate::bits::{push_uint, BitReader, BitSlice, Bits};
use crate::error::{Error, Result};
use crate::image::Raster;

pub const HEADER_BITS: usize = 112;

const K_END_BITS: usize = 32;
const L_CLM_BITS: usize = 24;
const L_S_BITS: usize = 32;
const N_OVER_BITS: usize = 24;

/// Framing fields written into the LSB plane after embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StegoHeader {
    /// 1-based scan index of the last processed pixel (0: none).
    pub k_end: u32,
    /// Compressed location map length in bits.
    pub l_clm: u32,
    /// Secret length in bits.
    pub l_s: u32,
    /// Number of MED overflow records.
    pub n_over: u32,
}

impl StegoHeader {
    pub fn new(k_end: usize, l_clm: usize, l_s: usize, n_over: usize) -> Result<Self> {
        let fit = |v: usize, width: usize, what: &str| -> Result<u32> {
            if (v as u64) >> width == 0 {
                Ok(v as u32)
            } else {
                Err(Error::Parameter(format!("{what} = {v} does not fit in {width} header bits")))
            }
        };
        Ok(Self {
            k_end: fit(k_end, K_END_BITS, "K_end")?,
            l_clm: fit(l_clm, L_CLM_BITS, "L_CLM")?,
            l_s: fit(l_s, L_S_BITS, "L_S")?,
            n_over: fit(n_over, N_OVER_BITS, "N_over")?,
        })
    }

    pub fn to_bits(&self) -> Bits {
        let mut b = Bits::with_capacity(HEADER_BITS);
        push_uint(&mut b, self.k_end as u64, K_END_BITS);
        push_uint(&mut b, self.l_clm as u64, L_CLM_BITS);
        push_uint(&mut b, self.l_s as u64, L_S_BITS);
        push_uint(&mut b, self.n_over as u64, N_OVER_BITS);
        b
    }

    pub fn from_bits(bits: &BitSlice) -> Result<Self> {
        let mut r = BitReader::new(bits);
        Ok(Self {
            k_end: r.read_uint(K_END_BITS)? as u32,
            l_clm: r.read_uint(L_CLM_BITS)? as u32,
            l_s: r.read_uint(L_S_BITS)? as u32,
            n_over: r.read_uint(N_OVER_BITS)? as u32,
        })
    }
}

/// One LSB bit: linear cell index and bit position within the cell's
/// `n`-bit LSB value (`n-1` is most significant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub cell: usize,
    pub bit: u8,
}

/// Cells whose LSBs hold the header: row 1 left to right, row `h` left to
/// right, column 1 top to bottom, column `w` top to bottom (corners once),
/// then interior cells in raster order when the border alone is too small.
pub fn slot_cells(width: usize, height: usize) -> Vec<usize> {
    let idx = |i: usize, j: usize| (i - 1) * width + (j - 1);
    let mut cells = Vec::with_capacity(width * height);
    cells.extend((1..=width).map(|j| idx(1, j)));
    if height > 1 {
        cells.extend((1..=width).map(|j| idx(height, j)));
    }
    cells.extend((2..height).map(|i| idx(i, 1)));
    if width > 1 {
        cells.extend((2..height).map(|i| idx(i, width)));
    }
    for i in 2..height {
        for j in 2..width {
            cells.push(idx(i, j));
        }
    }
    cells
}

/// The first [`HEADER_BITS`] LSB slots.
pub fn header_slots(width: usize, height: usize, n: u8) -> Result<Vec<Slot>> {
    let available = width * height * n as usize;
    if available < HEADER_BITS {
        return Err(Error::HeaderSpace {
            needed: HEADER_BITS,
            available,
        });
    }
    Ok(slot_cells(width, height)
        .into_iter()
        .flat_map(|cell| (0..n).rev().map(move |bit| Slot { cell, bit }))
        .take(HEADER_BITS)
        .collect())
}

pub fn read_slots(lsb: &Raster, slots: &[Slot]) -> Bits {
    slots
        .iter()
        .map(|s| (lsb.as_slice()[s.cell] >> s.bit) & 1 == 1)
        .collect()
}

pub fn write_slots(lsb: &mut Raster, slots: &[Slot], bits: &BitSlice) {
    debug_assert_eq!(slots.len(), bits.len());
    let data = lsb.as_mut_slice();
    for (s, b) in slots.iter().zip(bits.iter()) {
        let mask = 1u8 << s.bit;
        if *b {
            data[s.cell] |= mask;
        } else {
            data[s.cell] &= !mask;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_bits_roundtrip() {
        let h = StegoHeader::new(260_100, 12_345, 264_722, 7).unwrap();
        let bits = h.to_bits();
        assert_eq!(bits.len(), HEADER_BITS);
        assert_eq!(StegoHeader::from_bits(&bits).unwrap(), h);
        assert!(StegoHeader::new(0, 1 << 24, 0, 0).is_err());
    }

    #[test]
    fn border_cells_first() {
        let cells = slot_cells(4, 3);
        // row 1, row 3, col 1 (row 2), col 4 (row 2), interior
        assert_eq!(cells, vec![0, 1, 2, 3, 8, 9, 10, 11, 4, 7, 5, 6]);
    }

    #[test]
    fn slot_space() {
        // 512x512 border: 2044 cells * 2 bits
        let s = header_slots(512, 512, 2).unwrap();
        assert!(s.iter().all(|s| s.cell < 512));
        assert_eq!(s[0], Slot { cell: 0, bit: 1 });
        assert_eq!(s[1], Slot { cell: 0, bit: 0 });
        // 8x8 n=2 spills into the interior
        let s = header_slots(8, 8, 2).unwrap();
        assert_eq!(s.len(), HEADER_BITS);
        assert!(matches!(header_slots(3, 3, 2), Err(Error::HeaderSpace { needed: 112, available: 18 })));
        assert!(header_slots(8, 8, 0).is_err());
    }

    #[test]
    fn slots_read_back() {
        let mut lsb = Raster::filled(20, 20, 0);
        let slots = header_slots(20, 20, 2).unwrap();
        let h = StegoHeader::new(5, 6, 7, 8).unwrap().to_bits();
        write_slots(&mut lsb, &slots, &h);
        assert_eq!(read_slots(&lsb, &slots), h);
        assert!(lsb.as_slice().iter().all(|&v| v < 4));
    }
}
