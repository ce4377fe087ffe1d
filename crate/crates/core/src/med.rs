//! Median edge detector (MED) pre-processing.
//!
//! The forward transform replaces every pixel outside the first row and
//! first column by its MED prediction error, shifted so the smallest error
//! becomes zero. Errors that land at or above 255 are clamped to 255 and
//! their excess is kept in [`AuxInfo`] so the transform stays invertible.

use std::ops::Deref;

use crate::bits::{push_uint, BitReader, BitSlice, Bits};
use crate::error::{corrupt, Error, Result};
use crate::image::{GrayImage, Raster};

/// JPEG-LS / LOCO-I predictor from the left (`a`), above (`b`) and
/// above-left (`c`) neighbours.
#[inline]
pub fn med_predict(a: i32, b: i32, c: i32) -> i32 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if c <= lo {
        hi
    } else if c >= hi {
        lo
    } else {
        a + b - c
    }
}

/// One clamped cell of the difference image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OverflowRecord {
    /// 1-indexed row.
    pub row: u16,
    /// 1-indexed column.
    pub col: u16,
    /// Amount removed by clamping to 255.
    pub excess: u8,
}

/// Side data needed to invert [`med_forward`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuxInfo {
    /// Shift added to every prediction error, `max(0, -min error)`.
    pub shift: u8,
    /// Clamped cells in raster order.
    pub overflow: Vec<OverflowRecord>,
}

const RECORD_BITS: usize = 16 + 16 + 8;

impl AuxInfo {
    pub fn overflow_flag(&self) -> bool {
        !self.overflow.is_empty()
    }

    /// Serialized length: 8-bit shift, 1-bit flag, 40 bits per record.
    pub fn bit_len(&self) -> usize {
        Self::bit_len_for(self.overflow.len())
    }

    pub fn bit_len_for(records: usize) -> usize {
        9 + RECORD_BITS * records
    }

    pub fn write_bits(&self, out: &mut Bits) {
        push_uint(out, self.shift as u64, 8);
        out.push(self.overflow_flag());
        for r in &self.overflow {
            push_uint(out, r.row as u64, 16);
            push_uint(out, r.col as u64, 16);
            push_uint(out, r.excess as u64, 8);
        }
    }

    /// Parse a serialization holding exactly `records` overflow records.
    pub fn read_bits(bits: &BitSlice, records: usize) -> Result<Self> {
        if bits.len() != Self::bit_len_for(records) {
            return Err(corrupt(format!(
                "aux section is {} bits, expected {}",
                bits.len(),
                Self::bit_len_for(records)
            )));
        }
        let mut r = BitReader::new(bits);
        let shift = r.read_uint(8)? as u8;
        let flag = r.read_uint(1)? == 1;
        if flag != (records > 0) {
            return Err(corrupt("overflow flag disagrees with record count"));
        }
        let mut overflow = Vec::with_capacity(records);
        for _ in 0..records {
            overflow.push(OverflowRecord {
                row: r.read_uint(16)? as u16,
                col: r.read_uint(16)? as u16,
                excess: r.read_uint(8)? as u8,
            });
        }
        Ok(Self { shift, overflow })
    }

    /// Checks that records are strictly increasing in raster order and lie
    /// on cells the transform can clamp.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let mut prev: Option<(u16, u16)> = None;
        for r in &self.overflow {
            let (i, j) = (r.row as usize, r.col as usize);
            if i < 2 || j < 2 || i > height || j > width {
                return Err(corrupt(format!("overflow record at ({i}, {j}) is off the difference area")));
            }
            if prev.is_some_and(|p| p >= (r.row, r.col)) {
                return Err(corrupt("overflow records out of order"));
            }
            prev = Some((r.row, r.col));
        }
        Ok(())
    }
}

/// Shifted MED difference image; row 1 and column 1 hold original pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffImage(Raster);

impl DiffImage {
    pub fn new(raster: Raster) -> Self {
        Self(raster)
    }

    pub fn into_raster(self) -> Raster {
        self.0
    }
}

impl Deref for DiffImage {
    type Target = Raster;

    fn deref(&self) -> &Raster {
        &self.0
    }
}

/// Forward MED transform.
pub fn med_forward(img: &GrayImage) -> Result<(DiffImage, AuxInfo)> {
    let (w, h) = (img.width(), img.height());
    if w > u16::MAX as usize || h > u16::MAX as usize {
        return Err(Error::Parameter(format!("{w}x{h} exceeds 16-bit coordinates")));
    }
    let px = |i: usize, j: usize| img.get(i, j) as i32;

    let mut errors = vec![0i32; w * h];
    let mut min_err = 0i32;
    for i in 2..=h {
        for j in 2..=w {
            let d = px(i, j) - med_predict(px(i, j - 1), px(i - 1, j), px(i - 1, j - 1));
            errors[img.index(i, j)] = d;
            min_err = min_err.min(d);
        }
    }
    let shift = -min_err;
    debug_assert!((0..=255).contains(&shift));

    let mut out = img.clone();
    let mut overflow = Vec::new();
    for i in 2..=h {
        for j in 2..=w {
            let k = img.index(i, j);
            let shifted = errors[k] + shift;
            if shifted >= 255 {
                overflow.push(OverflowRecord {
                    row: i as u16,
                    col: j as u16,
                    excess: (shifted - 255) as u8,
                });
                out.as_mut_slice()[k] = 255;
            } else {
                out.as_mut_slice()[k] = shifted as u8;
            }
        }
    }
    Ok((
        DiffImage(out),
        AuxInfo {
            shift: shift as u8,
            overflow,
        },
    ))
}

/// Inverse MED transform, strictly in raster order.
pub fn med_inverse(diff: &DiffImage, aux: &AuxInfo) -> Result<GrayImage> {
    let (w, h) = (diff.width(), diff.height());
    aux.validate(w, h)?;
    let mut out = diff.0.clone();
    let mut records = aux.overflow.iter().peekable();
    for i in 2..=h {
        for j in 2..=w {
            let mut d = diff.get(i, j) as i32;
            if let Some(r) = records.next_if(|r| (r.row as usize, r.col as usize) == (i, j)) {
                if d != 255 {
                    return Err(corrupt(format!("overflow record at ({i}, {j}) on unclamped cell")));
                }
                d += r.excess as i32;
            } else if d == 255 {
                return Err(corrupt(format!("clamped cell ({i}, {j}) has no overflow record")));
            }
            let pred = med_predict(
                out.get(i, j - 1) as i32,
                out.get(i - 1, j) as i32,
                out.get(i - 1, j - 1) as i32,
            );
            let x = d - aux.shift as i32 + pred;
            if !(0..=255).contains(&x) {
                return Err(corrupt(format!("MED inverse gives {x} at ({i}, {j})")));
            }
            out.set(i, j, x as u8);
        }
    }
    Ok(out)
}
