//! Single-peak two-layer embedding baseline (TLE) on the higher five bits.
//!
//! Layer 1 expands prediction error `+1` upward, layer 2 expands `-1`
//! downward; every other error is either shifted away or left alone. The
//! predictor pair averages the three smallest / three largest of the four
//! rhombus neighbours. Framing (scan order, header, location map, payload)
//! is shared with [`crate::codec`].

use crate::codec::{self, CodecOptions, Extracted, PixelBits, Scheme, StegoResult};
use crate::error::{Error, Result};
use crate::image::{GrayImage, Raster};

/// TLE parameters; the cut defaults to `n = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TleParams {
    pub n: u8,
}

impl Default for TleParams {
    fn default() -> Self {
        Self { n: 3 }
    }
}

impl TleParams {
    pub fn options(&self) -> CodecOptions {
        CodecOptions {
            scheme: Scheme::Tle,
            n: self.n,
            use_med: false,
        }
    }
}

#[inline]
pub(crate) fn neighbours4(plane: &[u8], width: usize, k: usize) -> [u8; 4] {
    let mut z = [plane[k - width], plane[k - 1], plane[k + 1], plane[k + width]];
    z.sort_unstable();
    z
}

#[inline]
pub(crate) fn pair_from_sorted(z: &[u8; 4]) -> (i32, i32) {
    let low: i32 = z[..3].iter().map(|&v| v as i32).sum();
    let high: i32 = z[1..].iter().map(|&v| v as i32).sum();
    (low / 3, high / 3)
}

pub fn tle_predictors(plane: &Raster, i: usize, j: usize) -> Result<(i32, i32)> {
    if !plane.is_interior(i, j) {
        return Err(Error::Position { row: i, col: j });
    }
    Ok(pair_from_sorted(&neighbours4(
        plane.as_slice(),
        plane.width(),
        plane.index(i, j),
    )))
}

/// Layer 1: `e1 = 1` takes a bit upward, `e1 > 1` shifts up. Layer 2:
/// `e2 = -1` takes a bit downward, `e2 < -1` shifts down.
pub fn embed_pixel(
    v: i32,
    p1: i32,
    p2: i32,
    max: i32,
    next_bit: &mut impl FnMut() -> bool,
) -> Result<(i32, u8)> {
    let mut used = 0;
    let v1 = match v - p1 {
        1 => {
            used += 1;
            v + next_bit() as i32
        }
        e if e > 1 => v + 1,
        _ => v,
    };
    let v2 = match v1 - p2 {
        -1 => {
            used += 1;
            v1 - next_bit() as i32
        }
        e if e < -1 => v1 - 1,
        _ => v1,
    };
    if !(0..=max).contains(&v2) {
        return Err(Error::Overflow { value: v2, max });
    }
    Ok((v2, used))
}

pub fn extract_pixel(v2: i32, p1: i32, p2: i32) -> (i32, PixelBits) {
    let (v1, b2) = match v2 - p2 {
        -1 => (v2, Some(false)),
        -2 => (v2 + 1, Some(true)),
        e if e < -2 => (v2 + 1, None),
        _ => (v2, None),
    };
    let (v, b1) = match v1 - p1 {
        1 => (v1, Some(false)),
        2 => (v1 - 1, Some(true)),
        e if e > 2 => (v1 - 1, None),
        _ => (v1, None),
    };
    let mut bits = PixelBits::default();
    if let Some(b) = b1 {
        bits.push(b);
    }
    if let Some(b) = b2 {
        bits.push(b);
    }
    (v, bits)
}

pub fn tle_embed(cover: &GrayImage, secret: &crate::bits::BitSlice, params: &TleParams) -> Result<StegoResult> {
    codec::embed(cover, secret, &params.options())
}

pub fn tle_extract(stego: &GrayImage, params: &TleParams) -> Result<Extracted> {
    codec::extract(stego, &params.options())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_examples() {
        let flat = Raster::filled(3, 3, 20);
        assert_eq!(tle_predictors(&flat, 2, 2).unwrap(), (20, 20));
        let r = Raster::new(3, 3, vec![0, 18, 0, 19, 20, 21, 0, 22, 0]).unwrap();
        assert_eq!(tle_predictors(&r, 2, 2).unwrap(), (19, 20));
        assert!(tle_predictors(&flat, 3, 2).is_err());
    }

    #[test]
    fn worked_trace() {
        // I_H = 20, p1 = 19, p2 = 20: layer 1 takes s1 = 1 -> 21, layer 2
        // sees e2 = 1 and leaves it.
        let mut bits = [true].into_iter();
        let (v2, used) = embed_pixel(20, 19, 20, 31, &mut || bits.next().unwrap()).unwrap();
        assert_eq!((v2, used), (21, 1));
        // recombined with LSB 3 at n = 3: 21 * 8 + 3 = 171 vs 20 * 8 + 3 = 163
        assert_eq!(v2 * 8 + 3 - (20 * 8 + 3), 8);
        let (v, b) = extract_pixel(21, 19, 20);
        assert_eq!((v, b.as_slice()), (20, &[true][..]));
    }

    #[test]
    fn untouched_when_no_peak() {
        let (v2, used) = embed_pixel(20, 20, 20, 31, &mut || unreachable!()).unwrap();
        assert_eq!((v2, used), (20, 0));
        let (v, b) = extract_pixel(20, 20, 20);
        assert_eq!((v, b.len()), (20, 0));
    }

    #[test]
    fn exhaustive_roundtrip() {
        for p1 in 0..32 {
            for p2 in p1..32 {
                for v in 1..31 {
                    for pattern in 0..4u8 {
                        let mut k = 0;
                        let mut src = || {
                            let b = (pattern >> (1 - k)) & 1 == 1;
                            k += 1;
                            b
                        };
                        let (v2, used) = embed_pixel(v, p1, p2, 31, &mut src).unwrap();
                        assert!((v2 - v).abs() <= 1);
                        let (back, bits) = extract_pixel(v2, p1, p2);
                        assert_eq!(back, v);
                        assert_eq!(bits.len() as u8, used);
                        let expect: Vec<bool> = (0..used).map(|k| (pattern >> (1 - k)) & 1 == 1).collect();
                        assert_eq!(bits.as_slice(), &expect[..]);
                    }
                }
            }
        }
    }
}
