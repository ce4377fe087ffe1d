//! Double-peak two-layer embedding on an 8-neighbourhood predictor pair.
//!
//! Each layer expands prediction errors 0 and 1 (one bit each) and shifts
//! everything else outward by one, so a pixel moves by at most 2.

use super::PixelBits;
use crate::error::{Error, Result};
use crate::image::Raster;

/// Sorted 8-neighbourhood of a 0-based linear index (no bounds checks).
#[inline]
pub(crate) fn neighbours8(plane: &[u8], width: usize, k: usize) -> [u8; 8] {
    let mut z = [
        plane[k - width - 1],
        plane[k - width],
        plane[k - width + 1],
        plane[k - 1],
        plane[k + 1],
        plane[k + width - 1],
        plane[k + width],
        plane[k + width + 1],
    ];
    z.sort_unstable();
    z
}

#[inline]
pub(crate) fn pair_from_sorted(z: &[u8; 8]) -> (i32, i32) {
    let low: i32 = z[..6].iter().map(|&v| v as i32).sum();
    let high: i32 = z[2..].iter().map(|&v| v as i32).sum();
    (low / 6, high / 6)
}

/// `(p1, p2)` for the 1-indexed interior cell `(i, j)`: floor means of the
/// six smallest and six largest of the eight neighbours.
pub fn predictor_pair(plane: &Raster, i: usize, j: usize) -> Result<(i32, i32)> {
    if !plane.is_interior(i, j) {
        return Err(Error::Position { row: i, col: j });
    }
    let z = neighbours8(plane.as_slice(), plane.width(), plane.index(i, j));
    Ok(pair_from_sorted(&z))
}

#[inline]
fn expand(v: i32, p: i32, next_bit: &mut impl FnMut() -> bool, used: &mut u8) -> i32 {
    match v - p {
        1 => {
            *used += 1;
            v + next_bit() as i32
        }
        0 => {
            *used += 1;
            v - next_bit() as i32
        }
        e if e > 1 => v + 1,
        _ => v - 1,
    }
}

/// Apply both layers to `v`; returns the marked value and how many bits
/// were drawn from `next_bit` (0, 1 or 2).
pub fn embed_pixel(
    v: i32,
    p1: i32,
    p2: i32,
    max: i32,
    next_bit: &mut impl FnMut() -> bool,
) -> Result<(i32, u8)> {
    let mut used = 0;
    let v1 = expand(v, p1, next_bit, &mut used);
    let v2 = expand(v1, p2, next_bit, &mut used);
    if !(0..=max).contains(&v2) {
        return Err(Error::Overflow { value: v2, max });
    }
    Ok((v2, used))
}

#[inline]
fn contract(v: i32, p: i32) -> (i32, Option<bool>) {
    match v - p {
        2 => (v - 1, Some(true)),
        -1 => (v + 1, Some(true)),
        0 | 1 => (v, Some(false)),
        e if e > 2 => (v - 1, None),
        _ => (v + 1, None),
    }
}

/// Invert [`embed_pixel`]: layer 2 first, then layer 1. Bits come back in
/// embedding order.
pub fn extract_pixel(v2: i32, p1: i32, p2: i32) -> (i32, PixelBits) {
    let (v1, b2) = contract(v2, p2);
    let (v, b1) = contract(v1, p1);
    let mut bits = PixelBits::default();
    if let Some(b) = b1 {
        bits.push(b);
    }
    if let Some(b) = b2 {
        bits.push(b);
    }
    (v, bits)
}
