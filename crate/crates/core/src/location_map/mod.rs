//! Overflow-prevention location map on the HSB plane.
//!
//! Interior HSB cells within `margin` of either end of `[0, max]` are moved
//! to `margin` / `max - margin` before embedding, and a per-cell symbol
//! records where they came from:
//!
//! | before          | after          | symbol          |
//! |-----------------|----------------|-----------------|
//! | `v < margin`    | `margin`       | `v + 1`         |
//! | `v > max-margin`| `max - margin` | `max - v + 1`   |
//! | otherwise       | `v`            | `0`             |
//!
//! With margin 2 and max 63 this is `63 -> 61 (1)`, `0 -> 2 (1)`,
//! `62 -> 61 (2)`, `1 -> 2 (2)`. Border cells are never shifted.

pub mod coder;

use crate::bits::{BitSlice, Bits};
use crate::error::{corrupt, Error, Result};
use crate::image::Raster;

/// Per-cell symbols; border cells are always 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationMap {
    cells: Raster,
}

/// Arithmetic-coded interior symbols of a [`LocationMap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedMap {
    pub bits: Bits,
    pub cell_count: usize,
}

impl CompressedMap {
    /// `L_CLM`.
    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }
}

fn check_margin(max: u16, margin: u8) -> Result<()> {
    if margin == 0 || margin as usize > coder::ALPHABET - 1 {
        return Err(Error::Parameter(format!("location map margin {margin} unsupported")));
    }
    if max < 2 * margin as u16 + 1 {
        return Err(Error::Parameter(format!(
            "plane range [0, {max}] too narrow for a ±{margin} embedding"
        )));
    }
    Ok(())
}

fn interior_len(width: usize, height: usize) -> usize {
    width.saturating_sub(2) * height.saturating_sub(2)
}

impl LocationMap {
    pub fn from_raster(cells: Raster) -> Result<Self> {
        if let Some(&s) = cells.as_slice().iter().find(|&&s| s as usize >= coder::ALPHABET) {
            return Err(Error::Range(format!("location map symbol {s}")));
        }
        let (w, h) = (cells.width(), cells.height());
        for i in 1..=h {
            for j in 1..=w {
                if !cells.is_interior(i, j) && cells.get(i, j) != 0 {
                    return Err(Error::Range(format!("border cell ({i}, {j}) marked")));
                }
            }
        }
        Ok(Self { cells })
    }

    pub fn width(&self) -> usize {
        self.cells.width()
    }

    pub fn height(&self) -> usize {
        self.cells.height()
    }

    /// Symbol at the 1-indexed cell `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.cells.get(i, j)
    }

    pub fn as_raster(&self) -> &Raster {
        &self.cells
    }

    /// Number of interior cells with a non-zero symbol.
    pub fn marked(&self) -> usize {
        self.cells.as_slice().iter().filter(|&&s| s != 0).count()
    }

    /// Interior symbols in raster order.
    pub fn interior_symbols(&self) -> Vec<u8> {
        let (w, h) = (self.width(), self.height());
        let mut out = Vec::with_capacity(interior_len(w, h));
        for i in 2..h {
            for j in 2..w {
                out.push(self.cells.get(i, j));
            }
        }
        out
    }

    pub fn compress(&self) -> CompressedMap {
        let symbols = self.interior_symbols();
        CompressedMap {
            bits: coder::encode(&symbols),
            cell_count: symbols.len(),
        }
    }

    /// Decode a map for a `width x height` plane.
    pub fn decompress(bits: &BitSlice, cell_count: usize, width: usize, height: usize) -> Result<Self> {
        if cell_count != interior_len(width, height) {
            return Err(Error::Parameter(format!(
                "{cell_count} cells do not match a {width}x{height} interior"
            )));
        }
        let symbols = coder::decode(bits, cell_count)?;
        let mut cells = Raster::filled(width, height, 0);
        let mut it = symbols.into_iter();
        for i in 2..height {
            for j in 2..width {
                cells.set(i, j, it.next().expect("length checked"));
            }
        }
        Ok(Self { cells })
    }
}

/// Pre-shift risky interior cells of `hsb` and build the map.
pub fn build_and_shift(hsb: &Raster, max: u16, margin: u8) -> Result<(Raster, LocationMap)> {
    check_margin(max, margin)?;
    let (max, margin) = (max as i32, margin as i32);
    let mut shifted = hsb.clone();
    let mut cells = Raster::filled(hsb.width(), hsb.height(), 0);
    for i in 2..hsb.height() {
        for j in 2..hsb.width() {
            let v = hsb.get(i, j) as i32;
            if v > max {
                return Err(Error::Range(format!("hsb value {v} above {max}")));
            }
            let (nv, sym) = if v < margin {
                (margin, v + 1)
            } else if v > max - margin {
                (max - margin, max - v + 1)
            } else {
                (v, 0)
            };
            shifted.set(i, j, nv as u8);
            cells.set(i, j, sym as u8);
        }
    }
    Ok((shifted, LocationMap { cells }))
}

/// Undo [`build_and_shift`].
pub fn restore(shifted: &Raster, lm: &LocationMap, max: u16, margin: u8) -> Result<Raster> {
    check_margin(max, margin)?;
    shifted.check_shape(&lm.cells)?;
    let (max, margin) = (max as i32, margin as i32);
    let mut out = shifted.clone();
    for i in 2..shifted.height() {
        for j in 2..shifted.width() {
            let sym = lm.get(i, j) as i32;
            if sym == 0 {
                continue;
            }
            if sym > margin {
                return Err(corrupt(format!("symbol {sym} at ({i}, {j}) exceeds margin {margin}")));
            }
            let v = shifted.get(i, j) as i32;
            let orig = if v == margin {
                sym - 1
            } else if v == max - margin {
                max - sym + 1
            } else {
                return Err(corrupt(format!(
                    "cell ({i}, {j}) marked {sym} but holds {v}, not {margin} or {}",
                    max - margin
                )));
            };
            out.set(i, j, orig as u8);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_one(v: u8) -> (u8, u8) {
        let plane = Raster::filled(3, 3, v);
        let (s, lm) = build_and_shift(&plane, 63, 2).unwrap();
        (s.get(2, 2), lm.get(2, 2))
    }

    fn restore_one(v: u8, sym: u8) -> Result<u8> {
        let mut cells = Raster::filled(3, 3, 0);
        cells.set(2, 2, sym);
        let lm = LocationMap::from_raster(cells)?;
        Ok(restore(&Raster::filled(3, 3, v), &lm, 63, 2)?.get(2, 2))
    }

    #[test]
    fn shift_table_n2() {
        assert_eq!(shift_one(63), (61, 1));
        assert_eq!(shift_one(0), (2, 1));
        assert_eq!(shift_one(62), (61, 2));
        assert_eq!(shift_one(1), (2, 2));
        assert_eq!(shift_one(40), (40, 0));
        assert_eq!(shift_one(2), (2, 0));
        assert_eq!(shift_one(61), (61, 0));
    }

    #[test]
    fn restore_table_n2() {
        assert_eq!(restore_one(61, 1).unwrap(), 63);
        assert_eq!(restore_one(2, 1).unwrap(), 0);
        assert_eq!(restore_one(61, 2).unwrap(), 62);
        assert_eq!(restore_one(2, 2).unwrap(), 1);
        assert_eq!(restore_one(61, 0).unwrap(), 61);
        assert!(matches!(restore_one(40, 1), Err(Error::Corruption(_))));
    }

    #[test]
    fn borders_untouched() {
        let plane = Raster::filled(4, 4, 63);
        let (s, lm) = build_and_shift(&plane, 63, 2).unwrap();
        assert_eq!(s.get(1, 1), 63);
        assert_eq!(s.get(4, 2), 63);
        assert_eq!(s.get(2, 3), 61);
        assert_eq!(lm.marked(), 4);
    }

    #[test]
    fn single_margin_variant() {
        let plane = Raster::new(3, 3, vec![0, 0, 0, 0, 31, 0, 0, 0, 0]).unwrap();
        let (s, lm) = build_and_shift(&plane, 31, 1).unwrap();
        assert_eq!((s.get(2, 2), lm.get(2, 2)), (30, 1));
        assert_eq!(restore(&s, &lm, 31, 1).unwrap(), plane);
    }

    #[test]
    fn narrow_ranges_rejected() {
        assert!(build_and_shift(&Raster::filled(3, 3, 0), 3, 2).is_err());
        assert!(build_and_shift(&Raster::filled(3, 3, 0), 7, 2).is_ok());
        assert!(build_and_shift(&Raster::filled(3, 3, 0), 1, 1).is_err());
    }

    #[test]
    fn compress_roundtrip_sizes() {
        let (_, lm) = build_and_shift(&Raster::filled(12, 12, 30), 63, 2).unwrap();
        let c = lm.compress();
        assert_eq!(c.cell_count, 100);
        assert!(c.bit_len() < 100);
        assert_eq!(LocationMap::decompress(&c.bits, 100, 12, 12).unwrap(), lm);
        assert!(LocationMap::decompress(&c.bits, 99, 12, 12).is_err());

        let (_, tiny) = build_and_shift(&Raster::filled(2, 2, 0), 63, 2).unwrap();
        let c = tiny.compress();
        assert_eq!((c.cell_count, c.bit_len()), (0, 0));
    }
}
