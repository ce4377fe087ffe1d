//! Grayscale rasters and binary PGM (P5) I/O.
//!
//! Every plane in the pipeline (cover, HSB/LSB planes, MED difference
//! image, location map) is a [`Raster`] of `u8` cells. Public coordinates
//! are 1-indexed `(row, col)`; storage is row-major and 0-indexed.

use crate::error::{Error, Result};

/// Row-major `u8` raster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

/// An 8-bit single channel image.
pub type GrayImage = Raster;

impl Raster {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width.checked_mul(height) != Some(data.len()) {
            return Err(Error::Parameter(format!(
                "{}x{} raster needs {} cells, got {}",
                width,
                height,
                width.saturating_mul(height),
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for i in 1..=height {
            for j in 1..=width {
                data.push(f(i, j));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    /// 0-based linear index of the 1-indexed cell `(i, j)`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.height && j >= 1 && j <= self.width);
        (i - 1) * self.width + (j - 1)
    }

    /// Value at the 1-indexed cell `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        let k = self.index(i, j);
        self.data[k] = v;
    }

    pub fn same_shape(&self, other: &Raster) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_shape(&self, other: &Raster) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(
                self.height,
                self.width,
                other.height,
                other.width,
            ))
        }
    }

    /// Whether `(i, j)` is off the outermost ring of cells.
    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 1 && i < self.height && j > 1 && j < self.width
    }
}

/// Parse a binary PGM with maxval 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(cur.err("expected magic \"P5\""));
    }
    cur.pos = 2;
    let width = cur.header_uint("width")?;
    let height = cur.header_uint("height")?;
    let maxval = cur.header_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.err("zero image dimension"));
    }
    if maxval != 255 {
        return Err(cur.err(format!("maxval {maxval} unsupported, only 255")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.err("missing whitespace after maxval")),
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let data = bytes
        .get(cur.pos..cur.pos + n)
        .ok_or_else(|| cur.err(format!("truncated raster, expected {n} bytes")))?;
    Raster::new(width, height, data.to_vec())
}

/// Serialize as binary PGM with the canonical header `P5\n<w> <h>\n255\n`.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.as_slice());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn header_uint(&mut self, what: &str) -> Result<usize> {
        let before = self.pos;
        self.skip_ws_and_comments();
        if self.pos == before {
            return Err(self.err(format!("expected whitespace before {what}")));
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected decimal {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                reason: format!("{what} does not fit"),
            })
    }
}
