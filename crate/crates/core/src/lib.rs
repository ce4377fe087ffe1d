//! Reversible data hiding in grayscale images by two-layer prediction-error
//! expansion on the higher bit plane.
//!
//! The cover is split at bit `n` into a high (HSB) and low (LSB) plane.
//! Secret bits are expanded into the HSB plane two layers per pixel along a
//! chessboard scan, using a pair of predictors built from the sorted
//! neighbourhood. Saturating values are pre-shifted and recorded in an
//! arithmetic-coded location map; a small header in the LSB plane tells the
//! receiver where the walk ended. Extraction restores both the secret and
//! the bit-exact cover.
//!
//! ```
//! use dtle_core::{embed, extract, random_bits, CodecOptions, Raster};
//!
//! let cover = Raster::from_fn(32, 32, |i, j| (90 + (i + 2 * j) % 17) as u8);
//! let secret = random_bits(1, 200);
//! let opts = CodecOptions::dtle(false);
//! let stego = embed(&cover, &secret, &opts).unwrap();
//! let out = extract(&stego.stego, &opts).unwrap();
//! assert_eq!(out.secret, secret);
//! assert_eq!(out.image, cover);
//! ```

pub mod bench;
pub mod bitplane;
pub mod bits;
pub mod codec;
pub mod error;
pub mod image;
pub mod location_map;
pub mod med;
pub mod metrics;
pub mod prng;
pub mod tle;

pub use bitplane::{decompose, recompose, PlanePair};
pub use bits::{BitSlice, Bits};
pub use codec::{
    capacity, embed, extract, is_complex, resolve_med, CapacityReport, CodecOptions, Extracted, MedMode, Scheme,
    StegoHeader, StegoResult,
};
pub use error::{Error, Result};
pub use image::{read_pgm, write_pgm, GrayImage, Raster};
pub use metrics::{embedding_rate, psnr, spe};
pub use prng::random_bits;
