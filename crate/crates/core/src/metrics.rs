//! Image quality and capacity statistics.

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Peak signal-to-noise ratio in dB; `+inf` for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.check_shape(b)?;
    if a.is_empty() {
        return Err(Error::Parameter("PSNR of an empty image".into()));
    }
    let sse: u64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Bits per pixel.
pub fn embedding_rate(ec: u64, pixels: usize) -> Result<f64> {
    if pixels == 0 {
        return Err(Error::Parameter("embedding rate over zero pixels".into()));
    }
    Ok(ec as f64 / pixels as f64)
}

/// Percentage of capacities that reach `target` bits.
pub fn spe(capacities: &[u64], target: u64) -> Result<f64> {
    if capacities.is_empty() {
        return Err(Error::Parameter("SPE over an empty corpus".into()));
    }
    let hits = capacities.iter().filter(|&&c| c >= target).count();
    Ok(100.0 * hits as f64 / capacities.len() as f64)
}
