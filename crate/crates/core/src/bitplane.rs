//! Split pixels into a high (HSB) and low (LSB) plane at bit `n`.
//!
//! For a pixel `P`, `hsb = P >> n` and `lsb = P & (2^n - 1)`, so
//! `P = hsb * 2^n + lsb`.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Raster};

/// HSB and LSB planes of one image, split at bit `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanePair {
    pub hsb: Raster,
    pub lsb: Raster,
    n: u8,
}

impl PlanePair {
    pub fn new(hsb: Raster, lsb: Raster, n: u8) -> Result<Self> {
        check_cut(n)?;
        hsb.check_shape(&lsb)?;
        let pair = Self { hsb, lsb, n };
        let hmax = pair.hsb_max();
        let lmax = (1u16 << n) - 1;
        if let Some(k) = pair.hsb.as_slice().iter().position(|&h| h as u16 > hmax) {
            return Err(Error::Range(format!(
                "hsb cell {k} = {} exceeds {hmax}",
                pair.hsb.as_slice()[k]
            )));
        }
        if let Some(k) = pair.lsb.as_slice().iter().position(|&l| l as u16 > lmax) {
            return Err(Error::Range(format!(
                "lsb cell {k} = {} exceeds {lmax}",
                pair.lsb.as_slice()[k]
            )));
        }
        Ok(pair)
    }

    #[inline]
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Largest representable HSB value, `2^(8-n) - 1`.
    #[inline]
    pub fn hsb_max(&self) -> u16 {
        hsb_max(self.n)
    }

    pub fn width(&self) -> usize {
        self.hsb.width()
    }

    pub fn height(&self) -> usize {
        self.hsb.height()
    }
}

#[inline]
pub fn hsb_max(n: u8) -> u16 {
    (1u16 << (8 - n)) - 1
}

fn check_cut(n: u8) -> Result<()> {
    if n > 7 {
        Err(Error::Parameter(format!("cut n = {n} outside [0, 7]")))
    } else {
        Ok(())
    }
}

pub fn decompose(img: &GrayImage, n: u8) -> Result<PlanePair> {
    check_cut(n)?;
    let mask = ((1u16 << n) - 1) as u8;
    let hsb: Vec<u8> = img.as_slice().iter().map(|&p| p >> n).collect();
    let lsb: Vec<u8> = img.as_slice().iter().map(|&p| p & mask).collect();
    Ok(PlanePair {
        hsb: Raster::new(img.width(), img.height(), hsb)?,
        lsb: Raster::new(img.width(), img.height(), lsb)?,
        n,
    })
}

pub fn recompose(planes: &PlanePair) -> Result<GrayImage> {
    let n = planes.n;
    planes.hsb.check_shape(&planes.lsb)?;
    let lmax = (1u16 << n) - 1;
    let data = planes
        .hsb
        .as_slice()
        .iter()
        .zip(planes.lsb.as_slice())
        .map(|(&h, &l)| {
            let p = ((h as u16) << n) + l as u16;
            if p > 255 || l as u16 > lmax {
                Err(Error::Range(format!("hsb {h}, lsb {l} at n = {n}")))
            } else {
                Ok(p as u8)
            }
        })
        .collect::<Result<Vec<u8>>>()?;
    Raster::new(planes.width(), planes.height(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: u8, n: u8) -> (u8, u8) {
        let pair = decompose(&Raster::filled(1, 1, p), n).unwrap();
        (pair.hsb.get(1, 1), pair.lsb.get(1, 1))
    }

    #[test]
    fn worked_split() {
        assert_eq!(single(215, 2), (53, 3));
        assert_eq!(single(255, 2), (63, 3));
        for n in 0..=7 {
            assert_eq!(single(0, n), (0, 0));
        }
    }

    #[test]
    fn worked_join() {
        let join = |h: u8, l: u8| {
            let pair = PlanePair::new(Raster::filled(1, 1, h), Raster::filled(1, 1, l), 2).unwrap();
            recompose(&pair).unwrap().get(1, 1)
        };
        assert_eq!(join(53, 3), 215);
        assert_eq!(join(42, 3), 171);
        assert_eq!(join(0, 0), 0);
    }

    #[test]
    fn exhaustive_roundtrip_and_monotone() {
        let all = Raster::new(256, 1, (0..=255).collect()).unwrap();
        for n in 0..=7 {
            let pair = decompose(&all, n).unwrap();
            assert_eq!(recompose(&pair).unwrap(), all);
            assert!(pair.hsb.as_slice().windows(2).all(|w| w[0] <= w[1]));
            assert!(pair.hsb.as_slice().iter().all(|&h| (h as u16) <= hsb_max(n)));
        }
    }

    #[test]
    fn rejects_bad_cut_and_ranges() {
        assert!(matches!(
            decompose(&Raster::filled(1, 1, 0), 8),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            PlanePair::new(Raster::filled(1, 1, 64), Raster::filled(1, 1, 0), 2),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            PlanePair::new(Raster::filled(1, 1, 1), Raster::filled(1, 1, 4), 2),
            Err(Error::Range(_))
        ));
    }
}
