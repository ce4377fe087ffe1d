//! Embedding and extraction pipeline.
//!
//! Embedding:
//!
//! 1. optional MED pre-processing of the cover (difference image + aux);
//! 2. split at bit `n` into HSB / LSB planes;
//! 3. pre-shift saturating interior HSB cells, compress the location map;
//! 4. payload = secret ∥ original header-slot LSBs ∥ compressed map ∥ aux;
//! 5. walk the chessboard scan, two layers per pixel, until the payload is
//!    spent (a pixel is always finished, padding with 0 bits);
//! 6. overwrite the header slots with `K_end, L_CLM, L_S, N_over`;
//! 7. recombine the planes.
//!
//! Extraction runs the same steps backwards, visiting the scan in exact
//! reverse from `K_end` so every pixel sees the neighbourhood it was
//! embedded with.

pub mod dtle;
pub mod header;
pub mod scan;

use std::fmt;
use std::str::FromStr;

use crate::bitplane::{self, PlanePair};
use crate::bits::{BitReader, BitSlice, Bits};
use crate::error::{corrupt, Error, Result};
use crate::image::{GrayImage, Raster};
use crate::location_map::{self, CompressedMap, LocationMap};
use crate::med::{self, AuxInfo, DiffImage};
use crate::metrics::psnr;
use crate::prng;
use crate::tle;

pub use header::{StegoHeader, HEADER_BITS};
pub use scan::{Phase, ScanOrder};

/// Share of marked interior cells above which an image counts as complex.
pub const COMPLEX_THRESHOLD: f64 = 0.05;

/// Up to two extracted bits of one pixel, in embedding order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PixelBits {
    len: u8,
    bits: [bool; 2],
}

impl PixelBits {
    pub fn push(&mut self, b: bool) {
        self.bits[self.len as usize] = b;
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits[..self.len as usize]
    }
}

/// Embedding rule family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Double-peak rule, 8-neighbour predictor pair, ±2 per pixel.
    Dtle,
    /// Single-peak baseline, rhombus predictor pair, ±1 per pixel.
    Tle,
}

impl Scheme {
    pub fn default_n(self) -> u8 {
        match self {
            Scheme::Dtle => 2,
            Scheme::Tle => 3,
        }
    }

    /// Location-map margin: the largest excursion a pixel can make.
    pub fn margin(self) -> u8 {
        match self {
            Scheme::Dtle => 2,
            Scheme::Tle => 1,
        }
    }

    /// Largest cut for which the HSB range can absorb the margin.
    pub fn max_n(self) -> u8 {
        match self {
            Scheme::Dtle => 5,
            Scheme::Tle => 6,
        }
    }

    #[inline]
    fn predict(self, plane: &[u8], width: usize, k: usize) -> (i32, i32) {
        match self {
            Scheme::Dtle => dtle::pair_from_sorted(&dtle::neighbours8(plane, width, k)),
            Scheme::Tle => tle::pair_from_sorted(&tle::neighbours4(plane, width, k)),
        }
    }

    #[inline]
    fn embed_pixel(self, v: i32, p1: i32, p2: i32, max: i32, next: &mut impl FnMut() -> bool) -> Result<(i32, u8)> {
        match self {
            Scheme::Dtle => dtle::embed_pixel(v, p1, p2, max, next),
            Scheme::Tle => tle::embed_pixel(v, p1, p2, max, next),
        }
    }

    #[inline]
    fn extract_pixel(self, v: i32, p1: i32, p2: i32) -> (i32, PixelBits) {
        match self {
            Scheme::Dtle => dtle::extract_pixel(v, p1, p2),
            Scheme::Tle => tle::extract_pixel(v, p1, p2),
        }
    }

    fn neighbourhood(self, plane: &[u8], width: usize, k: usize) -> Vec<u8> {
        match self {
            Scheme::Dtle => dtle::neighbours8(plane, width, k).to_vec(),
            Scheme::Tle => tle::neighbours4(plane, width, k).to_vec(),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Dtle => "dtle",
            Scheme::Tle => "tle",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtle" => Ok(Scheme::Dtle),
            "tle" => Ok(Scheme::Tle),
            other => Err(Error::Parameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// MED pre-processing policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MedMode {
    On,
    Off,
    /// On only for complex covers (see [`is_complex`]).
    Auto,
}

impl FromStr for MedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "on" => Ok(MedMode::On),
            "off" => Ok(MedMode::Off),
            "auto" => Ok(MedMode::Auto),
            other => Err(Error::Parameter(format!("unknown MED mode {other:?}"))),
        }
    }
}

impl fmt::Display for MedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MedMode::On => "on",
            MedMode::Off => "off",
            MedMode::Auto => "auto",
        })
    }
}

/// Parameters shared by sender and receiver. Nothing here travels in the
/// stego image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodecOptions {
    pub scheme: Scheme,
    pub n: u8,
    pub use_med: bool,
}

impl CodecOptions {
    pub fn dtle(use_med: bool) -> Self {
        Self {
            scheme: Scheme::Dtle,
            n: 2,
            use_med,
        }
    }

    pub fn tle() -> Self {
        Self {
            scheme: Scheme::Tle,
            n: 3,
            use_med: false,
        }
    }

    pub fn with_n(self, n: u8) -> Self {
        Self { n, ..self }
    }

    fn hsb_max(&self) -> i32 {
        bitplane::hsb_max(self.n) as i32
    }

    fn validate(&self, width: usize, height: usize) -> Result<()> {
        if width < 3 || height < 3 {
            return Err(Error::Parameter(format!("cover must be at least 3x3, got {width}x{height}")));
        }
        if width > u16::MAX as usize || height > u16::MAX as usize {
            return Err(Error::Parameter(format!("{width}x{height} exceeds 16-bit coordinates")));
        }
        if self.n > self.scheme.max_n() {
            return Err(Error::Parameter(format!(
                "{} needs n <= {}, got {}",
                self.scheme,
                self.scheme.max_n(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Share of interior HSB cells the location map would mark without MED.
pub fn marked_fraction(cover: &GrayImage, scheme: Scheme, n: u8) -> Result<f64> {
    let planes = bitplane::decompose(cover, n)?;
    let (_, lm) = location_map::build_and_shift(&planes.hsb, planes.hsb_max(), scheme.margin())?;
    let interior = (cover.width().saturating_sub(2) * cover.height().saturating_sub(2)).max(1);
    Ok(lm.marked() as f64 / interior as f64)
}

/// Complex covers mark more than 5% of interior cells in the location map.
pub fn is_complex(cover: &GrayImage, scheme: Scheme, n: u8) -> Result<bool> {
    Ok(marked_fraction(cover, scheme, n)? > COMPLEX_THRESHOLD)
}

/// Resolve a [`MedMode`] against a cover.
pub fn resolve_med(cover: &GrayImage, mode: MedMode, scheme: Scheme, n: u8) -> Result<bool> {
    match mode {
        MedMode::On => Ok(true),
        MedMode::Off => Ok(false),
        MedMode::Auto => is_complex(cover, scheme, n),
    }
}

/// Output of [`embed`].
#[derive(Debug, Clone)]
pub struct StegoResult {
    pub stego: GrayImage,
    /// Embedded secret bits (`L_S`).
    pub ec: u64,
    /// Bit slots consumed, padding included.
    pub slots_used: u64,
    /// PSNR against the cover as given.
    pub psnr_original: f64,
    /// PSNR against the image actually carried (MED domain when enabled).
    pub psnr_cover: f64,
    pub header: StegoHeader,
    /// Size of the serialized MED side data.
    pub aux_bits: u64,
    pub use_med: bool,
}

impl StegoResult {
    pub fn lclm_bits(&self) -> u64 {
        self.header.l_clm as u64
    }

    pub fn k_end(&self) -> u64 {
        self.header.k_end as u64
    }
}

/// Output of [`extract`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extracted {
    pub secret: Bits,
    pub image: GrayImage,
    pub header: StegoHeader,
}

/// Result of [`capacity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityReport {
    /// Largest prefix of the seeded stream that embeds successfully.
    pub max_secret_bits: u64,
    /// Header originals + compressed map + aux.
    pub overhead_bits: u64,
    /// Compressed location map alone.
    pub lclm_bits: u64,
    /// Serialized MED side data alone.
    pub aux_bits: u64,
    /// Bits a full dry-run walk with the seeded stream absorbs.
    pub slot_count: u64,
    /// False when the search reaches the empty secret and even that fails.
    pub embeddable: bool,
}

/// Cover-derived state shared by every embedding attempt.
struct Prepared {
    opts: CodecOptions,
    /// Carrier image (the MED difference image when enabled).
    carrier: GrayImage,
    aux: AuxInfo,
    hsb: Raster,
    lsb: Raster,
    clm: CompressedMap,
    scan: ScanOrder,
    slots: Vec<header::Slot>,
}

fn prepare(cover: &GrayImage, opts: &CodecOptions) -> Result<Prepared> {
    opts.validate(cover.width(), cover.height())?;
    let slots = header::header_slots(cover.width(), cover.height(), opts.n)?;
    let (carrier, aux) = if opts.use_med {
        let (diff, aux) = med::med_forward(cover)?;
        (diff.into_raster(), aux)
    } else {
        (cover.clone(), AuxInfo::default())
    };
    let PlanePair { hsb, lsb, .. } = bitplane::decompose(&carrier, opts.n)?;
    let (hsb, lm) = location_map::build_and_shift(&hsb, opts.hsb_max() as u16, opts.scheme.margin())?;
    let clm = lm.compress();
    Ok(Prepared {
        opts: *opts,
        carrier,
        aux,
        hsb,
        lsb,
        clm,
        scan: ScanOrder::new(cover.width(), cover.height()),
        slots,
    })
}

struct Walk {
    hsb: Raster,
    /// Processed scan positions.
    k_end: usize,
    /// Bits drawn, padding included.
    consumed: usize,
    /// Payload bits placed.
    placed: usize,
}

impl Prepared {
    fn overhead_bits(&self) -> usize {
        HEADER_BITS + self.clm.bit_len() + self.aux.bit_len()
    }

    fn payload(&self, secret: &BitSlice) -> Bits {
        let mut p = Bits::with_capacity(secret.len() + self.overhead_bits());
        p.extend_from_bitslice(secret);
        p.extend(header::read_slots(&self.lsb, &self.slots));
        p.extend_from_bitslice(&self.clm.bits);
        self.aux.write_bits(&mut p);
        p
    }

    /// Embed `payload` along the scan. With `exhaust`, every position is
    /// processed regardless of when the payload runs out (dry run).
    fn walk(&self, payload: &BitSlice, exhaust: bool, mut observe: Option<&mut Vec<Vec<u8>>>) -> Result<Walk> {
        let scheme = self.opts.scheme;
        let max = self.opts.hsb_max();
        let width = self.hsb.width();
        let mut hsb = self.hsb.clone();
        let mut pos = 0usize;
        let mut consumed = 0usize;
        let mut k_end = 0usize;
        for (k, &cell) in self.scan.linear().iter().enumerate() {
            if !exhaust && pos >= payload.len() {
                break;
            }
            let plane = hsb.as_mut_slice();
            if let Some(obs) = observe.as_deref_mut() {
                obs.push(scheme.neighbourhood(plane, width, cell));
            }
            let (p1, p2) = scheme.predict(plane, width, cell);
            let mut next = || {
                consumed += 1;
                let b = payload.get(pos).is_some_and(|b| *b);
                pos += 1;
                b
            };
            let (v, _) = scheme.embed_pixel(plane[cell] as i32, p1, p2, max, &mut next)?;
            plane[cell] = v as u8;
            k_end = k + 1;
        }
        Ok(Walk {
            hsb,
            k_end,
            consumed,
            placed: pos.min(payload.len()),
        })
    }

    fn embed(&self, secret: &BitSlice, cover: &GrayImage) -> Result<StegoResult> {
        let payload = self.payload(secret);
        let walk = self.walk(&payload, false, None)?;
        if walk.placed < payload.len() {
            return Err(Error::InsufficientCapacity {
                needed: payload.len() as u64,
                available: walk.consumed as u64,
            });
        }
        let header = StegoHeader::new(walk.k_end, self.clm.bit_len(), secret.len(), self.aux.overflow.len())?;
        let mut lsb = self.lsb.clone();
        header::write_slots(&mut lsb, &self.slots, &header.to_bits());
        let stego = bitplane::recompose(&PlanePair::new(walk.hsb, lsb, self.opts.n)?)?;
        Ok(StegoResult {
            psnr_original: psnr(&stego, cover)?,
            psnr_cover: psnr(&stego, &self.carrier)?,
            stego,
            ec: secret.len() as u64,
            slots_used: walk.consumed as u64,
            header,
            aux_bits: self.aux.bit_len() as u64,
            use_med: self.opts.use_med,
        })
    }
}

/// Hide `secret` in `cover`.
pub fn embed(cover: &GrayImage, secret: &BitSlice, opts: &CodecOptions) -> Result<StegoResult> {
    prepare(cover, opts)?.embed(secret, cover)
}

/// Recover the secret and the bit-exact cover from a stego image.
///
/// Fails with [`Error::Corruption`] whenever the recovered data is not
/// self-consistent; as a final check the recovered pair is re-embedded and
/// must reproduce `stego` exactly.
pub fn extract(stego: &GrayImage, opts: &CodecOptions) -> Result<Extracted> {
    let out = extract_unverified(stego, opts, None)?;
    let again = embed(&out.image, &out.secret, opts).map_err(|e| match e {
        Error::Corruption(_) => e,
        other => corrupt(format!("recovered data does not re-embed: {other}")),
    })?;
    if again.stego != *stego {
        return Err(corrupt("recovered data does not reproduce the stego image"));
    }
    Ok(out)
}

fn extract_unverified(stego: &GrayImage, opts: &CodecOptions, mut observe: Option<&mut Vec<Vec<u8>>>) -> Result<Extracted> {
    let (width, height) = (stego.width(), stego.height());
    opts.validate(width, height)?;
    let scheme = opts.scheme;
    let max = opts.hsb_max();
    let slots = header::header_slots(width, height, opts.n)?;
    let PlanePair { mut hsb, mut lsb, .. } = bitplane::decompose(stego, opts.n)?;
    let header = StegoHeader::from_bits(&header::read_slots(&lsb, &slots))?;
    let scan = ScanOrder::new(width, height);
    let k_end = header.k_end as usize;
    if k_end == 0 || k_end > scan.len() {
        return Err(corrupt(format!("K_end {k_end} outside 1..={}", scan.len())));
    }

    // reverse walk; chunk k holds the bits of scan position k_end-1-k
    let mut chunks = Vec::with_capacity(k_end);
    let plane = hsb.as_mut_slice();
    for &cell in scan.linear()[..k_end].iter().rev() {
        if let Some(obs) = observe.as_deref_mut() {
            obs.push(scheme.neighbourhood(plane, width, cell));
        }
        let (p1, p2) = scheme.predict(plane, width, cell);
        let (v, bits) = scheme.extract_pixel(plane[cell] as i32, p1, p2);
        if !(0..=max).contains(&v) {
            return Err(corrupt(format!("reverse step leaves [0, {max}] with {v}")));
        }
        plane[cell] = v as u8;
        chunks.push(bits);
    }
    if let Some(obs) = observe {
        obs.reverse();
    }
    let payload: Bits = chunks.iter().rev().flat_map(|c| c.as_slice().iter().copied()).collect();

    let aux_len = AuxInfo::bit_len_for(header.n_over as usize);
    let expected = header.l_s as u64 + HEADER_BITS as u64 + header.l_clm as u64 + aux_len as u64;
    let got = payload.len() as u64;
    let last = chunks[0];
    if got < expected || got > expected + 1 {
        return Err(corrupt(format!("walk yields {got} bits, header implies {expected}")));
    }
    if got - last.len() as u64 >= expected {
        return Err(corrupt("last processed pixel carries no payload"));
    }
    if got == expected + 1 && !(last.len() == 2 && !last.as_slice()[1]) {
        return Err(corrupt("padding bit is not a trailing layer-2 zero"));
    }

    let mut r = BitReader::new(&payload);
    let secret = r.take(header.l_s as usize)?.to_bitvec();
    let originals = r.take(HEADER_BITS)?;
    let clm = r.take(header.l_clm as usize)?;
    let aux_bits = r.take(aux_len)?;

    header::write_slots(&mut lsb, &slots, originals);
    let cells = (width - 2) * (height - 2);
    let lm = LocationMap::decompress(clm, cells, width, height)?;
    if lm.compress().bits != *clm {
        return Err(corrupt("compressed location map is not canonical"));
    }
    let hsb = location_map::restore(&hsb, &lm, max as u16, scheme.margin())?;
    let carrier = bitplane::recompose(&PlanePair::new(hsb, lsb, opts.n)?)?;
    let aux = AuxInfo::read_bits(aux_bits, header.n_over as usize)?;
    let image = if opts.use_med {
        med::med_inverse(&DiffImage::new(carrier), &aux)?
    } else if aux != AuxInfo::default() {
        return Err(corrupt("MED side data present but MED is disabled"));
    } else {
        carrier
    };
    Ok(Extracted { secret, image, header })
}

/// Largest embeddable prefix of the seeded pseudo-random stream.
///
/// A full dry run with the stream gives `slot_count`; the estimate
/// `slot_count - overhead` is then confirmed by real embeds and lowered by
/// the reported shortfall until it fits, since the bits themselves steer
/// later predictions. For the same reason a different secret, even a
/// shorter one, may fall a few bits short of the reported figure.
pub fn capacity(cover: &GrayImage, opts: &CodecOptions, seed: u64) -> Result<CapacityReport> {
    let prep = prepare(cover, opts)?;
    let overhead = prep.overhead_bits();
    let stream = prng::random_bits(seed, 2 * prep.scan.len());
    let dry = prep.walk(&stream, true, None)?;
    let slot_count = dry.consumed;

    let report = |max_secret_bits: usize, embeddable: bool| CapacityReport {
        max_secret_bits: max_secret_bits as u64,
        overhead_bits: overhead as u64,
        lclm_bits: prep.clm.bit_len() as u64,
        aux_bits: prep.aux.bit_len() as u64,
        slot_count: slot_count as u64,
        embeddable,
    };
    let mut len = slot_count.saturating_sub(overhead);
    loop {
        match prep.embed(&stream[..len], cover) {
            Ok(_) => return Ok(report(len, true)),
            Err(Error::InsufficientCapacity { needed, available }) if len > 0 => {
                let short = (needed - available).max(1) as usize;
                len = len.saturating_sub(short);
            }
            Err(Error::InsufficientCapacity { .. }) => return Ok(report(0, false)),
            Err(e) => return Err(e),
        }
    }
}

/// Neighbourhoods seen at each scan position, on the embedding side and on
/// the extraction side (both in forward scan order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextTrace {
    pub embed: Vec<Vec<u8>>,
    pub extract: Vec<Vec<u8>>,
}

/// Embed and extract while recording the sorted neighbourhood used for
/// every processed pixel.
pub fn trace_contexts(cover: &GrayImage, secret: &BitSlice, opts: &CodecOptions) -> Result<ContextTrace> {
    let prep = prepare(cover, opts)?;
    let mut embed_ctx = Vec::new();
    let payload = prep.payload(secret);
    let walk = prep.walk(&payload, false, Some(&mut embed_ctx))?;
    if walk.placed < payload.len() {
        return Err(Error::InsufficientCapacity {
            needed: payload.len() as u64,
            available: walk.consumed as u64,
        });
    }
    let stego = prep.embed(secret, cover)?.stego;
    let mut extract_ctx = Vec::new();
    extract_unverified(&stego, opts, Some(&mut extract_ctx))?;
    Ok(ContextTrace {
        embed: embed_ctx,
        extract: extract_ctx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;
    use bitvec::prelude::*;

    fn smooth(w: usize, h: usize) -> GrayImage {
        Raster::from_fn(w, h, |i, j| (60 + (i * 3 + j * 2) % 40) as u8)
    }

    #[test]
    fn empty_secret_still_embeds_framing() {
        let cover = smooth(32, 32);
        for opts in [CodecOptions::dtle(false), CodecOptions::dtle(true), CodecOptions::tle()] {
            let r = embed(&cover, &Bits::new(), &opts).unwrap();
            assert!(r.header.k_end > 0);
            assert_eq!(r.ec, 0);
            let out = extract(&r.stego, &opts).unwrap();
            assert!(out.secret.is_empty());
            assert_eq!(out.image, cover);
        }
    }

    #[test]
    fn constant_cover_short_secret() {
        let secret = bits![u8, Msb0; 1, 0, 1, 1].to_bitvec();
        let cover = Raster::filled(16, 16, 100);
        let opts = CodecOptions::dtle(false);
        let r = embed(&cover, &secret, &opts).unwrap();
        let out = extract(&r.stego, &opts).unwrap();
        assert_eq!(out.secret, secret);
        assert_eq!(out.image, cover);

        // an 8x8 interior (36 pixels, <= 72 slots) cannot hold the framing
        match embed(&Raster::filled(8, 8, 100), &secret, &opts) {
            Err(Error::InsufficientCapacity { needed, available }) => assert!(needed > available),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_options() {
        let cover = smooth(16, 16);
        assert!(matches!(embed(&cover, &Bits::new(), &CodecOptions::dtle(false).with_n(6)), Err(Error::Parameter(_))));
        assert!(matches!(embed(&Raster::filled(2, 9, 0), &Bits::new(), &CodecOptions::dtle(false)), Err(Error::Parameter(_))));
        assert!(matches!(
            embed(&Raster::filled(3, 3, 0), &Bits::new(), &CodecOptions::dtle(false)),
            Err(Error::HeaderSpace { .. })
        ));
    }

    #[test]
    fn capacity_is_embeddable() {
        let cover = smooth(40, 30);
        for opts in [CodecOptions::dtle(false), CodecOptions::tle()] {
            let cap = capacity(&cover, &opts, 0).unwrap();
            assert!(cap.embeddable);
            assert!(cap.max_secret_bits + cap.overhead_bits <= cap.slot_count + 2);
            let secret = prng::random_bits(0, cap.max_secret_bits as usize);
            let r = embed(&cover, &secret, &opts).unwrap();
            assert_eq!(r.ec, cap.max_secret_bits);
            assert_eq!(capacity(&cover, &opts, 0).unwrap(), cap);
        }
    }

    #[test]
    fn tiny_cover_has_no_capacity() {
        let cap = capacity(&Raster::filled(8, 8, 100), &CodecOptions::tle(), 0).unwrap();
        assert!(!cap.embeddable);
        assert_eq!(cap.max_secret_bits, 0);
    }

    #[test]
    fn scheme_and_mode_parse() {
        assert_eq!("DTLE".parse::<Scheme>().unwrap(), Scheme::Dtle);
        assert_eq!("auto".parse::<MedMode>().unwrap(), MedMode::Auto);
        assert!("x".parse::<Scheme>().is_err());
    }
}
