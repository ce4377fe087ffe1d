//! Corpus sweep: maximum capacity, PSNR and side-information size per
//! image and scheme, written as CSV, plus success-percentage tables.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::codec::{self, CodecOptions};
use crate::error::{Error, Result};
use crate::image::{read_pgm, GrayImage};
use crate::metrics::{embedding_rate, spe};
use crate::prng::random_bits;

pub const CSV_HEADER: [&str; 12] = [
    "image",
    "scheme",
    "n",
    "use_med",
    "ec_bits",
    "er_bpp",
    "psnr_original_db",
    "psnr_cover_db",
    "aux_bits",
    "lclm_bits",
    "complex",
    "runtime_ms",
];

/// A scheme as it appears in the comparison tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchScheme {
    Dtle,
    DtleNoMed,
    Tle,
}

impl BenchScheme {
    pub const ALL: [BenchScheme; 3] = [BenchScheme::Dtle, BenchScheme::DtleNoMed, BenchScheme::Tle];

    /// Codec options, `n` overriding the scheme default.
    pub fn options(self, n: Option<u8>) -> CodecOptions {
        let opts = match self {
            BenchScheme::Dtle => CodecOptions::dtle(true),
            BenchScheme::DtleNoMed => CodecOptions::dtle(false),
            BenchScheme::Tle => CodecOptions::tle(),
        };
        match n {
            Some(n) => opts.with_n(n),
            None => opts,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BenchScheme::Dtle => "DTLE",
            BenchScheme::DtleNoMed => "DTLE-NoMED",
            BenchScheme::Tle => "TLE",
        }
    }
}

impl fmt::Display for BenchScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BenchScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtle" => Ok(BenchScheme::Dtle),
            "dtle-nomed" | "dtle_nomed" | "nomed" => Ok(BenchScheme::DtleNoMed),
            "tle" => Ok(BenchScheme::Tle),
            other => Err(Error::Parameter(format!("unknown bench scheme {other:?}"))),
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageResult {
    pub image: String,
    pub scheme: BenchScheme,
    pub n: u8,
    pub use_med: bool,
    pub ec: u64,
    pub er: f64,
    pub psnr_original: f64,
    pub psnr_cover: f64,
    /// Compressed location map plus MED side data.
    pub aux_bits: u64,
    pub lclm_bits: u64,
    pub complex: bool,
    pub runtime_ms: u64,
}

impl ImageResult {
    fn record(&self) -> [String; 12] {
        [
            self.image.clone(),
            self.scheme.label().to_string(),
            self.n.to_string(),
            self.use_med.to_string(),
            self.ec.to_string(),
            format!("{:.6}", self.er),
            fmt_db(self.psnr_original),
            fmt_db(self.psnr_cover),
            self.aux_bits.to_string(),
            self.lclm_bits.to_string(),
            self.complex.to_string(),
            self.runtime_ms.to_string(),
        ]
    }
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.4}")
    }
}

/// Maximum-capacity measurement of one cover: the seeded capacity search,
/// then a real embed of that many seeded bits. A cover that cannot carry
/// the framing at all is reported with zero capacity and an untouched
/// image (infinite PSNR).
pub fn measure(name: &str, cover: &GrayImage, scheme: BenchScheme, n: Option<u8>, seed: u64) -> Result<ImageResult> {
    let started = Instant::now();
    let opts = scheme.options(n);
    let complex = codec::is_complex(cover, opts.scheme, opts.n)?;
    let cap = codec::capacity(cover, &opts, seed)?;
    let mut row = ImageResult {
        image: name.to_string(),
        scheme,
        n: opts.n,
        use_med: opts.use_med,
        ec: 0,
        er: 0.0,
        psnr_original: f64::INFINITY,
        psnr_cover: f64::INFINITY,
        aux_bits: cap.lclm_bits + cap.aux_bits,
        lclm_bits: cap.lclm_bits,
        complex,
        runtime_ms: 0,
    };
    if !cap.embeddable {
        log::info!(
            "{name} under {scheme}: framing needs {} bits, only {} slots",
            cap.overhead_bits,
            cap.slot_count
        );
        row.runtime_ms = started.elapsed().as_millis() as u64;
        return Ok(row);
    }
    let secret = random_bits(seed, cap.max_secret_bits as usize);
    let r = codec::embed(cover, &secret, &opts)?;
    Ok(ImageResult {
        image: name.to_string(),
        scheme,
        n: opts.n,
        use_med: opts.use_med,
        ec: r.ec,
        er: embedding_rate(r.ec, cover.len())?,
        psnr_original: r.psnr_original,
        psnr_cover: r.psnr_cover,
        aux_bits: r.lclm_bits() + r.aux_bits,
        lclm_bits: r.lclm_bits(),
        complex,
        runtime_ms: started.elapsed().as_millis() as u64,
    })
}

/// Sweep settings.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub schemes: Vec<BenchScheme>,
    /// Cut override; `None` keeps each scheme's default.
    pub n: Option<u8>,
    pub seed: u64,
    /// Target capacities for the SPE table.
    pub targets: Vec<u64>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            schemes: BenchScheme::ALL.to_vec(),
            n: None,
            seed: 0,
            targets: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeRow {
    pub scheme: BenchScheme,
    pub target_bits: u64,
    pub spe: f64,
}

/// Everything a sweep produced. Rows are sorted by (image, scheme).
#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub results: Vec<ImageResult>,
    /// Images or image/scheme pairs that could not be measured.
    pub skipped: Vec<(String, String)>,
    pub spe: Vec<SpeRow>,
}

impl BenchReport {
    pub fn is_complete(&self) -> bool {
        self.skipped.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_csv(&self.results, out)
    }

    pub fn write_spe_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "target_bits", "spe_percent"]).map_err(csv_err)?;
        for row in &self.spe {
            w.write_record([row.scheme.label().to_string(), row.target_bits.to_string(), format!("{:.2}", row.spe)])
                .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_csv<W: Write>(results: &[ImageResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in results {
        w.write_record(r.record()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// SPE per scheme and target over the measured rows.
pub fn spe_table(results: &[ImageResult], schemes: &[BenchScheme], targets: &[u64]) -> Vec<SpeRow> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let caps: Vec<u64> = results.iter().filter(|r| r.scheme == scheme).map(|r| r.ec).collect();
        for &target_bits in targets {
            if let Ok(spe) = spe(&caps, target_bits) {
                rows.push(SpeRow {
                    scheme,
                    target_bits,
                    spe,
                });
            }
        }
    }
    rows
}

/// `.pgm` files of `dir`, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Measure named covers under every configured scheme, in parallel.
pub fn bench_images(images: &[(String, GrayImage)], config: &BenchConfig) -> BenchReport {
    let jobs: Vec<(usize, BenchScheme)> = (0..images.len())
        .flat_map(|k| config.schemes.iter().map(move |&s| (k, s)))
        .collect();
    let outcomes: Vec<_> = jobs
        .par_iter()
        .map(|&(k, scheme)| {
            let (name, cover) = &images[k];
            (name, scheme, measure(name, cover, scheme, config.n, config.seed))
        })
        .collect();
    let mut report = BenchReport::default();
    for (name, scheme, outcome) in outcomes {
        match outcome {
            Ok(r) => report.results.push(r),
            Err(e) => {
                log::warn!("skipping {name} under {scheme}: {e}");
                report.skipped.push((format!("{name}/{scheme}"), e.to_string()));
            }
        }
    }
    report.results.sort_by(|a, b| (&a.image, a.scheme).cmp(&(&b.image, b.scheme)));
    report.spe = spe_table(&report.results, &config.schemes, &config.targets);
    report
}

/// Sweep every PGM in `dir`. Unreadable files are logged and listed in
/// [`BenchReport::skipped`].
pub fn bench_dir(dir: &Path, config: &BenchConfig) -> Result<BenchReport> {
    let files = list_images(dir)?;
    if files.is_empty() {
        log::warn!("no PGM images in {}", dir.display());
    }
    let mut skipped = Vec::new();
    let mut images = Vec::with_capacity(files.len());
    for path in files {
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        match std::fs::read(&path).map_err(Error::from).and_then(|b| read_pgm(&b)) {
            Ok(img) => images.push((name, img)),
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push((name, e.to_string()));
            }
        }
    }
    let mut report = bench_images(&images, config);
    skipped.append(&mut report.skipped);
    report.skipped = skipped;
    Ok(report)
}
