use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dtle_core::bench::{self, BenchConfig, BenchScheme};
use dtle_core::bits::{from_bytes, to_bytes};
use dtle_core::codec::{self, CodecOptions, MedMode, Scheme};
use dtle_core::{random_bits, read_pgm, write_pgm, Bits, GrayImage};
use serde::Serialize;

mod exit {
    pub const USAGE: u8 = 1;
    pub const CAPACITY: u8 = 2;
    pub const CORRUPT: u8 = 3;
    pub const INCOMPLETE: u8 = 4;
}

/// Reversible data hiding in grayscale PGM images.
#[derive(Debug, Parser)]
#[command(name = "dtle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hide a secret in a cover image.
    Embed(EmbedArgs),
    /// Recover the secret and the original image from a stego image.
    Extract(ExtractArgs),
    /// Report the largest secret a cover can take.
    Capacity(CapacityArgs),
    /// Measure every PGM in a directory under each scheme.
    Bench(BenchArgs),
    /// Measure one image under each scheme.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct CodecArgs {
    /// Embedding scheme.
    #[arg(long, default_value = "dtle", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Bit position splitting high and low planes; defaults to 2 for dtle, 3 for tle.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=7))]
    n: Option<u8>,
}

impl CodecArgs {
    fn options(&self, use_med: bool) -> CodecOptions {
        CodecOptions {
            scheme: self.scheme,
            n: self.n.unwrap_or(self.scheme.default_n()),
            use_med,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["secret", "secret_random"])))]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Secret file, bits taken most significant first.
    #[arg(long)]
    secret: Option<PathBuf>,
    /// Number of bits to use from --secret (default: the whole file).
    #[arg(long, requires = "secret")]
    secret_bits: Option<usize>,
    /// Embed this many pseudo-random bits drawn from --seed.
    #[arg(long)]
    secret_random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// MED pre-processing; auto enables it for complex covers.
    #[arg(long, default_value = "off", value_parser = parse_med)]
    med: MedMode,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Recovered cover image.
    #[arg(long)]
    out: PathBuf,
    /// File receiving the secret, zero-padded to whole bytes.
    #[arg(long)]
    secret: PathBuf,
    /// MED setting used at embedding time (on or off).
    #[arg(long, default_value = "off", value_parser = parse_med)]
    med: MedMode,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "off", value_parser = parse_med)]
    med: MedMode,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of PGM images.
    #[arg(long = "in")]
    input: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cut override for every scheme.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=7))]
    n: Option<u8>,
    /// Schemes to run (dtle, dtle-nomed, tle); repeatable. Default: all.
    #[arg(long, value_parser = parse_bench_scheme)]
    scheme: Vec<BenchScheme>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=7))]
    n: Option<u8>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: dtle_core::Error| e.to_string())
}

fn parse_med(s: &str) -> Result<MedMode, String> {
    s.parse().map_err(|e: dtle_core::Error| e.to_string())
}

fn parse_bench_scheme(s: &str) -> Result<BenchScheme, String> {
    s.parse().map_err(|e: dtle_core::Error| e.to_string())
}

/// Target capacities for the SPE table printed by `bench`.
const SPE_TARGETS: [u64; 11] = [
    0, 50_000, 100_000, 150_000, 200_000, 250_000, 300_000, 350_000, 400_000, 450_000, 500_000,
];

/// `null` stands for an infinite PSNR (identical images).
fn db(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize)]
struct EmbedSummary {
    ec: u64,
    psnr_original: Option<f64>,
    psnr_cover: Option<f64>,
    k_end: u64,
    l_clm: u64,
    scheme: String,
    n: u8,
    med: String,
    slots_used: u64,
    aux_bits: u64,
}

#[derive(Serialize)]
struct ExtractSummary {
    secret_bits: usize,
    k_end: u64,
    l_clm: u64,
    scheme: String,
    n: u8,
    med: String,
}

#[derive(Serialize)]
struct CapacitySummary {
    max_secret_bits: u64,
    overhead_bits: u64,
    slot_count: u64,
    embeddable: bool,
    lclm_bits: u64,
    aux_bits: u64,
    scheme: String,
    n: u8,
    med: String,
    seed: u64,
}

#[derive(Serialize)]
struct SpeEntry {
    scheme: String,
    target_bits: u64,
    spe: f64,
}

#[derive(Serialize)]
struct BenchSummary {
    rows: usize,
    skipped: Vec<String>,
    spe: Vec<SpeEntry>,
}

fn read_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_pgm(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn on_off(use_med: bool) -> String {
    if use_med { "on" } else { "off" }.to_string()
}

fn load_secret(args: &EmbedArgs) -> Result<Bits> {
    if let Some(len) = args.secret_random {
        return Ok(random_bits(args.seed, len));
    }
    let path = args.secret.as_ref().expect("clap enforces a secret source");
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let len = args.secret_bits.unwrap_or(bytes.len() * 8);
    match from_bytes(&bytes, len) {
        Some(bits) => Ok(bits),
        None => bail!("--secret-bits {len} exceeds the {} bits in {}", bytes.len() * 8, path.display()),
    }
}

fn embed(args: EmbedArgs) -> Result<u8> {
    let cover = read_image(&args.input)?;
    let secret = load_secret(&args)?;
    let n = args.codec.n.unwrap_or(args.codec.scheme.default_n());
    let use_med = codec::resolve_med(&cover, args.med, args.codec.scheme, n)?;
    let opts = args.codec.options(use_med);
    let r = codec::embed(&cover, &secret, &opts)?;
    write_file(&args.out, &write_pgm(&r.stego))?;
    print_json(&EmbedSummary {
        ec: r.ec,
        psnr_original: db(r.psnr_original),
        psnr_cover: db(r.psnr_cover),
        k_end: r.k_end(),
        l_clm: r.lclm_bits(),
        scheme: opts.scheme.to_string(),
        n: opts.n,
        med: on_off(use_med),
        slots_used: r.slots_used,
        aux_bits: r.aux_bits,
    })?;
    Ok(0)
}

fn extract(args: ExtractArgs) -> Result<u8> {
    let use_med = match args.med {
        MedMode::On => true,
        MedMode::Off => false,
        MedMode::Auto => bail!("--med auto is only meaningful when embedding; pass the mode reported by embed"),
    };
    let stego = read_image(&args.input)?;
    let opts = args.codec.options(use_med);
    let out = codec::extract(&stego, &opts)?;
    write_file(&args.out, &write_pgm(&out.image))?;
    write_file(&args.secret, &to_bytes(&out.secret))?;
    print_json(&ExtractSummary {
        secret_bits: out.secret.len(),
        k_end: out.header.k_end as u64,
        l_clm: out.header.l_clm as u64,
        scheme: opts.scheme.to_string(),
        n: opts.n,
        med: on_off(use_med),
    })?;
    Ok(0)
}

fn capacity(args: CapacityArgs) -> Result<u8> {
    let cover = read_image(&args.input)?;
    let n = args.codec.n.unwrap_or(args.codec.scheme.default_n());
    let use_med = codec::resolve_med(&cover, args.med, args.codec.scheme, n)?;
    let opts = args.codec.options(use_med);
    let cap = codec::capacity(&cover, &opts, args.seed)?;
    print_json(&CapacitySummary {
        max_secret_bits: cap.max_secret_bits,
        overhead_bits: cap.overhead_bits,
        slot_count: cap.slot_count,
        embeddable: cap.embeddable,
        lclm_bits: cap.lclm_bits,
        aux_bits: cap.aux_bits,
        scheme: opts.scheme.to_string(),
        n: opts.n,
        med: on_off(use_med),
        seed: args.seed,
    })?;
    Ok(0)
}

fn emit_csv(report: &bench::BenchReport, csv: Option<&Path>) -> Result<()> {
    match csv {
        Some(path) => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            write_file(path, &buf)
        }
        None => Ok(report.write_csv(io::stdout().lock())?),
    }
}

fn bench_cmd(args: BenchArgs) -> Result<u8> {
    let config = BenchConfig {
        schemes: if args.scheme.is_empty() { BenchScheme::ALL.to_vec() } else { args.scheme },
        n: args.n,
        seed: args.seed,
        targets: SPE_TARGETS.to_vec(),
    };
    let report = bench::bench_dir(&args.input, &config)?;
    emit_csv(&report, args.csv.as_deref())?;
    let summary = BenchSummary {
        rows: report.results.len(),
        skipped: report.skipped.iter().map(|(name, why)| format!("{name}: {why}")).collect(),
        spe: report
            .spe
            .iter()
            .map(|r| SpeEntry {
                scheme: r.scheme.to_string(),
                target_bits: r.target_bits,
                spe: r.spe,
            })
            .collect(),
    };
    if args.csv.is_some() {
        print_json(&summary)?;
    } else {
        eprintln!("{}", serde_json::to_string_pretty(&summary)?);
    }
    Ok(if report.is_complete() { 0 } else { exit::INCOMPLETE })
}

fn compare(args: CompareArgs) -> Result<u8> {
    let cover = read_image(&args.input)?;
    let name = args.input.file_stem().unwrap_or_default().to_string_lossy().into_owned();
    let config = BenchConfig {
        n: args.n,
        seed: args.seed,
        ..BenchConfig::default()
    };
    let report = bench::bench_images(&[(name, cover)], &config);
    emit_csv(&report, args.csv.as_deref())?;
    for (what, why) in &report.skipped {
        eprintln!("{what}: {why}");
    }
    Ok(if report.is_complete() { 0 } else { exit::INCOMPLETE })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Embed(a) => embed(a),
        Command::Extract(a) => extract(a),
        Command::Capacity(a) => capacity(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Compare(a) => compare(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<dtle_core::Error>() {
        Some(dtle_core::Error::InsufficientCapacity { .. }) => exit::CAPACITY,
        Some(dtle_core::Error::Corruption(_)) => exit::CORRUPT,
        _ => exit::USAGE,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
