use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dtle_core::bits::to_bytes;
use dtle_core::{random_bits, write_pgm, Raster};

fn dtle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtle")).args(args).output().expect("binary runs")
}

fn lena() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/standard/lena.pgm")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn random_secret_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let stego = dir.path().join("stego.pgm");
    let back = dir.path().join("back.pgm");
    let secret = dir.path().join("secret.bin");
    let out = dtle(&["embed", "--in", s(&lena()), "--out", s(&stego), "--secret-random", "1000", "--seed", "7", "--med", "off"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["ec"], 1000);
    assert_eq!(summary["med"], "off");
    for key in ["psnr_original", "psnr_cover", "k_end", "l_clm"] {
        assert!(summary.get(key).is_some(), "{key}");
    }

    let out = dtle(&["extract", "--in", s(&stego), "--out", s(&back), "--secret", s(&secret)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["secret_bits"], 1000);
    assert_eq!(std::fs::read(&secret).unwrap(), to_bytes(&random_bits(7, 1000)));
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(lena()).unwrap());
}

#[test]
fn secret_file_with_bit_length() {
    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("cover.pgm");
    std::fs::write(&cover, write_pgm(&Raster::from_fn(64, 64, |i, j| (100 + (i + j) % 13) as u8))).unwrap();
    let secret = dir.path().join("msg.bin");
    std::fs::write(&secret, [0xDE, 0xAD, 0xBE, 0xEF]).unwrap();
    let stego = dir.path().join("stego.pgm");
    let out = dtle(&[
        "embed", "--in", s(&cover), "--out", s(&stego), "--secret", s(&secret), "--secret-bits", "27", "--scheme", "tle",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["n"], 3);
    let got = dir.path().join("got.bin");
    let back = dir.path().join("back.pgm");
    let out = dtle(&["extract", "--in", s(&stego), "--out", s(&back), "--secret", s(&got), "--scheme", "tle"]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&got).unwrap(), [0xDE, 0xAD, 0xBE, 0xE0]);
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&cover).unwrap());

    let out = dtle(&["embed", "--in", s(&cover), "--out", s(&stego), "--secret", s(&secret), "--secret-bits", "33"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn capacity_of_lena() {
    let out = dtle(&["capacity", "--in", s(&lena()), "--med", "off"]);
    assert!(out.status.success());
    let bits = json(&out)["max_secret_bits"].as_f64().unwrap();
    assert!((bits - 264_722.0).abs() <= 0.05 * 264_722.0, "{bits}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x");
    let out = dtle(&["extract", "--in", s(&lena()), "--out", s(&x), "--secret", s(&x)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!x.exists());

    let out = dtle(&["embed", "--in", s(&lena()), "--out", s(&x), "--secret-random", "5000000"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("needs") && err.contains("offers"), "{err}");

    assert_eq!(dtle(&["embed", "--in", s(&lena())]).status.code(), Some(1));
    assert_eq!(dtle(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dtle(&["capacity", "--in", "/nonexistent.pgm"]).status.code(), Some(1));
    let out = dtle(&["embed", "--in", s(&lena()), "--out", s(&x), "--secret-random", "8", "--secret", s(&x)]);
    assert_eq!(out.status.code(), Some(1));
    let out = dtle(&["extract", "--in", s(&lena()), "--out", s(&x), "--secret", s(&x), "--med", "auto"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(dtle(&["capacity", "--in", s(&lena()), "--n", "9"]).status.code(), Some(1));
    assert_eq!(dtle(&["--help"]).status.code(), Some(0));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("cover.pgm");
    let img = Raster::from_fn(48, 48, |i, j| if (i * j) % 17 == 0 { 255 } else { (200 + (i + j) % 40) as u8 });
    std::fs::write(&cover, write_pgm(&img)).unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let stego = dir.path().join(format!("s{k}.pgm"));
        let out = dtle(&["embed", "--in", s(&cover), "--out", s(&stego), "--secret-random", "300", "--seed", "3", "--med", "auto"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push((out.stdout, std::fs::read(&stego).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let summary: serde_json::Value = serde_json::from_slice(&runs[0].0).unwrap();
    let med = summary["med"].as_str().unwrap();
    let back = dir.path().join("back.pgm");
    let secret = dir.path().join("sec");
    let out = dtle(&["extract", "--in", s(&dir.path().join("s0.pgm")), "--out", s(&back), "--secret", s(&secret), "--med", med]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&back).unwrap(), std::fs::read(&cover).unwrap());
}

#[test]
fn bench_directory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let empty = tempfile::tempdir().unwrap();
    let out = dtle(&["bench", "--in", s(empty.path()), "--csv", s(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.trim_end(),
        "image,scheme,n,use_med,ec_bits,er_bpp,psnr_original_db,psnr_cover_db,aux_bits,lclm_bits,complex,runtime_ms"
    );

    let images = tempfile::tempdir().unwrap();
    for (name, seed) in [("b", 1usize), ("a", 2)] {
        let img = Raster::from_fn(40, 40, |i, j| (90 + (i * 3 + j + seed) % 20) as u8);
        std::fs::write(images.path().join(format!("{name}.pgm")), write_pgm(&img)).unwrap();
    }
    let out = dtle(&["bench", "--in", s(images.path()), "--csv", s(&csv), "--scheme", "dtle-nomed", "--scheme", "tle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(keys, [("a", "DTLE-NoMED"), ("a", "TLE"), ("b", "DTLE-NoMED"), ("b", "TLE")]);
    assert!(rows.iter().all(|r| r[6].split('.').nth(1).is_some_and(|f| f.len() == 4)));
    let summary = json(&out);
    assert_eq!(summary["rows"], 4);
    assert!(!summary["spe"].as_array().unwrap().is_empty());

    std::fs::write(images.path().join("c.pgm"), b"P5 broken").unwrap();
    let out = dtle(&["bench", "--in", s(images.path()), "--csv", s(&csv), "--scheme", "tle"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn compare_single_image() {
    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("tile.pgm");
    std::fs::write(&cover, write_pgm(&Raster::from_fn(40, 40, |i, j| (120 + (i * 2 + j) % 15) as u8))).unwrap();
    let out = dtle(&["compare", "--in", s(&cover)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let schemes: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(schemes, ["DTLE", "DTLE-NoMED", "TLE"]);
}
