//! Test-only reference implementations and fixture helpers.
//!
//! The oracle below recomputes entropy maps with the most direct loops
//! possible: explicit window enumeration, `BTreeMap` symbol counts and no
//! incremental state. It shares nothing with the crate's scoring code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use entropchain_core::imaging::RgbImage;

pub fn oracle_entropy(signal: &[u8]) -> f64 {
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &v in signal {
        *counts.entry(v).or_default() += 1;
    }
    let n = signal.len() as f64;
    let mut total = 0.0;
    for (_, &c) in &counts {
        let p = c as f64 / n;
        total += p * (1.0 / p).log2();
    }
    total
}

/// `(exact, quantized)` row-major maps of `grid` (`height` rows of `width`).
pub fn oracle_matrix(grid: &[Vec<u8>], radius: usize) -> (Vec<Vec<f64>>, Vec<Vec<u8>>) {
    let h = grid.len();
    let w = grid[0].len();
    let mut exact = vec![vec![0.0; w]; h];
    let mut quant = vec![vec![0u8; w]; h];
    for r in 0..h {
        for c in 0..w {
            let lo_y = if r >= radius { r - radius } else { 0 };
            let hi_y = if r + radius < h { r + radius } else { h };
            let lo_x = if c >= radius { c - radius } else { 0 };
            let hi_x = if c + radius < w { c + radius } else { w };
            let mut region = Vec::new();
            for y in lo_y..hi_y {
                for x in lo_x..hi_x {
                    region.push(grid[y][x]);
                }
            }
            let e = oracle_entropy(&region);
            exact[r][c] = e;
            quant[r][c] = e.trunc() as u8;
        }
    }
    (exact, quant)
}

pub fn oracle_luma(img: &RgbImage) -> Vec<Vec<u8>> {
    (0..img.height())
        .map(|y| {
            (0..img.width())
                .map(|x| {
                    let [r, g, b] = img.pixel(x, y);
                    let l = (r as u32 * 299 + g as u32 * 587 + b as u32 * 114) / 1000;
                    l as u8
                })
                .collect()
        })
        .collect()
}

/// Score of an image already at analysis size.
pub fn oracle_score(img: &RgbImage) -> u64 {
    let gray = oracle_luma(img);
    let (_, first) = oracle_matrix(&gray, 3);
    let (_, second) = oracle_matrix(&first, 3);
    second.iter().flatten().map(|&v| v as u64).sum()
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures_dir().join("corpus")
}

/// Golden scores keyed by `label/filename`, as produced by the fixture script.
pub fn golden_scores() -> HashMap<String, u64> {
    let text = std::fs::read_to_string(fixtures_dir().join("golden_scores.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["scores"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.as_u64().unwrap()))
        .collect()
}

/// Concentric rings over a gradient; scores well above 500.
pub fn structured_image(offset: u32) -> RgbImage {
    RgbImage::from_fn(80, 80, |x, y| {
        let dx = x as f64 - 40.0 - (offset % 7) as f64;
        let dy = y as f64 - 40.0 + (offset % 5) as f64;
        let band = ((dx * dx + dy * dy).sqrt() as u32 / 5) % 2;
        [
            (band * 200 + x).min(255) as u8,
            (band * 120 + 2 * y).min(255) as u8,
            90,
        ]
    })
}

/// Deterministic xorshift noise.
pub fn noise_image(seed: u64, side: u32) -> RgbImage {
    let mut s = seed.max(1);
    RgbImage::from_fn(side, side, |_, _| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let v = (s >> 24) as u8;
        [v, v, v]
    })
}
