//! Shannon entropy of signals and images, and the "interesting image" test.
//!
//! An image is scored by converting it to 8-bit luma, mapping every pixel to
//! the entropy of its neighborhood, doing that a second time on the
//! resulting map and summing the second map. The maps are truncated to
//! 8-bit integers before reuse; the score threshold assumes those truncated
//! values.

use thiserror::Error;

use crate::imaging::{resize, RgbImage, NONCE_IMAGE_SIDE};

/// Window radius used by [`complexity_score`].
pub const DEFAULT_RADIUS: usize = 3;
/// Scores strictly above this are interesting.
pub const DEFAULT_BOTTOM_THRESHOLD: u64 = 500;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntropyError {
    #[error("entropy of an empty signal is undefined")]
    EmptySignal,
    #[error("grid of {len} values does not match {width}x{height}")]
    BufferSize { width: usize, height: usize, len: usize },
}

/// Row-major 8-bit intensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayGrid {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayGrid {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, EntropyError> {
        if values.len() != width * height {
            return Err(EntropyError::BufferSize {
                width,
                height,
                len: values.len(),
            });
        }
        Ok(GrayGrid { width, height, values })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        GrayGrid { width, height, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.width + col]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Replicates the grid into an RGB image.
    pub fn to_rgb(&self) -> RgbImage {
        RgbImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            let v = self.get(y as usize, x as usize);
            [v, v, v]
        })
    }
}

/// Per-pixel neighborhood entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyMatrix {
    width: usize,
    height: usize,
    exact: Vec<f64>,
    quantized: Vec<u8>,
}

impl EntropyMatrix {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn exact(&self) -> &[f64] {
        &self.exact
    }

    /// Entropies truncated toward zero.
    pub fn quantized(&self) -> &[u8] {
        &self.quantized
    }

    pub fn quantized_grid(&self) -> GrayGrid {
        GrayGrid {
            width: self.width,
            height: self.height,
            values: self.quantized.clone(),
        }
    }

    pub fn sum(&self) -> u64 {
        self.quantized.iter().map(|&v| u64::from(v)).sum()
    }
}

/// Shannon entropy in bits: the sum of `p * log2(1/p)` over distinct symbols.
pub fn shannon_entropy(signal: &[u8]) -> Result<f64, EntropyError> {
    if signal.is_empty() {
        return Err(EntropyError::EmptySignal);
    }
    let mut hist = Histogram::default();
    for &v in signal {
        hist.add(v);
    }
    Ok(hist.entropy(signal.len()))
}

/// 256-bin histogram that can enumerate its occupied bins in ascending order.
#[derive(Clone)]
struct Histogram {
    counts: [u32; 256],
    occupied: [u64; 4],
}

impl Default for Histogram {
    fn default() -> Self {
        Histogram {
            counts: [0; 256],
            occupied: [0; 4],
        }
    }
}

impl Histogram {
    #[inline]
    fn add(&mut self, v: u8) {
        let c = &mut self.counts[v as usize];
        if *c == 0 {
            self.occupied[(v >> 6) as usize] |= 1 << (v & 63);
        }
        *c += 1;
    }

    #[inline]
    fn remove(&mut self, v: u8) {
        let c = &mut self.counts[v as usize];
        *c -= 1;
        if *c == 0 {
            self.occupied[(v >> 6) as usize] &= !(1 << (v & 63));
        }
    }

    fn entropy(&self, len: usize) -> f64 {
        let n = len as f64;
        let mut sum = 0.0;
        for (word_idx, &word) in self.occupied.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let sym = word_idx * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let p = f64::from(self.counts[sym]) / n;
                sum += p * (1.0 / p).log2();
            }
        }
        sum
    }
}

/// Entropy of the clipped window around every cell.
///
/// The window for `(row, col)` spans rows `max(0, row - radius) .. min(height, row + radius)`
/// and the same for columns, upper bounds excluded, so an interior window is
/// `2*radius` on a side and the cell is not centered in it.
///
/// # Panics
/// If `radius` is zero.
pub fn neighborhood_entropy_matrix(grid: &GrayGrid, radius: usize) -> EntropyMatrix {
    assert!(radius >= 1, "window radius must be at least 1");
    let (w, h) = (grid.width, grid.height);
    let mut exact = Vec::with_capacity(w * h);
    for row in 0..h {
        let (y0, y1) = (row.saturating_sub(radius), (row + radius).min(h));
        let mut hist = Histogram::default();
        let mut lo = 0;
        let mut hi = 0;
        for col in 0..w {
            let (x0, x1) = (col.saturating_sub(radius), (col + radius).min(w));
            while hi < x1 {
                for y in y0..y1 {
                    hist.add(grid.get(y, hi));
                }
                hi += 1;
            }
            while lo < x0 {
                for y in y0..y1 {
                    hist.remove(grid.get(y, lo));
                }
                lo += 1;
            }
            exact.push(hist.entropy((y1 - y0) * (x1 - x0)));
        }
    }
    let quantized = exact.iter().map(|&e| e as u8).collect();
    EntropyMatrix {
        width: w,
        height: h,
        exact,
        quantized,
    }
}

/// ITU-R 601-2 luma, truncated: `(299 R + 587 G + 114 B) / 1000`.
pub fn grayscale(img: &RgbImage) -> GrayGrid {
    let values = img
        .pixels()
        .map(|[r, g, b]| ((299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b)) / 1000) as u8)
        .collect();
    GrayGrid {
        width: img.width() as usize,
        height: img.height() as usize,
        values,
    }
}

/// Intermediate products of scoring one image.
#[derive(Debug, Clone)]
pub struct ComplexityAnalysis {
    pub gray: GrayGrid,
    pub first: EntropyMatrix,
    pub second: EntropyMatrix,
}

impl ComplexityAnalysis {
    pub fn score(&self) -> u64 {
        self.second.sum()
    }
}

/// Runs the scoring pipeline on an image at its current size.
pub fn analyze(img: &RgbImage) -> ComplexityAnalysis {
    let gray = grayscale(img);
    let first = neighborhood_entropy_matrix(&gray, DEFAULT_RADIUS);
    let second = neighborhood_entropy_matrix(&first.quantized_grid(), DEFAULT_RADIUS);
    ComplexityAnalysis { gray, first, second }
}

/// Sum of the second-degree entropy map. The caller is responsible for resizing.
pub fn complexity_score(img: &RgbImage) -> u64 {
    analyze(img).score()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdict {
    pub score: u64,
    pub interesting: bool,
}

/// Resizes to 80x80 and tests `score > bottom_threshold`.
pub fn is_interesting(img: &RgbImage, bottom_threshold: u64) -> Verdict {
    is_interesting_at(img, bottom_threshold, NONCE_IMAGE_SIDE, NONCE_IMAGE_SIDE)
}

pub fn is_interesting_at(img: &RgbImage, bottom_threshold: u64, width: u32, height: u32) -> Verdict {
    let score = complexity_score(&resize(img, width, height));
    Verdict {
        score,
        interesting: passes_threshold(score, bottom_threshold),
    }
}

#[inline]
pub fn passes_threshold(score: u64, bottom_threshold: u64) -> bool {
    bottom_threshold < score
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_flip_is_one_bit() {
        assert_eq!(shannon_entropy(&[0, 1]).unwrap(), 1.0);
        assert_eq!(shannon_entropy(&[7, 7, 7, 7]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[0, 1, 2, 3]).unwrap(), 2.0);
        assert_eq!(shannon_entropy(&[]), Err(EntropyError::EmptySignal));
    }

    #[test]
    fn constant_grid_is_zero() {
        let grid = GrayGrid::from_fn(9, 6, |_, _| 42);
        let m = neighborhood_entropy_matrix(&grid, 3);
        assert!(m.exact().iter().all(|&e| e == 0.0));
        assert!(m.quantized().iter().all(|&q| q == 0));
    }

    #[test]
    fn single_cell() {
        let grid = GrayGrid::new(1, 1, vec![200]).unwrap();
        let m = neighborhood_entropy_matrix(&grid, 3);
        assert_eq!(m.exact(), &[0.0]);
    }

    #[test]
    fn distinct_interior_window() {
        let grid = GrayGrid::from_fn(8, 8, |r, c| (r * 8 + c) as u8);
        let m = neighborhood_entropy_matrix(&grid, 3);
        let interior = m.exact()[3 * 8 + 3];
        assert!((interior - 36f64.log2()).abs() < 1e-12);
        assert_eq!(m.quantized()[3 * 8 + 3], 5);
        // Corner window is 3x3.
        assert!((m.exact()[0] - 9f64.log2()).abs() < 1e-12);
        assert_eq!(m.quantized()[0], 3);
    }

    #[test]
    fn luma() {
        let img = RgbImage::from_raw(3, 1, vec![255, 255, 255, 0, 0, 0, 255, 0, 0]).unwrap();
        assert_eq!(grayscale(&img).values(), &[255, 0, 76]);
    }

    #[test]
    fn flat_images_score_zero() {
        for color in [[255, 0, 0], [0, 0, 0], [17, 99, 230]] {
            let img = RgbImage::filled(80, 80, color);
            assert_eq!(complexity_score(&img), 0);
            assert_eq!(
                is_interesting(&img, 500),
                Verdict { score: 0, interesting: false }
            );
        }
    }

    #[test]
    fn threshold_is_strict() {
        assert!(!passes_threshold(500, 500));
        assert!(passes_threshold(501, 500));
    }
}
