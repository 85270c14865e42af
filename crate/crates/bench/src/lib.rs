//! Inputs shared by the benchmarks in `benches/`.

use entropchain_core::RgbImage;

/// Concentric rings over a diagonal gradient. Scores well above the default threshold.
pub fn rings(side: u32) -> RgbImage {
    let c = side as i64 / 2;
    RgbImage::from_fn(side, side, |x, y| {
        let (dx, dy) = (x as i64 - c, y as i64 - c);
        let ring = (((dx * dx + dy * dy) as f64).sqrt() as i64 / 5) % 2;
        let g = ((x + y) * 255 / (2 * side)) as u8;
        if ring == 0 {
            [g, 255 - g, 40]
        } else {
            [255 - g, g / 2, 200]
        }
    })
}

/// Deterministic xorshift noise.
pub fn noise(side: u32, seed: u64) -> RgbImage {
    let mut s = seed | 1;
    RgbImage::from_fn(side, side, |_, _| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let v = s as u8;
        [v, v, v]
    })
}
