//! RGB images: decoding from disk, resizing, and the image nonce layout.
//!
//! An image nonce is an 80x80 image stored as raw RGB24, row-major, with no
//! header: exactly 19,200 bytes. Anything else is not an image nonce.

use std::io;
use std::path::Path;

use thiserror::Error;

/// Side length of images embedded as nonces and used for scoring.
pub const NONCE_IMAGE_SIDE: u32 = 80;
/// Byte length of a serialized image nonce.
pub const IMAGE_NONCE_LEN: usize = (NONCE_IMAGE_SIDE * NONCE_IMAGE_SIDE * 3) as usize;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("unsupported image format: {0}")]
    Unsupported(String),
    #[error("corrupt image: {0}")]
    Corrupt(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("expected a {expected_w}x{expected_h} image, got {width}x{height}")]
    WrongDimensions {
        expected_w: u32,
        expected_h: u32,
        width: u32,
        height: u32,
    },
    #[error("image nonce must be {expected} bytes, got {len}")]
    WrongLength { expected: usize, len: usize },
    #[error("pixel buffer of {len} bytes does not match {width}x{height}")]
    BufferSize { width: u32, height: u32, len: usize },
}

/// Row-major 8-bit RGB pixels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps a raw `R G B R G B ...` buffer.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if data.len() != width as usize * height as usize * 3 {
            return Err(ImageError::BufferSize {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(RgbImage { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        RgbImage { width, height, data }
    }

    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| color)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|p| [p[0], p[1], p[2]])
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Writes the image; format chosen from the file extension.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ImageError> {
        image::save_buffer(
            path.as_ref(),
            &self.data,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| map_image_error(e, path.as_ref()))
    }
}

/// Decodes a PNG, JPEG or BMP file. Alpha is composited over black.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage, ImageError> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => ImageError::NotFound(path.display().to_string()),
        _ => ImageError::Io(e),
    })?;
    let reader = reader.with_guessed_format()?;
    if reader.format().is_none() {
        return Err(ImageError::Unsupported(path.display().to_string()));
    }
    let decoded = reader.decode().map_err(|e| map_image_error(e, path))?;
    let rgba = decoded.into_rgba8();
    let (width, height) = rgba.dimensions();
    let mut data = Vec::with_capacity(width as usize * height as usize * 3);
    for px in rgba.pixels() {
        let [r, g, b, a] = px.0;
        for c in [r, g, b] {
            data.push(((u32::from(c) * u32::from(a) + 127) / 255) as u8);
        }
    }
    Ok(RgbImage { width, height, data })
}

fn map_image_error(e: image::ImageError, path: &Path) -> ImageError {
    match e {
        image::ImageError::IoError(io) if io.kind() == io::ErrorKind::UnexpectedEof => {
            ImageError::Corrupt(format!("{}: truncated: {io}", path.display()))
        }
        image::ImageError::IoError(io) => ImageError::Io(io),
        image::ImageError::Unsupported(u) => {
            ImageError::Unsupported(format!("{}: {u}", path.display()))
        }
        other => ImageError::Corrupt(format!("{}: {other}", path.display())),
    }
}

/// Resizes each channel independently.
///
/// Shrinking an axis uses exact area averaging (box filter), rounding half
/// up. Growing an axis uses bilinear interpolation on pixel centers. When
/// neither axis grows the whole computation is done in integers.
///
/// # Panics
/// If `width` or `height` is zero.
pub fn resize(img: &RgbImage, width: u32, height: u32) -> RgbImage {
    assert!(width >= 1 && height >= 1, "resize target must be non-empty");
    if width == img.width && height == img.height {
        return img.clone();
    }
    if width <= img.width && height <= img.height {
        return box_downscale(img, width, height);
    }
    separable_resize(img, width, height)
}

fn box_downscale(img: &RgbImage, width: u32, height: u32) -> RgbImage {
    let (sw, sh) = (img.width as u64, img.height as u64);
    let (w, h) = (width as u64, height as u64);
    // Coordinates are scaled so the source pixel i spans [i*w, (i+1)*w) and
    // the output pixel o spans [o*sw, (o+1)*sw) on the x axis; same for y.
    let xs = coverage(sw, w);
    let ys = coverage(sh, h);
    let total = sw * sh;
    let mut data = Vec::with_capacity((w * h * 3) as usize);
    for ycov in &ys {
        for xcov in &xs {
            let mut acc = [0u64; 3];
            for &(sy, cy) in ycov {
                for &(sx, cx) in xcov {
                    let p = img.pixel(sx as u32, sy as u32);
                    let weight = cx * cy;
                    for k in 0..3 {
                        acc[k] += u64::from(p[k]) * weight;
                    }
                }
            }
            for a in acc {
                data.push(((2 * a + total) / (2 * total)) as u8);
            }
        }
    }
    RgbImage { width, height, data }
}

/// For each output index, the source indices it overlaps and the overlap length.
fn coverage(src: u64, dst: u64) -> Vec<Vec<(u64, u64)>> {
    (0..dst)
        .map(|o| {
            let (lo, hi) = (o * src, (o + 1) * src);
            let first = lo / dst;
            let last = (hi - 1) / dst;
            (first..=last)
                .filter_map(|s| {
                    let c = hi.min((s + 1) * dst).saturating_sub(lo.max(s * dst));
                    (c > 0).then_some((s, c))
                })
                .collect()
        })
        .collect()
}

fn axis_weights(src: u32, dst: u32) -> Vec<Vec<(u32, f64)>> {
    if dst <= src {
        let scale = f64::from(src);
        coverage(u64::from(src), u64::from(dst))
            .into_iter()
            .map(|c| c.into_iter().map(|(s, w)| (s as u32, w as f64 / scale)).collect())
            .collect()
    } else {
        let ratio = f64::from(src) / f64::from(dst);
        let max = f64::from(src - 1);
        (0..dst)
            .map(|o| {
                let pos = ((f64::from(o) + 0.5) * ratio - 0.5).clamp(0.0, max);
                let lo = pos.floor();
                let frac = pos - lo;
                let lo = lo as u32;
                if frac == 0.0 || lo + 1 >= src {
                    vec![(lo, 1.0)]
                } else {
                    vec![(lo, 1.0 - frac), (lo + 1, frac)]
                }
            })
            .collect()
    }
}

fn separable_resize(img: &RgbImage, width: u32, height: u32) -> RgbImage {
    let xs = axis_weights(img.width, width);
    let ys = axis_weights(img.height, height);
    let mut data = Vec::with_capacity(width as usize * height as usize * 3);
    for yw in &ys {
        for xw in &xs {
            let mut acc = [0f64; 3];
            for &(sy, wy) in yw {
                for &(sx, wx) in xw {
                    let p = img.pixel(sx, sy);
                    for k in 0..3 {
                        acc[k] += f64::from(p[k]) * wx * wy;
                    }
                }
            }
            for a in acc {
                // Tiny epsilon absorbs weight rounding on exact .5 ties.
                data.push((a + 0.5 + 1e-9).floor().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RgbImage { width, height, data }
}

/// Raw RGB24 of an 80x80 image: 19,200 bytes.
pub fn serialize_image_nonce(img: &RgbImage) -> Result<Vec<u8>, ImageError> {
    if img.width != NONCE_IMAGE_SIDE || img.height != NONCE_IMAGE_SIDE {
        return Err(ImageError::WrongDimensions {
            expected_w: NONCE_IMAGE_SIDE,
            expected_h: NONCE_IMAGE_SIDE,
            width: img.width,
            height: img.height,
        });
    }
    Ok(img.data.clone())
}

pub fn deserialize_image_nonce(bytes: &[u8]) -> Result<RgbImage, ImageError> {
    if bytes.len() != IMAGE_NONCE_LEN {
        return Err(ImageError::WrongLength {
            expected: IMAGE_NONCE_LEN,
            len: bytes.len(),
        });
    }
    Ok(RgbImage {
        width: NONCE_IMAGE_SIDE,
        height: NONCE_IMAGE_SIDE,
        data: bytes.to_vec(),
    })
}
