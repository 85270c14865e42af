use entropchain_core::imaging::{
    deserialize_image_nonce, load_image, resize, serialize_image_nonce, ImageError, RgbImage,
    IMAGE_NONCE_LEN,
};
use proptest::prelude::*;

#[test]
fn one_white_pixel_png() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("white.png");
    RgbImage::filled(1, 1, [255, 255, 255]).save(&path).unwrap();
    let img = load_image(&path).unwrap();
    assert_eq!((img.width(), img.height()), (1, 1));
    assert_eq!(img.pixel(0, 0), [255, 255, 255]);
}

#[test]
fn png_and_bmp_decode_identically() {
    let dir = tempfile::tempdir().unwrap();
    let src = RgbImage::from_fn(23, 11, |x, y| [(x * 11) as u8, (y * 23) as u8, (x ^ y) as u8]);
    let png = dir.path().join("a.png");
    let bmp = dir.path().join("a.bmp");
    src.save(&png).unwrap();
    src.save(&bmp).unwrap();
    let a = load_image(&png).unwrap();
    let b = load_image(&bmp).unwrap();
    assert_eq!(a, src);
    assert_eq!(a, b);
}

#[test]
fn jpeg_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.jpg");
    RgbImage::filled(16, 16, [128, 128, 128]).save(&path).unwrap();
    let img = load_image(&path).unwrap();
    assert_eq!((img.width(), img.height()), (16, 16));
    assert!(img.pixels().all(|p| p.iter().all(|&c| c.abs_diff(128) <= 2)));
}

#[test]
fn truncated_file_is_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.png");
    RgbImage::from_fn(40, 40, |x, y| [x as u8, y as u8, 7]).save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(load_image(&path), Err(ImageError::Corrupt(_))));
}

#[test]
fn missing_and_unknown_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        load_image(dir.path().join("nope.png")),
        Err(ImageError::NotFound(_))
    ));
    let txt = dir.path().join("notes.txt");
    std::fs::write(&txt, "plain text, not an image").unwrap();
    assert!(matches!(load_image(&txt), Err(ImageError::Unsupported(_))));
}

#[test]
fn alpha_composites_over_black() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.png");
    let rgba: Vec<u8> = vec![200, 100, 50, 255, 200, 100, 50, 0, 255, 255, 255, 128];
    image::save_buffer(&path, &rgba, 3, 1, image::ExtendedColorType::Rgba8).unwrap();
    let img = load_image(&path).unwrap();
    assert_eq!(img.pixel(0, 0), [200, 100, 50]);
    assert_eq!(img.pixel(1, 0), [0, 0, 0]);
    assert_eq!(img.pixel(2, 0), [128, 128, 128]);
}

#[test]
fn downscale_by_integer_factor_is_block_mean() {
    let src = RgbImage::from_fn(240, 240, |x, y| [(x % 3 * 10) as u8, (y % 3 * 20) as u8, 5]);
    let out = resize(&src, 80, 80);
    assert!(out.pixels().all(|p| p == [10, 20, 5]));
}

fn image_strategy() -> impl Strategy<Value = RgbImage> {
    proptest::collection::vec(any::<u8>(), IMAGE_NONCE_LEN)
        .prop_map(|raw| RgbImage::from_raw(80, 80, raw).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonce_round_trip(img in image_strategy()) {
        let bytes = serialize_image_nonce(&img).unwrap();
        prop_assert_eq!(bytes.len(), 19_200);
        prop_assert_eq!(deserialize_image_nonce(&bytes).unwrap(), img);
    }

    #[test]
    fn any_other_length_is_rejected(len in 0usize..40_000) {
        prop_assume!(len != IMAGE_NONCE_LEN);
        let is_wrong_length = matches!(
            deserialize_image_nonce(&vec![0; len]),
            Err(ImageError::WrongLength { .. })
        );
        prop_assert!(is_wrong_length);
    }

    #[test]
    fn resize_is_channel_independent(
        w in 1u32..20, h in 1u32..20, tw in 1u32..30, th in 1u32..30, seed in any::<u32>()
    ) {
        let img = RgbImage::from_fn(w, h, |x, y| {
            let v = (x.wrapping_mul(2654435761) ^ y.wrapping_mul(40503) ^ seed) as u8;
            [v, v.wrapping_mul(3), 255 - v]
        });
        let out = resize(&img, tw, th);
        let only_red = RgbImage::from_fn(w, h, |x, y| { let p = img.pixel(x, y); [p[0], 0, 0] });
        let red_out = resize(&only_red, tw, th);
        for y in 0..th {
            for x in 0..tw {
                prop_assert_eq!(out.pixel(x, y)[0], red_out.pixel(x, y)[0]);
            }
        }
        prop_assert_eq!(resize(&img, tw, th), out);
    }
}
