mod support;

use entropchain_core::entropy::{
    analyze, complexity_score, grayscale, is_interesting, neighborhood_entropy_matrix,
    shannon_entropy, GrayGrid,
};
use entropchain_core::imaging::{load_image, RgbImage};
use proptest::prelude::*;
use support::*;

fn to_rows(grid: &GrayGrid) -> Vec<Vec<u8>> {
    (0..grid.height())
        .map(|r| (0..grid.width()).map(|c| grid.get(r, c)).collect())
        .collect()
}

fn assert_matches_oracle(grid: &GrayGrid) {
    let m = neighborhood_entropy_matrix(grid, 3);
    let (exact, quant) = oracle_matrix(&to_rows(grid), 3);
    assert_eq!(m.exact(), exact.concat().as_slice());
    assert_eq!(m.quantized(), quant.concat().as_slice());
}

#[test]
fn hand_brute_force_distinct_grid() {
    // Interior window of an 8x8 grid of distinct values: 36 symbols once each.
    let grid = GrayGrid::from_fn(8, 8, |r, c| (r * 8 + c) as u8);
    let exact = oracle_matrix(&to_rows(&grid), 3).0;
    assert!((exact[4][4] - 5.169_925_001_442_312).abs() < 1e-12);
    assert_matches_oracle(&grid);
}

#[test]
fn fixture_scores_match_goldens() {
    let goldens = golden_scores();
    assert!(goldens.len() >= 10);
    for (name, &golden) in &goldens {
        let img = load_image(corpus_dir().join(name)).unwrap();
        let verdict = is_interesting(&img, 500);
        assert_eq!(verdict.score, golden, "{name}");
    }
}

#[test]
fn fixtures_match_oracle_cell_for_cell() {
    for name in ["interesting/rings_5.png", "interesting/scene.png", "uninteresting/noise_gray_1.png"] {
        let img = load_image(corpus_dir().join(name)).unwrap();
        let a = analyze(&img);
        assert_eq!(to_rows(&a.gray), oracle_luma(&img), "{name}");
        assert_matches_oracle(&a.gray);
        assert_matches_oracle(&a.first.quantized_grid());
        assert_eq!(a.score(), oracle_score(&img), "{name}");
    }
}

#[test]
fn half_split_scores_zero() {
    // The only nonzero first-degree column is a thin line of 1s; every
    // second-degree window sees it at a 1/6 share, which truncates to 0.
    let img = RgbImage::from_fn(80, 80, |x, _| if x < 40 { [0; 3] } else { [255; 3] });
    assert_eq!(oracle_score(&img), 0);
    assert_eq!(complexity_score(&img), 0);
    let a = analyze(&img);
    assert!(a.first.quantized().iter().any(|&v| v == 1));
}

#[test]
fn structured_synthetic_clears_threshold() {
    for offset in [0, 3, 11] {
        let img = structured_image(offset);
        let expected = oracle_score(&img);
        assert!(expected > 500, "offset {offset}: oracle score {expected}");
        let v = is_interesting(&img, 500);
        assert_eq!(v.score, expected);
        assert!(v.interesting);
    }
}

#[test]
fn noise_stays_below_threshold() {
    for seed in 1..4 {
        let img = noise_image(seed, 80);
        let v = is_interesting(&img, 500);
        assert_eq!(v.score, oracle_score(&img));
        assert!(!v.interesting, "seed {seed}: {}", v.score);
    }
}

#[test]
fn equal_images_equal_scores() {
    let a = structured_image(2);
    let b = RgbImage::from_raw(80, 80, a.as_raw().to_vec()).unwrap();
    assert_eq!(complexity_score(&a), complexity_score(&b));
}

#[test]
fn flat_images_of_any_size_score_zero() {
    for (w, h, c) in [(1, 1, [1, 2, 3]), (5, 17, [255, 255, 255]), (80, 80, [9, 9, 9]), (33, 2, [0, 50, 0])] {
        assert_eq!(complexity_score(&RgbImage::filled(w, h, c)), 0);
    }
}

#[test]
fn grayscale_matches_oracle_on_noise() {
    let img = RgbImage::from_fn(16, 16, |x, y| [(x * 16) as u8, (y * 16) as u8, (x * y) as u8]);
    assert_eq!(to_rows(&grayscale(&img)), oracle_luma(&img));
}

fn grid_strategy() -> impl Strategy<Value = GrayGrid> {
    (1usize..=12, 1usize..=12, 1u16..=256).prop_flat_map(|(w, h, levels)| {
        proptest::collection::vec(0..levels, w * h).prop_map(move |v| {
            GrayGrid::new(w, h, v.into_iter().map(|x| x as u8).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_grids_match_oracle(grid in grid_strategy()) {
        assert_matches_oracle(&grid);
        let img = grid.to_rgb();
        prop_assert_eq!(complexity_score(&img), oracle_score(&img));
    }

    #[test]
    fn relabeling_preserves_exact_entropy(grid in grid_strategy(), key in any::<u8>()) {
        // Xor with a constant is a bijection on symbols.
        let relabeled = GrayGrid::new(
            grid.width(),
            grid.height(),
            grid.values().iter().map(|v| v ^ key).collect(),
        ).unwrap();
        let a = neighborhood_entropy_matrix(&grid, 3);
        let b = neighborhood_entropy_matrix(&relabeled, 3);
        for (x, y) in a.exact().iter().zip(b.exact()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_bounds_and_permutation(
        signal in proptest::collection::vec(0u8..32, 1..200),
        seed in any::<u64>(),
    ) {
        let h = shannon_entropy(&signal).unwrap();
        let mut distinct = signal.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let bound = (distinct.len() as f64).log2();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= bound + 1e-12);
        prop_assert_eq!(h == 0.0, distinct.len() == 1);

        let mut shuffled = signal.clone();
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        prop_assert!((shannon_entropy(&shuffled).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn equifrequent_signals_hit_the_bound(k in 1usize..20, reps in 1usize..6) {
        let signal: Vec<u8> = (0..k).flat_map(|s| std::iter::repeat(s as u8).take(reps)).collect();
        let h = shannon_entropy(&signal).unwrap();
        prop_assert!((h - (k as f64).log2()).abs() < 1e-12);
    }
}
