use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use std::hint::black_box;

use entropchain_bench::{noise, rings};
use entropchain_core::block::{meets_difficulty, BlockHasher};
use entropchain_core::entropy::{complexity_score, grayscale, neighborhood_entropy_matrix};
use entropchain_core::imaging::{resize, serialize_image_nonce};
use entropchain_core::mining::{mine_block, RandomNonceSource};
use entropchain_core::DifficultyParams;

fn hashing(c: &mut Criterion) {
    let mut group = c.benchmark_group("hash");
    group.throughput(Throughput::Elements(1));
    let prev = "0x40_000Zq1Bd5lU8kBkqcQ0kCFCGx1tqvkf3DkXMqgRV2p2F9Jx4Ska2Wq7cWUb9V0ALuAO5Lkqsxaw1GsgN8aN8Zg==";
    let mut hasher = BlockHasher::new(prev, b"block42");
    let mut n = 0u64;
    group.bench_function("8-byte nonce + difficulty check", |b| {
        b.iter(|| {
            n = n.wrapping_add(1);
            let h = hasher.hash_nonce(&n.to_le_bytes());
            meets_difficulty(black_box(&h), 3)
        })
    });
    let image = serialize_image_nonce(&rings(80)).unwrap();
    group.bench_function("19200-byte image nonce", |b| b.iter(|| hasher.hash_nonce(black_box(&image))));
    group.finish();
}

fn mining(c: &mut Criterion) {
    let params = DifficultyParams::new(1);
    let mut src = RandomNonceSource::default();
    c.bench_function("mine one block at difficulty 1", |b| {
        b.iter(|| mine_block(None, b"genesis", &mut src, &params).unwrap())
    });
}

fn entropy(c: &mut Criterion) {
    let img = rings(80);
    let gray = grayscale(&img);
    c.bench_function("entropy matrix 80x80", |b| {
        b.iter(|| neighborhood_entropy_matrix(black_box(&gray), 3))
    });
    c.bench_function("complexity score 80x80", |b| b.iter(|| complexity_score(black_box(&img))));
    let big = noise(640, 7);
    c.bench_function("resize 640x640 to 80x80 and score", |b| {
        b.iter(|| complexity_score(&resize(black_box(&big), 80, 80)))
    });
}

fn nonce(c: &mut Criterion) {
    let img = rings(80);
    c.bench_function("serialize image nonce", |b| {
        b.iter_batched(|| img.clone(), |i| serialize_image_nonce(&i).unwrap(), BatchSize::SmallInput)
    });
}

criterion_group!(benches, hashing, mining, entropy, nonce);
criterion_main!(benches);
