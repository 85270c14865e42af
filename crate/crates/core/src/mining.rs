//! Proof-of-work search with pluggable nonce sources.
//!
//! [`mine_block`] is the single-threaded loop. [`ParallelMiner`] runs one loop
//! per worker thread, stops every worker as soon as one finds a block and
//! reports progress at a fixed interval.

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};
use thiserror::Error;

use crate::block::{meets_difficulty, Block, BlockHasher, DifficultyParams, NoncePolicy};
use crate::entropy::{is_interesting, DEFAULT_BOTTOM_THRESHOLD};
use crate::imaging::{load_image, resize, serialize_image_nonce, RgbImage, NONCE_IMAGE_SIDE};

/// Random nonce length used by the reference miner.
pub const DEFAULT_NONCE_SIZE: usize = 8;

/// Supplies candidate nonces to the miner.
pub trait NonceSource {
    /// The next candidate, or `None` once a finite source is drained.
    fn provide_nonce(&mut self) -> Option<Vec<u8>>;

    /// The validation policy every nonce from this source satisfies.
    fn policy(&self) -> NoncePolicy;
}

impl<S: NonceSource + ?Sized> NonceSource for Box<S> {
    fn provide_nonce(&mut self) -> Option<Vec<u8>> {
        (**self).provide_nonce()
    }

    fn policy(&self) -> NoncePolicy {
        (**self).policy()
    }
}

/// Endless cryptographically random nonces of a fixed size.
pub struct RandomNonceSource {
    size: usize,
    rng: StdRng,
}

impl RandomNonceSource {
    /// # Panics
    /// If `size` is zero.
    pub fn new(size: usize) -> Self {
        assert!(size >= 1, "nonce size must be at least one byte");
        RandomNonceSource {
            size,
            rng: StdRng::from_os_rng(),
        }
    }
}

impl Default for RandomNonceSource {
    fn default() -> Self {
        RandomNonceSource::new(DEFAULT_NONCE_SIZE)
    }
}

impl NonceSource for RandomNonceSource {
    fn provide_nonce(&mut self) -> Option<Vec<u8>> {
        let mut nonce = vec![0u8; self.size];
        self.rng.fill_bytes(&mut nonce);
        Some(nonce)
    }

    fn policy(&self) -> NoncePolicy {
        NoncePolicy::Unconstrained
    }
}

enum Candidate {
    Path(PathBuf),
    Image(RgbImage),
}

/// Yields serialized interesting images, one per candidate that passes.
///
/// Candidates are loaded and scored lazily. Images that fail to decode or do
/// not clear the threshold are logged and skipped.
pub struct ImageNonceSource {
    queue: VecDeque<Candidate>,
    threshold: u64,
    yielded: usize,
    skipped: usize,
}

impl ImageNonceSource {
    pub fn new(paths: impl IntoIterator<Item = impl Into<PathBuf>>, threshold: u64) -> Self {
        Self::from_candidates(paths.into_iter().map(|p| Candidate::Path(p.into())), threshold)
    }

    pub fn from_images(images: impl IntoIterator<Item = RgbImage>, threshold: u64) -> Self {
        Self::from_candidates(images.into_iter().map(Candidate::Image), threshold)
    }

    fn from_candidates(c: impl Iterator<Item = Candidate>, threshold: u64) -> Self {
        ImageNonceSource {
            queue: c.collect(),
            threshold,
            yielded: 0,
            skipped: 0,
        }
    }

    pub fn with_default_threshold(paths: impl IntoIterator<Item = impl Into<PathBuf>>) -> Self {
        Self::new(paths, DEFAULT_BOTTOM_THRESHOLD)
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }

    pub fn yielded(&self) -> usize {
        self.yielded
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }
}

impl NonceSource for ImageNonceSource {
    fn provide_nonce(&mut self) -> Option<Vec<u8>> {
        while let Some(candidate) = self.queue.pop_front() {
            let (label, img) = match candidate {
                Candidate::Path(path) => {
                    let label = path.display().to_string();
                    match load_image(&path) {
                        Ok(img) => (label, img),
                        Err(e) => {
                            log::warn!("skipping {label}: {e}");
                            self.skipped += 1;
                            continue;
                        }
                    }
                }
                Candidate::Image(img) => (format!("in-memory image #{}", self.yielded + self.skipped), img),
            };
            let verdict = is_interesting(&img, self.threshold);
            if !verdict.interesting {
                log::info!(
                    "skipping {label}: score {} does not exceed {}",
                    verdict.score,
                    self.threshold
                );
                self.skipped += 1;
                continue;
            }
            let scaled = resize(&img, NONCE_IMAGE_SIDE, NONCE_IMAGE_SIDE);
            self.yielded += 1;
            return Some(serialize_image_nonce(&scaled).expect("resized to nonce size"));
        }
        None
    }

    fn policy(&self) -> NoncePolicy {
        NoncePolicy::InterestingImage {
            threshold: self.threshold,
        }
    }
}

/// A source shared between workers; draws are serialized through a mutex.
pub struct SharedNonceSource<S> {
    inner: Arc<Mutex<S>>,
    policy: NoncePolicy,
}

impl<S: NonceSource> SharedNonceSource<S> {
    pub fn new(source: S) -> Self {
        let policy = source.policy();
        SharedNonceSource {
            inner: Arc::new(Mutex::new(source)),
            policy,
        }
    }

    pub fn into_inner(self) -> Option<S> {
        Arc::try_unwrap(self.inner).ok().map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()))
    }
}

impl<S> Clone for SharedNonceSource<S> {
    fn clone(&self) -> Self {
        SharedNonceSource {
            inner: Arc::clone(&self.inner),
            policy: self.policy,
        }
    }
}

impl<S: NonceSource> NonceSource for SharedNonceSource<S> {
    fn provide_nonce(&mut self) -> Option<Vec<u8>> {
        self.inner
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .provide_nonce()
    }

    fn policy(&self) -> NoncePolicy {
        self.policy
    }
}

#[derive(Debug, Clone)]
pub struct MiningReport {
    pub block: Block,
    pub hashes_tried: u64,
    pub elapsed: Duration,
}

impl MiningReport {
    pub fn hash_rate(&self) -> f64 {
        let secs = self.elapsed.as_secs_f64();
        if secs > 0.0 {
            self.hashes_tried as f64 / secs
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MineError {
    #[error("nonce source exhausted after {hashes_tried} hashes")]
    SourceExhausted { hashes_tried: u64 },
}

/// Expected hashes per block: `64^ρ`.
pub fn estimate_difficulty(params: &DifficultyParams) -> f64 {
    f64::from(params.encoding_order()).powf(f64::from(params.difficulty_order))
}

/// Draws nonces until one yields a hash meeting the difficulty.
pub fn mine_block(
    previous: Option<&Block>,
    data: &[u8],
    source: &mut dyn NonceSource,
    params: &DifficultyParams,
) -> Result<MiningReport, MineError> {
    let start = Instant::now();
    let (height, prev) = parent_fields(previous);
    let mut hasher = BlockHasher::new(&prev, data);
    let mut tried = 0u64;
    while let Some(nonce) = source.provide_nonce() {
        tried += 1;
        let hash = hasher.hash_nonce(&nonce);
        if meets_difficulty(&hash, params.difficulty_order) {
            let block = Block::from_parts(height, prev, data.to_vec(), nonce, hash);
            return Ok(MiningReport {
                block,
                hashes_tried: tried,
                elapsed: start.elapsed(),
            });
        }
    }
    Err(MineError::SourceExhausted { hashes_tried: tried })
}

fn parent_fields(previous: Option<&Block>) -> (u64, String) {
    match previous {
        Some(p) => (p.height() + 1, p.hash().encoded().into_string()),
        None => (0, String::new()),
    }
}

/// Snapshot passed to progress callbacks.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub hashes_tried: u64,
    pub elapsed: Duration,
}

impl Progress {
    pub fn hash_rate(&self) -> f64 {
        self.hashes_tried as f64 / self.elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
    }
}

/// Coordinates several mining workers over one `(previous, data)` pair.
#[derive(Debug, Clone)]
pub struct ParallelMiner {
    pub params: DifficultyParams,
    pub progress_interval: Duration,
}

// Workers publish their hash counts in batches of this size.
const COUNT_BATCH: u64 = 1024;

enum WorkerOutcome {
    Found(Block),
    Exhausted,
    Stopped,
}

impl ParallelMiner {
    pub fn new(params: DifficultyParams) -> Self {
        ParallelMiner {
            params,
            progress_interval: Duration::from_secs(1),
        }
    }

    pub fn with_progress_interval(mut self, interval: Duration) -> Self {
        self.progress_interval = interval;
        self
    }

    /// Mines with one worker per source. The first valid block wins.
    ///
    /// Returns `SourceExhausted` only once every worker's source is drained.
    pub fn mine<S>(
        &self,
        previous: Option<&Block>,
        data: &[u8],
        sources: Vec<S>,
        mut on_progress: impl FnMut(Progress),
    ) -> Result<MiningReport, MineError>
    where
        S: NonceSource + Send,
    {
        let start = Instant::now();
        let (height, prev) = parent_fields(previous);
        let stop = AtomicBool::new(false);
        let hashes = AtomicU64::new(0);
        let rho = self.params.difficulty_order;
        let workers = sources.len();
        let hasher = BlockHasher::new(&prev, data);

        let found = thread::scope(|scope| {
            let (tx, rx) = mpsc::channel();
            let prev = &prev;
            for mut source in sources {
                let tx = tx.clone();
                let mut hasher = hasher.clone();
                let (stop, hashes) = (&stop, &hashes);
                scope.spawn(move || {
                    let mut local = 0u64;
                    let outcome = loop {
                        if stop.load(Ordering::Relaxed) {
                            break WorkerOutcome::Stopped;
                        }
                        let Some(nonce) = source.provide_nonce() else {
                            break WorkerOutcome::Exhausted;
                        };
                        local += 1;
                        let hash = hasher.hash_nonce(&nonce);
                        if local.is_multiple_of(COUNT_BATCH) {
                            hashes.fetch_add(COUNT_BATCH, Ordering::Relaxed);
                        }
                        if meets_difficulty(&hash, rho) {
                            stop.store(true, Ordering::Relaxed);
                            break WorkerOutcome::Found(Block::from_parts(
                                height,
                                prev.clone(),
                                data.to_vec(),
                                nonce,
                                hash,
                            ));
                        }
                    };
                    hashes.fetch_add(local % COUNT_BATCH, Ordering::Relaxed);
                    let _ = tx.send(outcome);
                });
            }
            drop(tx);

            let mut finished = 0;
            let mut winner = None;
            while finished < workers {
                match rx.recv_timeout(self.progress_interval) {
                    Ok(WorkerOutcome::Found(block)) => {
                        finished += 1;
                        winner.get_or_insert(block);
                    }
                    Ok(_) => finished += 1,
                    Err(mpsc::RecvTimeoutError::Timeout) => on_progress(Progress {
                        hashes_tried: hashes.load(Ordering::Relaxed),
                        elapsed: start.elapsed(),
                    }),
                    Err(mpsc::RecvTimeoutError::Disconnected) => break,
                }
            }
            winner
        });

        let hashes_tried = hashes.load(Ordering::Relaxed);
        match found {
            Some(block) => Ok(MiningReport {
                block,
                hashes_tried,
                elapsed: start.elapsed(),
            }),
            None => Err(MineError::SourceExhausted { hashes_tried }),
        }
    }
}

/// Default worker count: the machine's available parallelism.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}
