//! Leading-zeros proof of work in which nonces may be required to be
//! "interesting" images, judged by a second-degree entropy score.
//!
//! The crate is organized bottom-up:
//!
//! - [`encoding`]: `0x40_`/`0x20_` prefixed base64/base32 text forms.
//! - [`imaging`]: RGB images, decoding, resizing and the 19,200-byte nonce layout.
//! - [`entropy`]: Shannon entropy, neighborhood entropy maps and the complexity score.
//! - [`block`]: blocks, hashing, the difficulty rule and validation.
//! - [`mining`]: nonce sources and the mining loops.
//! - [`chainstore`]: chain files and the storage growth model.
//! - [`eval`]: classifier accuracy over a labeled corpus.

pub mod block;
pub mod chainstore;
pub mod encoding;
pub mod entropy;
pub mod eval;
pub mod imaging;
pub mod mining;

pub use block::{
    compute_block_hash, meets_difficulty, validate_block, validate_chain, Block, BlockHash,
    ChainError, DifficultyParams, NoncePolicy, Violation,
};
pub use chainstore::{load_chain, save_chain, GrowthParams, StoreError};
pub use encoding::{decode32, decode64, encode32, encode64, EncodedString};
pub use entropy::{complexity_score, is_interesting, shannon_entropy, EntropyMatrix, GrayGrid};
pub use eval::{evaluate_corpus, EvalReport, Label, LabeledCorpus, Thresholds};
pub use imaging::{load_image, resize, RgbImage};
pub use mining::{
    estimate_difficulty, mine_block, ImageNonceSource, MineError, MiningReport, NonceSource,
    ParallelMiner, RandomNonceSource,
};
