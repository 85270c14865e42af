//! Blocks, their hash preimage, the leading-zeros difficulty rule and
//! chain validation.
//!
//! A block hash is SHA-512 over `previous ∥ data ∥ encode64(nonce)`, where
//! `previous` is the encoded hash of the parent (empty for genesis). A hash
//! meets difficulty `ρ` when its base64 encoding starts with `ρ` `'0'`
//! characters after the `0x40_` prefix.

use std::fmt;

use sha2::{Digest, Sha512};
use thiserror::Error;

use crate::encoding::{encode64, EncodedString};
use crate::entropy::{complexity_score, passes_threshold, DEFAULT_BOTTOM_THRESHOLD};
use crate::imaging::deserialize_image_nonce;

/// Alphabet size of the encoding; each hash character is `'0'` with probability 1/64.
pub const ENCODING_ORDER: u32 = 64;
pub const DEFAULT_DIFFICULTY_ORDER: u32 = 3;
pub const HASH_LEN: usize = 64;

const ZERO_SEXTET: u8 = 52; // index of '0' in the standard base64 alphabet
const FULL_SEXTETS: u32 = (HASH_LEN as u32 * 8) / 6;

/// A SHA-512 block digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockHash(pub [u8; HASH_LEN]);

impl BlockHash {
    pub fn as_bytes(&self) -> &[u8; HASH_LEN] {
        &self.0
    }

    pub fn encoded(&self) -> EncodedString {
        encode64(&self.0)
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        bytes.try_into().ok().map(BlockHash)
    }

    /// Number of leading `'0'` characters in the base64 encoding.
    pub fn leading_zero_chars(&self) -> u32 {
        (0..FULL_SEXTETS)
            .take_while(|&i| sextet(&self.0, i) == ZERO_SEXTET)
            .count() as u32
    }
}

impl fmt::Debug for BlockHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockHash({})", self.encoded())
    }
}

impl fmt::Display for BlockHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.encoded(), f)
    }
}

/// Static proof-of-work configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifficultyParams {
    pub difficulty_order: u32,
}

impl DifficultyParams {
    pub fn new(difficulty_order: u32) -> Self {
        DifficultyParams { difficulty_order }
    }

    pub fn encoding_order(&self) -> u32 {
        ENCODING_ORDER
    }
}

impl Default for DifficultyParams {
    fn default() -> Self {
        DifficultyParams::new(DEFAULT_DIFFICULTY_ORDER)
    }
}

/// Which nonces validators accept.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NoncePolicy {
    #[default]
    Unconstrained,
    /// The nonce must be a serialized 80x80 image scoring above `threshold`.
    InterestingImage { threshold: u64 },
}

impl NoncePolicy {
    pub fn interesting_image() -> Self {
        NoncePolicy::InterestingImage {
            threshold: DEFAULT_BOTTOM_THRESHOLD,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Block {
    height: u64,
    previous: String,
    data: Vec<u8>,
    nonce: Vec<u8>,
    hash: BlockHash,
}

impl Block {
    /// Builds a child of `previous` (or a genesis block) and computes its hash.
    pub fn new(previous: Option<&Block>, data: impl Into<Vec<u8>>, nonce: impl Into<Vec<u8>>) -> Self {
        let (height, prev) = match previous {
            Some(p) => (p.height + 1, p.hash.encoded().into_string()),
            None => (0, String::new()),
        };
        Block::seal(height, prev, data, nonce)
    }

    /// Builds a block with an arbitrary previous reference and computes its hash.
    pub fn seal(
        height: u64,
        previous: impl Into<String>,
        data: impl Into<Vec<u8>>,
        nonce: impl Into<Vec<u8>>,
    ) -> Self {
        let previous = previous.into();
        let data = data.into();
        let nonce = nonce.into();
        let hash = compute_block_hash(&previous, &data, &nonce);
        Block {
            height,
            previous,
            data,
            nonce,
            hash,
        }
    }

    /// Assembles a block from stored fields without recomputing anything.
    pub fn from_parts(
        height: u64,
        previous: String,
        data: Vec<u8>,
        nonce: Vec<u8>,
        hash: BlockHash,
    ) -> Self {
        Block {
            height,
            previous,
            data,
            nonce,
            hash,
        }
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    /// Encoded hash of the parent, or `""` for genesis.
    pub fn previous_hash_encoded(&self) -> &str {
        &self.previous
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn nonce(&self) -> &[u8] {
        &self.nonce
    }

    pub fn hash(&self) -> &BlockHash {
        &self.hash
    }

    pub fn is_genesis(&self) -> bool {
        self.height == 0 && self.previous.is_empty()
    }

    /// Bytes of variable payload: nonce plus data.
    pub fn payload_size(&self) -> usize {
        self.nonce.len() + self.data.len()
    }

    /// Recomputes the digest from the stored fields.
    pub fn recompute_hash(&self) -> BlockHash {
        compute_block_hash(&self.previous, &self.data, &self.nonce)
    }

    /// Renders the block with the nonce shortened to `max_nonce_chars` characters.
    pub fn render(&self, max_nonce_chars: Option<usize>) -> String {
        let mut nonce = encode64(&self.nonce).into_string();
        if let Some(max) = max_nonce_chars {
            if nonce.len() > max {
                nonce.truncate(max);
                nonce.push_str(&format!("... ({} bytes)", self.nonce.len()));
            }
        }
        let prev = if self.previous.is_empty() {
            "None"
        } else {
            &self.previous
        };
        format!(
            "-----block {}-----\nnonce {}\nprev {}\ndata\n-----\n{}\n-----\nhash {}\n-----End Block-----",
            self.height,
            nonce,
            prev,
            String::from_utf8_lossy(&self.data),
            self.hash.encoded()
        )
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Block")
            .field("height", &self.height)
            .field("previous", &self.previous)
            .field("data", &String::from_utf8_lossy(&self.data))
            .field("nonce_len", &self.nonce.len())
            .field("hash", &self.hash)
            .finish()
    }
}

/// SHA-512 of `previous ∥ data ∥ encode64(nonce)`.
pub fn compute_block_hash(previous_encoded: &str, data: &[u8], nonce: &[u8]) -> BlockHash {
    let mut hasher = BlockHasher::new(previous_encoded, data);
    hasher.hash_nonce(nonce)
}

/// Hashes many nonces against one fixed `(previous, data)` prefix.
#[derive(Clone)]
pub struct BlockHasher {
    prefix: Sha512,
    scratch: String,
}

impl BlockHasher {
    pub fn new(previous_encoded: &str, data: &[u8]) -> Self {
        let mut prefix = Sha512::new();
        prefix.update(previous_encoded.as_bytes());
        prefix.update(data);
        BlockHasher {
            prefix,
            scratch: String::new(),
        }
    }

    pub fn hash_nonce(&mut self, nonce: &[u8]) -> BlockHash {
        self.scratch.clear();
        self.scratch.push_str(crate::encoding::BASE64_PREFIX);
        data_encoding::BASE64.encode_append(nonce, &mut self.scratch);
        let mut h = self.prefix.clone();
        h.update(self.scratch.as_bytes());
        BlockHash(h.finalize().into())
    }
}

/// The 6-bit value of base64 character `i` (for `i` below 85).
#[inline]
fn sextet(bytes: &[u8; HASH_LEN], i: u32) -> u8 {
    let bit = (i * 6) as usize;
    let byte = bit / 8;
    let shift = bit % 8;
    let hi = u16::from(bytes[byte]) << 8;
    let lo = bytes.get(byte + 1).copied().map_or(0, u16::from);
    (((hi | lo) >> (10 - shift)) & 0x3F) as u8
}

/// True when the first `rho` characters of the encoded digest (after the
/// prefix) are all `'0'`.
pub fn meets_difficulty(digest: &BlockHash, rho: u32) -> bool {
    // Character 85 holds two trailing bits and can't be '0'; 86 and 87 are padding.
    if rho > FULL_SEXTETS {
        return false;
    }
    (0..rho).all(|i| sextet(&digest.0, i) == ZERO_SEXTET)
}

/// The first check a block failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("stored hash does not match recomputed hash")]
    HashMismatch,
    #[error("hash has {found} leading zeros, difficulty requires {required}")]
    InsufficientWork { required: u32, found: u32 },
    #[error("previous reference {found:?} does not match expected {expected:?}")]
    BrokenLink { expected: String, found: String },
    #[error("height {found} does not follow expected height {expected}")]
    BadHeight { expected: u64, found: u64 },
    #[error("nonce of {len} bytes is not an image nonce")]
    NonceNotImage { len: usize },
    #[error("image nonce scores {score}, must exceed {threshold}")]
    UninterestingNonce { score: u64, threshold: u64 },
}

impl Violation {
    /// Short stable name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::HashMismatch => "hash-mismatch",
            Violation::InsufficientWork { .. } => "insufficient-work",
            Violation::BrokenLink { .. } => "broken-link",
            Violation::BadHeight { .. } => "bad-height",
            Violation::NonceNotImage { .. } => "nonce-not-image",
            Violation::UninterestingNonce { .. } => "uninteresting-nonce",
        }
    }
}

/// Checks hash, work, linkage, height and nonce policy, in that order.
pub fn validate_block(
    block: &Block,
    expected_previous: Option<&Block>,
    params: &DifficultyParams,
    policy: &NoncePolicy,
) -> Result<(), Violation> {
    if block.recompute_hash() != block.hash {
        return Err(Violation::HashMismatch);
    }
    if !meets_difficulty(&block.hash, params.difficulty_order) {
        return Err(Violation::InsufficientWork {
            required: params.difficulty_order,
            found: block.hash.leading_zero_chars(),
        });
    }
    let (expected_prev, expected_height) = match expected_previous {
        Some(p) => (p.hash.encoded().into_string(), p.height + 1),
        None => (String::new(), 0),
    };
    if block.previous != expected_prev {
        return Err(Violation::BrokenLink {
            expected: expected_prev,
            found: block.previous.clone(),
        });
    }
    if block.height != expected_height {
        return Err(Violation::BadHeight {
            expected: expected_height,
            found: block.height,
        });
    }
    check_nonce_policy(&block.nonce, policy)
}

pub fn check_nonce_policy(nonce: &[u8], policy: &NoncePolicy) -> Result<(), Violation> {
    match *policy {
        NoncePolicy::Unconstrained => Ok(()),
        NoncePolicy::InterestingImage { threshold } => {
            let img = deserialize_image_nonce(nonce)
                .map_err(|_| Violation::NonceNotImage { len: nonce.len() })?;
            let score = complexity_score(&img);
            if passes_threshold(score, threshold) {
                Ok(())
            } else {
                Err(Violation::UninterestingNonce { score, threshold })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("chain is empty")]
    Empty,
    #[error("block {index}: {violation}")]
    Invalid { index: usize, violation: Violation },
}

/// Validates every block against its predecessor, starting from genesis.
pub fn validate_chain(
    blocks: &[Block],
    params: &DifficultyParams,
    policy: &NoncePolicy,
) -> Result<(), ChainError> {
    if blocks.is_empty() {
        return Err(ChainError::Empty);
    }
    for (index, block) in blocks.iter().enumerate() {
        let prev = index.checked_sub(1).map(|i| &blocks[i]);
        validate_block(block, prev, params, policy)
            .map_err(|violation| ChainError::Invalid { index, violation })?;
    }
    Ok(())
}
