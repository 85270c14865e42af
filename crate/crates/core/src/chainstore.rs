//! Chain files and the storage growth model.
//!
//! A chain file holds one block per line with five tab-separated fields:
//!
//! ```text
//! height  previous-hash  encode64(data)  encode64(nonce)  encode64(hash)
//! ```
//!
//! The previous-hash field is empty for genesis. Every binary field carries
//! the `0x40_` prefix, so the file is plain ASCII.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::block::{Block, BlockHash};
use crate::encoding::{decode64, encode64};
use crate::imaging::IMAGE_NONCE_LEN;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt record at line {line}: {reason}")]
    CorruptRecord { line: usize, reason: String },
}

fn corrupt(line: usize, reason: impl Into<String>) -> StoreError {
    StoreError::CorruptRecord {
        line,
        reason: reason.into(),
    }
}

pub fn format_record(block: &Block) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        block.height(),
        block.previous_hash_encoded(),
        encode64(block.data()),
        encode64(block.nonce()),
        block.hash().encoded()
    )
}

/// Parses one record. `line` is 1-based and only used for error messages.
pub fn parse_record(text: &str, line: usize) -> Result<Block, StoreError> {
    let fields: Vec<&str> = text.split('\t').collect();
    let [height, previous, data, nonce, hash] = fields[..] else {
        return Err(corrupt(line, format!("expected 5 fields, found {}", fields.len())));
    };
    let height: u64 = height
        .parse()
        .map_err(|_| corrupt(line, format!("bad height {height:?}")))?;
    let data = decode64(data).map_err(|e| corrupt(line, format!("data: {e}")))?;
    let nonce = decode64(nonce).map_err(|e| corrupt(line, format!("nonce: {e}")))?;
    let hash = decode64(hash).map_err(|e| corrupt(line, format!("hash: {e}")))?;
    let hash = BlockHash::from_slice(&hash)
        .ok_or_else(|| corrupt(line, format!("hash is {} bytes, expected 64", hash.len())))?;
    // Integrity is the validator's job; the store only checks structure.
    Ok(Block::from_parts(height, previous.to_owned(), data, nonce, hash))
}

pub fn write_chain<W: Write>(blocks: &[Block], mut out: W) -> io::Result<()> {
    for block in blocks {
        writeln!(out, "{}", format_record(block))?;
    }
    out.flush()
}

/// Reads records, checking hashes and that heights count up from zero.
///
/// Nonce policy is not checked here.
pub fn read_chain<R: BufRead>(input: R) -> Result<Vec<Block>, StoreError> {
    let mut blocks = Vec::new();
    let mut last_line = 0;
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let block = parse_record(line, line_no)?;
        let expected = blocks.len() as u64;
        if block.height() != expected {
            return Err(corrupt(
                line_no,
                format!("height {} out of sequence, expected {expected}", block.height()),
            ));
        }
        blocks.push(block);
    }
    if blocks.is_empty() {
        return Err(corrupt(last_line.max(1), "missing genesis record"));
    }
    Ok(blocks)
}

/// Writes to a temporary sibling and renames over `path`.
pub fn save_chain(blocks: &[Block], path: impl AsRef<Path>) -> Result<(), StoreError> {
    let path = path.as_ref();
    let tmp = path.with_extension("tmp");
    write_chain(blocks, BufWriter::new(File::create(&tmp)?))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_chain(path: impl AsRef<Path>) -> Result<Vec<Block>, StoreError> {
    read_chain(BufReader::new(File::open(path)?))
}

/// Inputs of the worst-case storage model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    pub image_bytes_per_block: u64,
    pub max_data_bytes: u64,
    pub block_interval_minutes: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            image_bytes_per_block: IMAGE_NONCE_LEN as u64,
            max_data_bytes: 800,
            block_interval_minutes: 10.0,
        }
    }
}

/// Uncompressed image plus the data bound.
pub fn block_size_upper_bound(params: &GrowthParams) -> u64 {
    params.image_bytes_per_block + params.max_data_bytes
}

pub fn blocks_per_year(params: &GrowthParams) -> f64 {
    60.0 / params.block_interval_minutes * 24.0 * 365.25
}

/// Bytes added per year at one block per interval.
pub fn chain_growth_per_year(params: &GrowthParams) -> f64 {
    block_size_upper_bound(params) as f64 * blocks_per_year(params)
}

/// Total payload bytes (nonces and data) held by a chain.
pub fn chain_payload_bytes(blocks: &[Block]) -> u64 {
    blocks.iter().map(|b| b.payload_size() as u64).sum()
}
