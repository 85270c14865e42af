//! Prefixed text encodings for hashes and nonces.
//!
//! Every printable binary value in the chain is written as a tagged string:
//! `0x40_` followed by standard padded base64, or `0x20_` followed by
//! lowercase padded base32. The prefix makes the alphabet obvious when
//! reading chain files by eye. These strings are also hashed as part of the
//! block preimage, so the exact characters matter.

use std::fmt;

use data_encoding::{BASE32, BASE64};
use thiserror::Error;

/// Prefix tagging a base64 payload ("0x40" is 64 in hex).
pub const BASE64_PREFIX: &str = "0x40_";
/// Prefix tagging a base32 payload ("0x20" is 32 in hex).
pub const BASE32_PREFIX: &str = "0x20_";

const PREFIX_LEN: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("expected prefix {expected:?}, found {found:?}")]
    MalformedPrefix { expected: &'static str, found: String },
    #[error("invalid base64 payload: {0}")]
    InvalidBase64(String),
    #[error("invalid base32 payload: {0}")]
    InvalidBase32(String),
    #[error("{len} bytes do not fit in a 64-bit integer")]
    IntegerOverflow { len: usize },
}

/// Which alphabet an [`EncodedString`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    Base64,
    Base32,
}

impl Alphabet {
    pub fn prefix(self) -> &'static str {
        match self {
            Alphabet::Base64 => BASE64_PREFIX,
            Alphabet::Base32 => BASE32_PREFIX,
        }
    }
}

/// A prefixed, validated encoding of some bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedString(String);

impl EncodedString {
    /// Parses and validates a prefixed string, checking that the payload decodes.
    pub fn parse(s: &str) -> Result<Self, DecodeError> {
        if s.starts_with(BASE64_PREFIX) {
            decode64(s)?;
        } else if s.starts_with(BASE32_PREFIX) {
            decode32(s)?;
        } else {
            return Err(DecodeError::MalformedPrefix {
                expected: BASE64_PREFIX,
                found: s.chars().take(PREFIX_LEN).collect(),
            });
        }
        Ok(EncodedString(s.to_owned()))
    }

    pub fn alphabet(&self) -> Alphabet {
        if self.0.starts_with(BASE32_PREFIX) {
            Alphabet::Base32
        } else {
            Alphabet::Base64
        }
    }

    /// The text after the five character prefix.
    pub fn payload(&self) -> &str {
        &self.0[PREFIX_LEN..]
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn decode(&self) -> Vec<u8> {
        // Contents were validated on construction.
        match self.alphabet() {
            Alphabet::Base64 => decode64(&self.0).expect("validated base64"),
            Alphabet::Base32 => decode32(&self.0).expect("validated base32"),
        }
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for EncodedString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for EncodedString {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn encode64(data: &[u8]) -> EncodedString {
    let mut out = String::with_capacity(PREFIX_LEN + BASE64.encode_len(data.len()));
    out.push_str(BASE64_PREFIX);
    BASE64.encode_append(data, &mut out);
    EncodedString(out)
}

pub fn decode64(s: &str) -> Result<Vec<u8>, DecodeError> {
    let payload = strip(s, BASE64_PREFIX)?;
    BASE64
        .decode(payload.as_bytes())
        .map_err(|e| DecodeError::InvalidBase64(e.to_string()))
}

/// Base32 with the payload lowercased.
pub fn encode32(data: &[u8]) -> EncodedString {
    let mut out = String::with_capacity(PREFIX_LEN + BASE32.encode_len(data.len()));
    out.push_str(BASE32_PREFIX);
    out.push_str(&BASE32.encode(data).to_ascii_lowercase());
    EncodedString(out)
}

/// Accepts either case; the payload is uppercased before decoding.
pub fn decode32(s: &str) -> Result<Vec<u8>, DecodeError> {
    let payload = strip(s, BASE32_PREFIX)?.to_ascii_uppercase();
    BASE32
        .decode(payload.as_bytes())
        .map_err(|e| DecodeError::InvalidBase32(e.to_string()))
}

/// Packs an integer least significant byte first with no padding.
///
/// Zero packs to the empty byte string.
pub fn encode_integer(mut n: u64) -> Vec<u8> {
    let mut out = Vec::with_capacity(8);
    while n != 0 {
        out.push((n & 0xFF) as u8);
        n >>= 8;
    }
    out
}

/// Inverse of [`encode_integer`]: the little-endian sum of the bytes.
pub fn decode_integer(bytes: &[u8]) -> Result<u64, DecodeError> {
    let significant = bytes.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
    if significant > 8 {
        return Err(DecodeError::IntegerOverflow { len: bytes.len() });
    }
    Ok(bytes[..significant]
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << (8 * i))))
}

fn strip<'a>(s: &'a str, prefix: &'static str) -> Result<&'a str, DecodeError> {
    s.strip_prefix(prefix)
        .ok_or_else(|| DecodeError::MalformedPrefix {
            expected: prefix,
            found: s.chars().take(PREFIX_LEN).collect(),
        })
}
