//! Binary mask files, all integers little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "NIPM"
//!      4     2  version (1)
//!      6     1  pattern id
//!      7     1  reserved, 0
//!      8     4  n
//!     12     4  b
//!     16     8  seed
//!     24     4  count
//!     28  8*count  (row u32, col u32), row-major
//! ```

use serde::Serialize;

use super::{BlockMask, Pattern};
use crate::error::{NipError, Result};

pub const MAGIC: [u8; 4] = *b"NIPM";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 28;

pub fn serialize(m: &BlockMask) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.blocks.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(m.pattern.id());
    out.push(0);
    out.extend_from_slice(&m.n.to_le_bytes());
    out.extend_from_slice(&m.b.to_le_bytes());
    out.extend_from_slice(&m.seed.to_le_bytes());
    out.extend_from_slice(&(m.blocks.len() as u32).to_le_bytes());
    for &(r, c) in &m.blocks {
        out.extend_from_slice(&r.to_le_bytes());
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

fn corrupt(msg: impl Into<String>) -> NipError {
    NipError::CorruptPayload(msg.into())
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

pub fn deserialize(bytes: &[u8]) -> Result<BlockMask> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(NipError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("header truncated at {} bytes", bytes.len())));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(NipError::VersionMismatch(version));
    }
    let pattern =
        Pattern::from_id(bytes[6]).ok_or_else(|| corrupt(format!("unknown pattern id {}", bytes[6])))?;
    if bytes[7] != 0 {
        return Err(corrupt("reserved byte is not zero"));
    }
    let n = u32_at(bytes, 8);
    let b = u32_at(bytes, 12);
    let seed = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let count = u32_at(bytes, 24) as usize;
    let expected = count
        .checked_mul(8)
        .and_then(|p| p.checked_add(HEADER_LEN))
        .ok_or_else(|| corrupt("count overflows"))?;
    if bytes.len() != expected {
        return Err(corrupt(format!(
            "payload of {} bytes, header promises {count} pairs ({expected} bytes)",
            bytes.len()
        )));
    }
    let blocks = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| (u32_at(c, 0), u32_at(c, 4)))
        .collect();
    BlockMask::from_parts(pattern, n, b, seed, blocks)
}

/// Human-readable companion to a mask file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sidecar {
    pub magic: String,
    pub version: u16,
    pub pattern: String,
    pub pattern_id: u8,
    pub n: u32,
    pub b: u32,
    pub grid: u32,
    pub seed: u64,
    pub count: u32,
    pub density_speedup: f64,
}

impl Sidecar {
    pub fn of(m: &BlockMask) -> Sidecar {
        Sidecar {
            magic: String::from_utf8_lossy(&MAGIC).into_owned(),
            version: FORMAT_VERSION,
            pattern: m.pattern.name().to_string(),
            pattern_id: m.pattern.id(),
            n: m.n,
            b: m.b,
            grid: m.grid() as u32,
            seed: m.seed,
            count: m.blocks.len() as u32,
            density_speedup: m.density_speedup(),
        }
    }
}

pub fn sidecar_json(m: &BlockMask) -> String {
    serde_json::to_string_pretty(&Sidecar::of(m)).expect("sidecar serializes")
}
