//! Persistent binary cache for sign tables.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size      | field                                        |
//! |--------|-----------|----------------------------------------------|
//! | 0      | 8         | magic `MFSIGNT1`                             |
//! | 8      | 1         | version, currently 1                         |
//! | 9      | 8         | N (table limit)                              |
//! | 17     | 32        | SHA-256 of the rule descriptor               |
//! | 49     | ⌈N/8⌉     | sign bits, +1 ↔ 0, bit for n at index n-1    |
//! | 49+⌈N/8⌉ | 8       | 64-bit FNV-1a of the sign payload            |
//!
//! The smallest-prime-factor array is not persisted; it is recomputed on
//! load (it depends only on N).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::table::SignTable;

pub const MAGIC: &[u8; 8] = b"MFSIGNT1";
pub const VERSION: u8 = 1;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(data: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

pub fn save_table(table: &SignTable, path: &Path) -> Result<()> {
    let n = table.limit();
    let payload_len = (n as usize).div_ceil(8);
    let payload = table.neg_bit_payload(payload_len);
    let mut out = Vec::with_capacity(49 + payload_len + 8);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(table.rule_digest());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&fnv1a64(&payload).to_le_bytes());
    fs::write(path, out)?;
    Ok(())
}

fn format_err(offset: u64, msg: impl Into<String>) -> Error {
    Error::Format {
        offset,
        msg: msg.into(),
    }
}

/// Load a table from its cache file. The returned table carries the rule
/// digest but no rule; use [`SignTable::attach_rule`] to restore it.
pub fn load_table(path: &Path) -> Result<SignTable> {
    let data = fs::read(path)?;
    if data.len() < 8 || &data[..8] != MAGIC {
        return Err(format_err(0, "bad magic bytes"));
    }
    if data.len() < 9 {
        return Err(format_err(8, "truncated before version byte"));
    }
    if data[8] != VERSION {
        return Err(format_err(8, format!("unsupported version {}", data[8])));
    }
    if data.len() < 17 {
        return Err(format_err(9, "truncated before N"));
    }
    let n = u64::from_le_bytes(data[9..17].try_into().unwrap());
    if n < 1 || n > crate::table::MAX_SIEVE_LIMIT {
        return Err(format_err(9, format!("implausible table limit {n}")));
    }
    if data.len() < 49 {
        return Err(format_err(17, "truncated inside rule digest"));
    }
    let mut digest = [0u8; 32];
    digest.copy_from_slice(&data[17..49]);
    let payload_len = (n as usize).div_ceil(8);
    let payload_end = 49 + payload_len;
    if data.len() < payload_end + 8 {
        return Err(format_err(
            data.len() as u64,
            format!("truncated payload: need {} bytes total", payload_end + 8),
        ));
    }
    let payload = &data[49..payload_end];
    let stored = u64::from_le_bytes(data[payload_end..payload_end + 8].try_into().unwrap());
    let computed = fnv1a64(payload);
    if stored != computed {
        return Err(format_err(
            payload_end as u64,
            format!("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}"),
        ));
    }
    let words = (n as usize).div_ceil(64);
    let mut neg_bits = vec![0u64; words.max(1)];
    for (i, chunk) in payload.chunks(8).enumerate() {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        neg_bits[i] = u64::from_le_bytes(buf);
    }
    let spf = SignTable::recompute_spf(n);
    Ok(SignTable::from_parts(digest, n, neg_bits, spf))
}
