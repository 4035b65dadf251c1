//! Manifest and shard file layouts.
//!
//! A shard file is a 24-byte little-endian header followed by
//! `symbol_count` symbols of `symbol_width_bytes` bytes each, stripe-major.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"CRGN";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 24;
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    BadVersion(u16),
    #[error("unknown code family tag {0}")]
    BadFamily(u8),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("{found} trailing bytes after the payload")]
    Trailing { found: u64 },
    #[error("symbol value {value} not below q = {q}")]
    SymbolOutOfRange { value: u32, q: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Mbcr,
    Mscr,
}

impl Family {
    pub fn tag(self) -> u8 {
        match self {
            Family::Mbcr => 0,
            Family::Mscr => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self, FormatError> {
        match tag {
            0 => Ok(Family::Mbcr),
            1 => Ok(Family::Mscr),
            other => Err(FormatError::BadFamily(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_family: Family,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub original_length_bytes: u64,
    pub stripe_count: usize,
    pub matrix_seed_or_literal: String,
    pub format_version: u16,
}

/// Smallest `w` with `256^w > q - 1`.
pub fn symbol_width(q: u32) -> u8 {
    let max = u64::from(q.saturating_sub(1));
    let mut w = 1u8;
    while max >= 1u64 << (8 * u32::from(w)) {
        w += 1;
    }
    w
}

pub fn shard_file_name(node: usize) -> String {
    format!("node_{:03}.shard", node + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardHeader {
    pub format_version: u16,
    pub family: Family,
    /// 1-based on disk, 0-based here.
    pub node: usize,
    pub q: u32,
    pub symbol_width: u8,
    pub symbol_count: u64,
}

impl ShardHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(MAGIC);
        out[4..6].copy_from_slice(&self.format_version.to_le_bytes());
        out[6] = self.family.tag();
        out[7..11].copy_from_slice(&(self.node as u32 + 1).to_le_bytes());
        out[11..15].copy_from_slice(&self.q.to_le_bytes());
        out[15] = self.symbol_width;
        out[16..24].copy_from_slice(&self.symbol_count.to_le_bytes());
        out
    }

    pub fn from_bytes(buf: &[u8; HEADER_LEN]) -> Result<Self, FormatError> {
        if &buf[0..4] != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let format_version = u16::from_le_bytes([buf[4], buf[5]]);
        if format_version != FORMAT_VERSION {
            return Err(FormatError::BadVersion(format_version));
        }
        let node = u32::from_le_bytes(buf[7..11].try_into().expect("4 bytes"));
        Ok(Self {
            format_version,
            family: Family::from_tag(buf[6])?,
            node: (node as usize).wrapping_sub(1),
            q: u32::from_le_bytes(buf[11..15].try_into().expect("4 bytes")),
            symbol_width: buf[15],
            symbol_count: u64::from_le_bytes(buf[16..24].try_into().expect("8 bytes")),
        })
    }
}

pub fn write_shard(
    mut w: impl Write,
    header: &ShardHeader,
    symbols: &[u32],
) -> Result<(), FormatError> {
    w.write_all(&header.to_bytes())?;
    let width = usize::from(header.symbol_width);
    let mut payload = Vec::with_capacity(symbols.len() * width);
    for &s in symbols {
        payload.extend_from_slice(&s.to_le_bytes()[..width.min(4)]);
        payload.extend(std::iter::repeat(0).take(width.saturating_sub(4)));
    }
    w.write_all(&payload)?;
    Ok(())
}

pub fn read_shard(mut r: impl Read) -> Result<(ShardHeader, Vec<u32>), FormatError> {
    let mut head = [0u8; HEADER_LEN];
    r.read_exact(&mut head).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => FormatError::Truncated {
            expected: HEADER_LEN as u64,
            found: 0,
        },
        _ => FormatError::Io(e),
    })?;
    let header = ShardHeader::from_bytes(&head)?;
    let width = usize::from(header.symbol_width);
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    let expected = header.symbol_count.saturating_mul(width as u64);
    let found = payload.len() as u64;
    if found < expected {
        return Err(FormatError::Truncated { expected, found });
    }
    if found > expected {
        return Err(FormatError::Trailing {
            found: found - expected,
        });
    }
    let mut symbols = Vec::with_capacity(header.symbol_count as usize);
    for chunk in payload.chunks_exact(width.max(1)) {
        let mut bytes = [0u8; 8];
        let take = width.min(8);
        bytes[..take].copy_from_slice(&chunk[..take]);
        let value = u64::from_le_bytes(bytes);
        if value >= u64::from(header.q) {
            return Err(FormatError::SymbolOutOfRange {
                value: value.min(u64::from(u32::MAX)) as u32,
                q: header.q,
            });
        }
        symbols.push(value as u32);
    }
    Ok((header, symbols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(symbol_width(2), 1);
        assert_eq!(symbol_width(251), 1);
        assert_eq!(symbol_width(257), 2);
        assert_eq!(symbol_width(65_537), 3);
    }

    #[test]
    fn header_layout() {
        let h = ShardHeader {
            format_version: FORMAT_VERSION,
            family: Family::Mscr,
            node: 4,
            q: 257,
            symbol_width: 2,
            symbol_count: 8,
        };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..4], b"CRGN");
        assert_eq!(bytes[4..6], [1, 0]);
        assert_eq!(bytes[6], 1);
        assert_eq!(bytes[7..11], [5, 0, 0, 0]);
        assert_eq!(bytes[11..15], [1, 1, 0, 0]);
        assert_eq!(bytes[15], 2);
        assert_eq!(bytes[16], 8);
        assert_eq!(ShardHeader::from_bytes(&bytes).unwrap(), h);
    }

    #[test]
    fn shard_round_trip_and_truncation() {
        let h = ShardHeader {
            format_version: FORMAT_VERSION,
            family: Family::Mbcr,
            node: 0,
            q: 257,
            symbol_width: 2,
            symbol_count: 3,
        };
        let mut buf = Vec::new();
        write_shard(&mut buf, &h, &[0, 256, 7]).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 6);
        assert_eq!(buf[HEADER_LEN + 2..HEADER_LEN + 4], [0, 1]);
        let (h2, syms) = read_shard(&buf[..]).unwrap();
        assert_eq!((h2, syms), (h, vec![0, 256, 7]));
        assert!(matches!(
            read_shard(&buf[..buf.len() - 1]),
            Err(FormatError::Truncated { expected: 6, found: 5 })
        ));
        assert!(matches!(read_shard(&buf[..10]), Err(FormatError::Truncated { .. })));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_shard(&bad[..]), Err(FormatError::BadMagic)));
    }

    #[test]
    fn manifest_field_names() {
        let m = Manifest {
            code_family: Family::Mbcr,
            q: 257,
            n: 7,
            k: 3,
            d: 4,
            t: 3,
            b: 24,
            original_length_bytes: 48,
            stripe_count: 2,
            matrix_seed_or_literal: "points=1,2,3,4,5,6,0".into(),
            format_version: 1,
        };
        let v: serde_json::Value = serde_json::to_value(&m).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "B",
                "code_family",
                "d",
                "format_version",
                "k",
                "matrix_seed_or_literal",
                "n",
                "original_length_bytes",
                "q",
                "stripe_count",
                "t"
            ]
        );
        assert_eq!(v["code_family"], "mbcr");
    }
}
