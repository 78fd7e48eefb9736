//! ChunkIntegrityBox: a `uuid` full box carried inside `traf` that holds the
//! Merkle evidence hashes for one chunk, sequenced from leaf to root.

use crate::{Mp4Error, Result};

/// Extended type 469d22dfe1924defa71ef4c9f2ce3e71.
pub const CIB_EXTENDED_TYPE: [u8; 16] = [
    0x46, 0x9d, 0x22, 0xdf, 0xe1, 0x92, 0x4d, 0xef, 0xa7, 0x1e, 0xf4, 0xc9, 0xf2, 0xce, 0x3e,
    0x71,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkIntegrityBox {
    /// Index into the manifest's list of hashed streams.
    pub hash_tree_id: u8,
    /// Zero-based chunk index.
    pub hash_location: u16,
    /// Bytes per hash value.
    pub hash_size: u8,
    pub hashes: Vec<Vec<u8>>,
}

impl ChunkIntegrityBox {
    pub fn total_size(&self) -> usize {
        // size + type + extended type + version/flags + four integer fields.
        8 + 16 + 4 + 1 + 2 + 1 + 1 + self.hashes.len() * self.hash_size as usize
    }
}

pub fn encode_chunk_integrity_box(cib: &ChunkIntegrityBox) -> Result<Vec<u8>> {
    if cib.hashes.len() > u8::MAX as usize {
        return Err(Mp4Error::Range("hash_count"));
    }
    if cib
        .hashes
        .iter()
        .any(|h| h.len() != cib.hash_size as usize)
    {
        return Err(Mp4Error::InvalidArgument(
            "hash length does not match hash_size".into(),
        ));
    }
    let total = cib.total_size();
    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&(total as u32).to_be_bytes());
    out.extend_from_slice(b"uuid");
    out.extend_from_slice(&CIB_EXTENDED_TYPE);
    out.extend_from_slice(&[0, 0, 0, 0]); // FullBox version=0 flags=0
    out.push(cib.hash_tree_id);
    out.extend_from_slice(&cib.hash_location.to_be_bytes());
    out.push(cib.hash_size);
    out.push(cib.hashes.len() as u8);
    for h in &cib.hashes {
        out.extend_from_slice(h);
    }
    Ok(out)
}

pub fn decode_chunk_integrity_box(bytes: &[u8]) -> Result<ChunkIntegrityBox> {
    if bytes.len() < 8 + 16 + 4 + 5 {
        return Err(Mp4Error::parse(0, "too short for a ChunkIntegrityBox"));
    }
    let size = u32::from_be_bytes(bytes[0..4].try_into().unwrap()) as usize;
    if &bytes[4..8] != b"uuid" || bytes[8..24] != CIB_EXTENDED_TYPE {
        return Err(Mp4Error::NotACib);
    }
    if size > bytes.len() {
        return Err(Mp4Error::parse(0, "declared size overruns input"));
    }
    if bytes[24..28] != [0, 0, 0, 0] {
        return Err(Mp4Error::parse(24, "unsupported version/flags"));
    }
    let hash_tree_id = bytes[28];
    let hash_location = u16::from_be_bytes(bytes[29..31].try_into().unwrap());
    let hash_size = bytes[31];
    let hash_count = bytes[32] as usize;
    let body = &bytes[33..size];
    if body.len() != hash_count * hash_size as usize {
        return Err(Mp4Error::parse(
            33,
            format!(
                "hash area {} bytes, expected {} ({} hashes of {})",
                body.len(),
                hash_count * hash_size as usize,
                hash_count,
                hash_size
            ),
        ));
    }
    let hashes = body
        .chunks(hash_size as usize)
        .map(|c| c.to_vec())
        .collect();
    Ok(ChunkIntegrityBox {
        hash_tree_id,
        hash_location,
        hash_size,
        hashes,
    })
}
