//! Incremental verification of a fragmented MP4 stream against a manifest.

use amp_chunking::{merkle_verify, EvidencePath};
use amp_core::digest;
use amp_core::types::{ChunkAuthenticator, ManifestContainer};

use crate::boxes::{parse_one, BoxNode};
use crate::chunks::{is_cib, moof_hash_input};
use crate::cib::decode_chunk_integrity_box;
use crate::{Mp4Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkVerdict {
    /// Chunk index: the CIB hash_location when present, else the stream
    /// ordinal counted from the first fragment seen.
    pub index: u64,
    pub ok: bool,
}

/// Verify each [MOOF, MDAT] pair against the manifest's chunk authenticator.
/// Boxes are consumed strictly in stream order, so the verdict for chunk k
/// needs no bytes beyond chunk k; the stream may start at any fragment
/// boundary (leading fragments withheld).
pub fn verify_fmp4_stream(
    mp4: &[u8],
    manifest: &ManifestContainer,
) -> Result<Vec<ChunkVerdict>> {
    let algorithm = &manifest.core_manifest.digest_algorithm;
    let auth = manifest
        .facsimile_info
        .records
        .iter()
        .flat_map(|r| r.facsimile.chunk_data.iter().flatten())
        .find(|a| {
            matches!(
                a,
                ChunkAuthenticator::MerkleTree(_) | ChunkAuthenticator::IsoBox(_)
            )
        })
        .ok_or(Mp4Error::NoBinding)?;

    let mut verdicts = Vec::new();
    let mut pending_moof: Option<BoxNode> = None;
    let mut ordinal = 0u64;
    let mut pos = 0usize;
    while pos < mp4.len() {
        let node = parse_one(mp4, pos, mp4.len())?;
        pos = node.end();
        match &node.box_type {
            b"moof" => {
                if let Some(prev) = pending_moof.replace(node) {
                    return Err(Mp4Error::MalformedFragment { offset: prev.start });
                }
            }
            b"mdat" => {
                if let Some(moof) = pending_moof.take() {
                    let mut input = moof_hash_input(mp4, &moof);
                    input.extend_from_slice(&mp4[node.payload_range()]);
                    let chunk_digest = digest::digest(algorithm, &input)?;
                    let cib = moof
                        .descendants()
                        .into_iter()
                        .find(|n| is_cib(n))
                        .map(|n| decode_chunk_integrity_box(&mp4[n.start..n.end()]))
                        .transpose()?;
                    let index = cib
                        .as_ref()
                        .map(|c| c.hash_location as u64)
                        .unwrap_or(ordinal);
                    let ok = match auth {
                        ChunkAuthenticator::MerkleTree(a) => {
                            let path = EvidencePath {
                                leaf_index: index,
                                hashes: cib.map(|c| c.hashes).unwrap_or_default(),
                            };
                            merkle_verify(&chunk_digest, &path, a, algorithm)
                        }
                        ChunkAuthenticator::IsoBox(a) => a
                            .chunk_digests
                            .get(index as usize)
                            .is_some_and(|d| d == &chunk_digest),
                        ChunkAuthenticator::Simple(_) => unreachable!(),
                    };
                    verdicts.push(ChunkVerdict { index, ok });
                    ordinal += 1;
                }
            }
            _ => {}
        }
    }
    if let Some(orphan) = pending_moof {
        return Err(Mp4Error::MalformedFragment {
            offset: orphan.start,
        });
    }
    Ok(verdicts)
}
