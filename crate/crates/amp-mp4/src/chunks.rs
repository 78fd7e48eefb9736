//! MOOF/MDAT chunk extraction and ChunkIntegrityBox injection.
//!
//! A chunk is one [MOOF, MDAT] pair. The chunk digest is computed over the
//! MOOF bytes with any embedded ChunkIntegrityBox excised (ancestor sizes
//! recomputed as if the box were never there), concatenated with the MDAT
//! payload, so injection does not perturb digests.

use amp_chunking::{merkle_evidence, MerkleTree};
use amp_core::digest;
use amp_core::types::IsoBoxAuthenticator;

use crate::boxes::{parse_boxes, BoxNode};
use crate::cib::{encode_chunk_integrity_box, ChunkIntegrityBox, CIB_EXTENDED_TYPE};
use crate::{Mp4Error, Result};

#[derive(Debug, Clone)]
pub struct IsoChunk {
    pub index: u64,
    pub moof_range: std::ops::Range<usize>,
    pub mdat_range: std::ops::Range<usize>,
    pub digest: Vec<u8>,
}

pub(crate) fn is_cib(node: &BoxNode) -> bool {
    node.extended_type == Some(CIB_EXTENDED_TYPE)
}

/// Re-emit a box subtree, dropping children rejected by `keep` and inserting
/// extra bytes produced by `append` as the last child of matching boxes.
/// Sizes of ancestors are recomputed bottom-up; leaf payloads are copied
/// verbatim.
fn rebuild(
    bytes: &[u8],
    node: &BoxNode,
    keep: &dyn Fn(&BoxNode) -> bool,
    append: &dyn Fn(&BoxNode) -> Option<Vec<u8>>,
    out: &mut Vec<u8>,
) {
    if node.children.is_empty() && !node.is_container() {
        out.extend_from_slice(&bytes[node.start..node.end()]);
        return;
    }
    let mut body = Vec::new();
    for child in &node.children {
        if keep(child) {
            rebuild(bytes, child, keep, append, &mut body);
        }
    }
    if let Some(extra) = append(node) {
        body.extend_from_slice(&extra);
    }
    out.extend_from_slice(&((body.len() + 8) as u32).to_be_bytes());
    out.extend_from_slice(&node.box_type);
    out.extend_from_slice(&body);
}

/// MOOF bytes with any ChunkIntegrityBox excised.
pub(crate) fn moof_hash_input(bytes: &[u8], moof: &BoxNode) -> Vec<u8> {
    let mut out = Vec::with_capacity(moof.size);
    rebuild(bytes, moof, &|n| !is_cib(n), &|_| None, &mut out);
    out
}

/// Pair each MOOF with its following MDAT, in stream order. Non-fragment
/// boxes between pairs are skipped.
pub(crate) fn fragment_pairs<'a>(tree: &'a [BoxNode]) -> Result<Vec<(&'a BoxNode, &'a BoxNode)>> {
    let mut pairs = Vec::new();
    let mut pending_moof: Option<&BoxNode> = None;
    for node in tree {
        match &node.box_type {
            b"moof" => {
                if let Some(prev) = pending_moof {
                    return Err(Mp4Error::MalformedFragment { offset: prev.start });
                }
                pending_moof = Some(node);
            }
            b"mdat" => {
                if let Some(moof) = pending_moof.take() {
                    pairs.push((moof, node));
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
    Ok(pairs)
}

pub fn extract_iso_chunks(
    tree: &[BoxNode],
    bytes: &[u8],
    algorithm: &str,
) -> Result<(Vec<IsoChunk>, IsoBoxAuthenticator)> {
    let pairs = fragment_pairs(tree)?;
    if pairs.is_empty() {
        return Err(Mp4Error::InvalidArgument(
            "no [MOOF, MDAT] pairs in stream".into(),
        ));
    }
    let mut chunks = Vec::with_capacity(pairs.len());
    for (index, (moof, mdat)) in pairs.iter().enumerate() {
        let mut input = moof_hash_input(bytes, moof);
        input.extend_from_slice(&bytes[mdat.payload_range()]);
        chunks.push(IsoChunk {
            index: index as u64,
            moof_range: moof.start..moof.end(),
            mdat_range: mdat.payload_range(),
            digest: digest::digest(algorithm, &input)?,
        });
    }
    let auth = IsoBoxAuthenticator {
        num_chunks: chunks.len() as u64,
        chunk_digests: chunks.iter().map(|c| c.digest.clone()).collect(),
    };
    Ok((chunks, auth))
}

/// Insert one ChunkIntegrityBox per `traf`, carrying the Merkle evidence for
/// that fragment's chunk. All other bytes are preserved; ancestor box sizes
/// are updated.
pub fn inject_evidence(
    mp4: &[u8],
    tree: &MerkleTree,
    encoded_row: i64,
    hash_tree_id: u8,
) -> Result<Vec<u8>> {
    let boxes = parse_boxes(mp4)?;
    let pairs = fragment_pairs(&boxes)?;
    if pairs.len() as u64 != tree.num_chunks() {
        return Err(Mp4Error::InvalidArgument(format!(
            "stream has {} fragments but tree has {} leaves",
            pairs.len(),
            tree.num_chunks()
        )));
    }
    if pairs.len() > u16::MAX as usize + 1 {
        return Err(Mp4Error::Range("hash_location"));
    }
    let moof_index: std::collections::HashMap<usize, u16> = pairs
        .iter()
        .enumerate()
        .map(|(i, (moof, _))| (moof.start, i as u16))
        .collect();

    let hash_size = digest::output_len(tree.algorithm())? as u8;
    let mut out = Vec::with_capacity(mp4.len());
    for node in &boxes {
        let chunk_of_moof = moof_index.get(&node.start).copied();
        if node.box_type == *b"moof" {
            let Some(chunk_index) = chunk_of_moof else {
                return Err(Mp4Error::MalformedFragment { offset: node.start });
            };
            let evidence = merkle_evidence(tree, chunk_index as u64, encoded_row)?;
            let cib = ChunkIntegrityBox {
                hash_tree_id,
                hash_location: chunk_index,
                hash_size,
                hashes: evidence.hashes,
            };
            let cib_bytes = encode_chunk_integrity_box(&cib)?;
            rebuild(
                mp4,
                node,
                &|_| true,
                &|n| (n.box_type == *b"traf").then(|| cib_bytes.clone()),
                &mut out,
            );
        } else {
            out.extend_from_slice(&mp4[node.start..node.end()]);
        }
    }
    Ok(out)
}

/// Remove every ChunkIntegrityBox, recomputing ancestor sizes. Inverse of
/// [`inject_evidence`] at byte level for 32-bit-size streams.
pub fn strip_evidence(mp4: &[u8]) -> Result<Vec<u8>> {
    let boxes = parse_boxes(mp4)?;
    let mut out = Vec::with_capacity(mp4.len());
    for node in &boxes {
        if node.box_type == *b"moof" {
            rebuild(mp4, node, &|n| !is_cib(n), &|_| None, &mut out);
        } else {
            out.extend_from_slice(&mp4[node.start..node.end()]);
        }
    }
    Ok(out)
}
