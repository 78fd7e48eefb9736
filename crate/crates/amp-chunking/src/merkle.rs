//! Merkle hash tree over chunk digests (ChunkingScheme 3).
//!
//! The leaf row is padded with nulls to the next power of two. Parents obey
//! the combination rules: both non-null -> H(LHS|RHS); RHS null -> LHS;
//! both null -> null. Nulls are an explicit absent marker, never an all-zero
//! digest. One row (the split-row) travels in the manifest; rows below it
//! travel as per-chunk evidence.

use amp_core::digest;
use amp_core::types::MerkleTreeAuthenticator;

use crate::{ChunkError, Result};

#[derive(Debug, Clone)]
pub struct MerkleTree {
    /// rows[0] is the padded leaf row; the last row is the single root.
    rows: Vec<Vec<Option<Vec<u8>>>>,
    num_chunks: u64,
    algorithm: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidencePath {
    pub leaf_index: u64,
    /// Non-null sibling hashes, sequenced from leaf to the encoded row.
    pub hashes: Vec<Vec<u8>>,
}

impl MerkleTree {
    /// Tree depth counting the leaf row (5 chunks pad to 8, depth 4).
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    pub fn num_chunks(&self) -> u64 {
        self.num_chunks
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn root(&self) -> &[u8] {
        self.rows
            .last()
            .and_then(|row| row[0].as_deref())
            .expect("non-empty tree has a root")
    }

    /// Node at `level` (0 = leaves) and `column`; None for null slots.
    pub fn node(&self, level: usize, column: usize) -> Option<&[u8]> {
        self.rows
            .get(level)
            .and_then(|row| row.get(column))
            .and_then(|n| n.as_deref())
    }

    /// Translate an EncodedRow value (0 = root row, -1 = leaves) into an
    /// internal level index.
    fn level_of(&self, encoded_row: i64) -> Result<usize> {
        let top = self.rows.len() as i64 - 1;
        let level = match encoded_row {
            -1 => 0,
            r if (0..=top).contains(&r) => (top - r) as usize,
            r => {
                return Err(ChunkError::OutOfRange {
                    index: r as u64,
                    limit: top as u64,
                })
            }
        };
        Ok(level)
    }
}

pub fn merkle_build(leaf_digests: &[Vec<u8>], algorithm: &str) -> Result<MerkleTree> {
    if leaf_digests.is_empty() {
        return Err(ChunkError::InvalidArgument("no leaf digests".into()));
    }
    let len = leaf_digests[0].len();
    if leaf_digests.iter().any(|d| d.len() != len) {
        return Err(ChunkError::InvalidArgument("uneven leaf digest sizes".into()));
    }
    let padded = leaf_digests.len().next_power_of_two();
    let mut row: Vec<Option<Vec<u8>>> = leaf_digests.iter().cloned().map(Some).collect();
    row.resize(padded, None);

    let mut rows = vec![row];
    while rows.last().unwrap().len() > 1 {
        let below = rows.last().unwrap();
        let mut above = Vec::with_capacity(below.len() / 2);
        for pair in below.chunks(2) {
            let parent = match (&pair[0], &pair[1]) {
                (Some(lhs), Some(rhs)) => {
                    let mut cat = lhs.clone();
                    cat.extend_from_slice(rhs);
                    Some(digest::digest(algorithm, &cat)?)
                }
                (Some(lhs), None) => Some(lhs.clone()),
                (None, None) => None,
                // Nulls only ever pad the tail of a row.
                (None, Some(_)) => unreachable!("null LHS with non-null RHS"),
            };
            above.push(parent);
        }
        rows.push(above);
    }
    Ok(MerkleTree {
        rows,
        num_chunks: leaf_digests.len() as u64,
        algorithm: algorithm.to_owned(),
    })
}

/// Encode one row of the tree, eliding null slots.
pub fn merkle_authenticator(tree: &MerkleTree, encoded_row: i64) -> Result<MerkleTreeAuthenticator> {
    let level = tree.level_of(encoded_row)?;
    let chunk_digests = tree.rows[level]
        .iter()
        .filter_map(|n| n.clone())
        .collect();
    Ok(MerkleTreeAuthenticator {
        encoded_row,
        num_chunks: tree.num_chunks,
        chunk_digests,
    })
}

/// Default split-row choice: the row with min(padded leaf count, 64)
/// columns, bounding manifest growth for long media.
pub fn default_encoded_row(num_chunks: u64) -> i64 {
    let padded = num_chunks.next_power_of_two().max(1);
    let width = padded.min(64);
    // Row r below the root has 2^r columns.
    (63 - width.leading_zeros() as i64).max(0)
}

/// Sibling hashes from the leaf up to (excluding) the encoded row, nulls
/// omitted.
pub fn merkle_evidence(tree: &MerkleTree, leaf_index: u64, encoded_row: i64) -> Result<EvidencePath> {
    if leaf_index >= tree.num_chunks {
        return Err(ChunkError::OutOfRange {
            index: leaf_index,
            limit: tree.num_chunks,
        });
    }
    let target_level = tree.level_of(encoded_row)?;
    let mut hashes = Vec::new();
    let mut column = leaf_index as usize;
    for level in 0..target_level {
        let sibling = column ^ 1;
        if let Some(h) = tree.node(level, sibling) {
            hashes.push(h.to_vec());
        }
        column >>= 1;
    }
    Ok(EvidencePath { leaf_index, hashes })
}

/// Fold a chunk digest through an evidence path and check the result against
/// the encoded row carried by the authenticator. Left/right orientation at
/// each level comes from the bits of the leaf index; null siblings are
/// reconstructed from NumChunks (nulls always pad the tail of a row).
pub fn merkle_verify(
    chunk_digest: &[u8],
    path: &EvidencePath,
    auth: &MerkleTreeAuthenticator,
    algorithm: &str,
) -> bool {
    let num_chunks = auth.num_chunks;
    if num_chunks == 0 || path.leaf_index >= num_chunks {
        return false;
    }
    let padded = num_chunks.next_power_of_two();
    let top = padded.trailing_zeros() as i64; // root level
    let target_level = match auth.encoded_row {
        -1 => 0,
        r if (0..=top).contains(&r) => (top - r) as u64,
        _ => return false,
    };

    let mut current = chunk_digest.to_vec();
    let mut column = path.leaf_index;
    let mut consumed = 0usize;
    for level in 0..target_level {
        let sibling = column ^ 1;
        // A node at (level, col) is null iff its leaf span starts at or
        // beyond the real chunk count.
        let sibling_null = sibling << level >= num_chunks;
        if sibling_null {
            // RHS null: parent = LHS, nothing consumed. A null LHS under a
            // non-null node cannot occur.
            if column & 1 == 1 {
                return false;
            }
        } else {
            let Some(h) = path.hashes.get(consumed) else {
                return false;
            };
            consumed += 1;
            let mut cat;
            if column & 1 == 0 {
                cat = current;
                cat.extend_from_slice(h);
            } else {
                cat = h.clone();
                cat.extend_from_slice(&current);
            }
            current = match digest::digest(algorithm, &cat) {
                Ok(d) => d,
                Err(_) => return false,
            };
        }
        column >>= 1;
    }
    if consumed != path.hashes.len() {
        return false;
    }
    // Non-null columns at the target level form a prefix of the row, so the
    // elided index equals the column index.
    let non_null = num_chunks.div_ceil(1 << target_level);
    if auth.chunk_digests.len() as u64 != non_null || column >= non_null {
        return false;
    }
    auth.chunk_digests[column as usize] == current
}
