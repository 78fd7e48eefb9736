//! Merkle log arithmetic over entry digests.
//!
//! The tree over `n` leaves splits at the largest power of two below `n`;
//! a single-leaf tree's root is the leaf digest itself, so the root over one
//! entry equals that entry's digest.

use amp_core::digest::digest;
use amp_core::CoreError;

fn split_point(n: u64) -> u64 {
    debug_assert!(n > 1);
    let mut k = 1u64;
    while k * 2 < n {
        k *= 2;
    }
    k
}

fn hash_pair(left: &[u8], right: &[u8], algorithm: &str) -> Result<Vec<u8>, CoreError> {
    let mut joined = left.to_vec();
    joined.extend_from_slice(right);
    digest(algorithm, &joined)
}

/// Root over `leaves[range]`.
fn subtree_root(leaves: &[Vec<u8>], algorithm: &str) -> Result<Vec<u8>, CoreError> {
    match leaves.len() {
        0 => Err(CoreError::bad_field("TreeSize", "empty tree has no root")),
        1 => Ok(leaves[0].clone()),
        n => {
            let k = split_point(n as u64) as usize;
            let left = subtree_root(&leaves[..k], algorithm)?;
            let right = subtree_root(&leaves[k..], algorithm)?;
            hash_pair(&left, &right, algorithm)
        }
    }
}

pub fn merkle_root(leaves: &[Vec<u8>], algorithm: &str) -> Result<Vec<u8>, CoreError> {
    subtree_root(leaves, algorithm)
}

/// Sibling hashes from leaf `m` up to the root, leaf-adjacent first.
pub fn inclusion_path(
    leaves: &[Vec<u8>],
    m: u64,
    algorithm: &str,
) -> Result<Vec<Vec<u8>>, CoreError> {
    let n = leaves.len() as u64;
    if m >= n {
        return Err(CoreError::bad_field("Index", "beyond tree size"));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let k = split_point(n);
    let (mut path, sibling) = if m < k {
        (
            inclusion_path(&leaves[..k as usize], m, algorithm)?,
            subtree_root(&leaves[k as usize..], algorithm)?,
        )
    } else {
        (
            inclusion_path(&leaves[k as usize..], m - k, algorithm)?,
            subtree_root(&leaves[..k as usize], algorithm)?,
        )
    };
    path.push(sibling);
    Ok(path)
}

/// Recompute the root from a leaf digest and its inclusion path. Returns an
/// error when the path length does not fit the claimed position and size.
pub fn fold_path(
    m: u64,
    n: u64,
    leaf: &[u8],
    path: &[Vec<u8>],
    algorithm: &str,
) -> Result<Vec<u8>, CoreError> {
    if m >= n || n == 0 {
        return Err(CoreError::bad_field("Index", "beyond tree size"));
    }
    if n == 1 {
        return if path.is_empty() {
            Ok(leaf.to_vec())
        } else {
            Err(CoreError::bad_field("InclusionPath", "too long"))
        };
    }
    let (top, rest) = path
        .split_last()
        .ok_or_else(|| CoreError::bad_field("InclusionPath", "too short"))?;
    let k = split_point(n);
    if m < k {
        let left = fold_path(m, k, leaf, rest, algorithm)?;
        hash_pair(&left, top, algorithm)
    } else {
        let right = fold_path(m - k, n - k, leaf, rest, algorithm)?;
        hash_pair(top, &right, algorithm)
    }
}
