//! File-offset-based chunking (ChunkingScheme 1).

use std::io::Read;

use amp_core::digest;
use amp_core::types::SimpleChunkListAuthenticator;

use crate::{ChunkError, Result};

/// 256 KiB, the figure used for file-offset chunking examples.
pub const DEFAULT_CHUNK_SIZE: u64 = 262_144;

/// Hash consecutive `chunk_size` slices of the stream. The final chunk may
/// be shorter; an empty stream yields zero chunks.
pub fn chunk_simple<R: Read>(
    mut stream: R,
    chunk_size: u64,
    algorithm: &str,
) -> Result<SimpleChunkListAuthenticator> {
    if chunk_size == 0 {
        return Err(ChunkError::InvalidArgument("chunk_size must be > 0".into()));
    }
    let mut chunk_digests = Vec::new();
    let mut buf = vec![0u8; chunk_size as usize];
    loop {
        let mut filled = 0;
        while filled < buf.len() {
            let n = stream.read(&mut buf[filled..])?;
            if n == 0 {
                break;
            }
            filled += n;
        }
        if filled == 0 {
            break;
        }
        chunk_digests.push(digest::digest(algorithm, &buf[..filled])?);
        if filled < buf.len() {
            break;
        }
    }
    Ok(SimpleChunkListAuthenticator {
        chunk_size,
        num_chunks: chunk_digests.len() as u64,
        chunk_digests,
    })
}

pub fn verify_simple_chunk(
    auth: &SimpleChunkListAuthenticator,
    index: u64,
    chunk: &[u8],
    algorithm: &str,
) -> Result<bool> {
    let expected = auth
        .chunk_digests
        .get(index as usize)
        .ok_or(ChunkError::OutOfRange {
            index,
            limit: auth.num_chunks,
        })?;
    Ok(&digest::digest(algorithm, chunk)? == expected)
}
