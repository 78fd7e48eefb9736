//! Chunk authenticators for progressive and streaming authentication:
//! file-offset chunk lists and the Merkle hash tree with its null rules,
//! split-row encoding, and per-chunk evidence paths.

pub mod merkle;
pub mod simple;

pub use merkle::{
    default_encoded_row, merkle_authenticator, merkle_build, merkle_evidence, merkle_verify,
    EvidencePath, MerkleTree,
};
pub use simple::{chunk_simple, verify_simple_chunk, DEFAULT_CHUNK_SIZE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: u64, limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] amp_core::CoreError),
}

pub type Result<T> = std::result::Result<T, ChunkError>;
