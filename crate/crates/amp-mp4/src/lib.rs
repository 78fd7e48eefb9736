//! Fragmented-MP4 (ISO BMFF) support: box tree parsing, MOOF/MDAT chunk
//! extraction, bit-exact ChunkIntegrityBox encode/decode, evidence injection
//! into `traf` boxes, and incremental stream verification.

pub mod boxes;
pub mod cib;
pub mod chunks;
pub mod fixture;
pub mod verify;

pub use boxes::{parse_boxes, BoxNode};
pub use cib::{decode_chunk_integrity_box, encode_chunk_integrity_box, ChunkIntegrityBox,
    CIB_EXTENDED_TYPE};
pub use chunks::{extract_iso_chunks, inject_evidence, strip_evidence, IsoChunk};
pub use fixture::generate_fmp4;
pub use verify::{verify_fmp4_stream, ChunkVerdict};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Mp4Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("MOOF at byte {offset} has no following MDAT")]
    MalformedFragment { offset: usize },

    #[error("not a ChunkIntegrityBox (extended type mismatch)")]
    NotACib,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field {0} out of range")]
    Range(&'static str),

    #[error("manifest carries no chunk authenticator for this stream")]
    NoBinding,

    #[error(transparent)]
    Core(#[from] amp_core::CoreError),

    #[error(transparent)]
    Chunk(#[from] amp_chunking::ChunkError),
}

impl Mp4Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Mp4Error::Parse {
            offset,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Mp4Error>;
