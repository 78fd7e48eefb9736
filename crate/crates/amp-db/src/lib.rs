//! The indexed manifest database: stores containers with their ledger
//! receipts, answers lookups by MediaID, object digest, and chunk digest,
//! and honors revocations without destroying the audit trail.

pub mod db;
pub mod record;

pub use db::{ChunkHit, DbStats, ManifestDb, ObjectHit, Ordering};
pub use record::DbRecord;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("receipt does not verify offline: {0}")]
    BadReceipt(String),

    #[error("publisher attestation rejected: {0}")]
    BadAttestation(#[from] amp_pki::PkiError),

    #[error("revocation evidence rejected: {0}")]
    BadEvidence(String),

    #[error("encoding failure: {0}")]
    Core(#[from] amp_core::CoreError),

    #[error("journal i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, DbError>;
