//! The provenance service and its clients: registration, query, receipts,
//! and revocation over REST, plus the publish and playback flows the `amp`
//! CLI drives end to end.

pub mod client;
pub mod playback;
pub mod publish;
pub mod rest;
pub mod service;
pub mod wire;

pub use client::{HttpClient, ManifestSource, Registrar};
pub use playback::{playback_verify_flow, Status, VerificationReport};
pub use publish::{publish_flow, PublishOptions, PublishOutcome};
pub use service::AmpService;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unauthorized: {0}")]
    Unauthorized(String),

    #[error("transport failure: {0}")]
    Transport(String),

    #[error("{stage} stage failed: {message}")]
    Stage { stage: &'static str, message: String },

    #[error(transparent)]
    Core(#[from] amp_core::CoreError),

    #[error(transparent)]
    Chunk(#[from] amp_chunking::ChunkError),

    #[error(transparent)]
    Mp4(#[from] amp_mp4::Mp4Error),

    #[error(transparent)]
    Pki(#[from] amp_pki::PkiError),

    #[error(transparent)]
    Ledger(#[from] amp_ledger::LedgerError),

    #[error(transparent)]
    Db(#[from] amp_db::DbError),

    #[error(transparent)]
    Watermark(#[from] amp_watermark::WatermarkError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ServiceError {
    pub fn stage(stage: &'static str, err: impl std::fmt::Display) -> Self {
        ServiceError::Stage {
            stage,
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, ServiceError>;
