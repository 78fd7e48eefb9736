//! The provenance ledger: an append-only Merkle log of registrations,
//! revocations, and governance records, with service-signed roots, receipts
//! that verify offline, a deterministic replicated-commit simulation, and an
//! ingest benchmark.

pub mod bench;
pub mod entry;
pub mod ledger;
pub mod offline;
pub mod sim;
pub mod tree;

pub use bench::{benchmark_ingest, IngestReport};
pub use entry::{entry_digest, EntryKind, LedgerEntry};
pub use ledger::{Ledger, Receipt, SignedTreeRoot};
pub use offline::{verify_receipt_offline, ReceiptCheck};
pub use sim::{run_replicated, CommitRecord, CommitTrace, ReplicaHarness};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("registration signature does not verify")]
    BadSignature,

    #[error("ledger holds no entries")]
    EmptyLedger,

    #[error("entry {index} not yet covered by a signed root (signed size {signed})")]
    NotYetSigned { index: u64, signed: u64 },

    #[error("no registration found for the given manifest id")]
    UnknownManifest,

    #[error("revoker `{0}` does not chain to the registering organization")]
    Unauthorized(String),

    #[error("identity check failed: {0}")]
    Pki(#[from] amp_pki::PkiError),

    #[error("encoding failure: {0}")]
    Core(#[from] amp_core::CoreError),

    #[error("journal i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LedgerError>;
