//! Identity and signing: test PKI generation, extended-key-usage policy,
//! dual COSE/JWT manifest signing, and attestation verification.
//!
//! This trust domain is deliberately disconnected from the web PKI: system
//! trust stores are never consulted; verification anchors only at roots the
//! caller supplies.

pub mod cose;
pub mod eku;
pub mod jwt;
pub mod keys;
pub mod sign;
pub mod testpki;
pub mod verify;

pub use eku::EkuPurpose;
pub use keys::KeyHandle;
pub use sign::sign_manifest;
pub use testpki::{generate_test_pki, NodeSpec, PkiSpec, TestPki, TrustChain};
pub use verify::{
    certificate_common_name, certificate_public_key, certificate_purposes, verify_chain,
    verify_publisher_attestation, TrustPolicy, VerifiedIdentity,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PkiError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("certificate parse failure: {0}")]
    CertParse(String),

    #[error("chain does not anchor at a trusted root")]
    UntrustedRoot,

    #[error("certificate `{0}` outside its validity window")]
    Expired(String),

    #[error("certificate chain signature invalid at `{0}`")]
    ChainSignature(String),

    #[error("leaf certificate lacks required purpose {0:?}")]
    PurposeViolation(EkuPurpose),

    #[error("content signature does not verify")]
    BadSignature,

    #[error("publisher attestation missing or empty")]
    MissingAttestation,

    #[error("COSE and JWT tokens disagree")]
    TokenMismatch,

    #[error("key handling failure: {0}")]
    Key(String),

    #[error("encoding failure: {0}")]
    Encoding(String),
}

impl From<amp_core::CoreError> for PkiError {
    fn from(e: amp_core::CoreError) -> Self {
        PkiError::Encoding(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PkiError>;
