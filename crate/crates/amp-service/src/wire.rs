//! REST body shapes. Structured values (containers, receipts) travel as
//! base64 of their canonical CBOR encoding; digests travel as lowercase hex.

use amp_core::{decode_canonical_cbor, encode_canonical_cbor, ManifestContainer, TypedDigest};
use amp_ledger::Receipt;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::{Result, ServiceError};

/// Header carrying the base64 of the concatenated client PEM chain.
pub const CHAIN_HEADER: &str = "x-amp-client-chain";
/// Header carrying the base64 raw signature over the request body.
pub const SIGNATURE_HEADER: &str = "x-amp-client-signature";

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterRequest {
    /// Base64 canonical CBOR of the signed ManifestContainer.
    pub container: String,
    /// Copyright statement recorded in the ledger entry.
    #[serde(default)]
    pub copyright: String,
    /// Base64 publisher signature over manifest_id ‖ copyright.
    #[serde(default)]
    pub registration_signature: Option<String>,
    /// Base64 canonical CBOR of a previously issued receipt; when present
    /// the service ingests without a new ledger entry.
    #[serde(default)]
    pub receipt: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterResponse {
    /// Lowercase hex of the manifest id value.
    pub manifest_id: String,
    /// Base64 canonical CBOR of the receipt.
    pub receipt: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestResponse {
    pub container: String,
    pub revoked: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReceiptResponse {
    pub receipt: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryResponse {
    pub manifest_ids: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RevocationEvidence {
    /// Root→leaf PEM chain of the revoker.
    pub chain: Vec<String>,
    /// Base64 signature over manifest_id ‖ "revocation".
    pub signature: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RevocationRequest {
    pub manifest_id: String,
    pub evidence: RevocationEvidence,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RevocationResponse {
    pub ledger_index: u64,
    pub receipt: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ServiceKeyResponse {
    /// "p256" — uncompressed SEC1 point, base64.
    pub algorithm: String,
    pub public_key: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: String,
}

pub fn encode_container(container: &ManifestContainer) -> Result<String> {
    Ok(B64.encode(encode_canonical_cbor(container)?))
}

pub fn decode_container(b64: &str) -> Result<ManifestContainer> {
    Ok(decode_canonical_cbor(&decode_b64(b64, "container")?)?)
}

pub fn encode_receipt(receipt: &Receipt) -> Result<String> {
    Ok(B64.encode(encode_canonical_cbor(receipt)?))
}

pub fn decode_receipt(b64: &str) -> Result<Receipt> {
    Ok(decode_canonical_cbor(&decode_b64(b64, "receipt")?)?)
}

pub fn decode_b64(text: &str, what: &str) -> Result<Vec<u8>> {
    B64.decode(text)
        .map_err(|e| ServiceError::InvalidArgument(format!("bad base64 in {what}: {e}")))
}

pub fn manifest_id_hex(id: &TypedDigest) -> String {
    hex::encode(&id.value)
}

pub fn manifest_id_from_hex(text: &str) -> Result<TypedDigest> {
    let value = hex::decode(text)
        .map_err(|e| ServiceError::InvalidArgument(format!("bad manifest id hex: {e}")))?;
    Ok(TypedDigest {
        algorithm: "sha256".into(),
        value,
    })
}

/// Split a concatenation of PEM certificates back into one string each.
pub fn split_pem_chain(concat: &str) -> Vec<String> {
    const END: &str = "-----END CERTIFICATE-----";
    let mut out = Vec::new();
    let mut rest = concat;
    while let Some(at) = rest.find(END) {
        let (cert, tail) = rest.split_at(at + END.len());
        let cert = cert.trim_start();
        if !cert.is_empty() {
            out.push(format!("{cert}\n"));
        }
        rest = tail;
    }
    out
}
