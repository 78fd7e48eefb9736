//! Minimal COSE_Sign1 (RFC 8152) over ES256, fixed-shape for this system.
//!
//! The token is the canonical CBOR array
//! `[protected: bstr, unprotected: {}, payload: bstr, signature: bstr]`
//! where the protected header is the serialized map `{1: -7}` (alg = ES256)
//! and the signature is raw 64-byte `r‖s` over the Sig_structure.

use amp_core::value::{decode_cbor, encode_cbor};
use amp_core::value::Value;

use crate::keys::{verify_raw, KeyHandle};
use crate::{PkiError, Result};

/// Serialized protected header `{1: -7}`: alg = ES256.
pub const PROTECTED_HEADER: [u8; 3] = [0xa1, 0x01, 0x26];

fn sig_structure(payload: &[u8]) -> Vec<u8> {
    encode_cbor(&Value::Array(vec![
        Value::Text("Signature1".into()),
        Value::Bytes(PROTECTED_HEADER.to_vec()),
        Value::Bytes(Vec::new()),
        Value::Bytes(payload.to_vec()),
    ]))
}

pub fn cose_sign1(payload: &[u8], key: &KeyHandle) -> Vec<u8> {
    let signature = key.sign_raw(&sig_structure(payload));
    encode_cbor(&Value::Array(vec![
        Value::Bytes(PROTECTED_HEADER.to_vec()),
        Value::Map(Vec::new()),
        Value::Bytes(payload.to_vec()),
        Value::Bytes(signature),
    ]))
}

/// Check the token's signature and return the embedded payload.
pub fn cose_verify(token: &[u8], public_sec1: &[u8]) -> Result<Vec<u8>> {
    let value =
        decode_cbor(token).map_err(|e| PkiError::Encoding(format!("cose token: {e}")))?;
    let items = match value {
        Value::Array(items) if items.len() == 4 => items,
        _ => {
            return Err(PkiError::Encoding(
                "cose token is not a 4-element array".into(),
            ))
        }
    };
    let protected = match &items[0] {
        Value::Bytes(b) => b,
        _ => return Err(PkiError::Encoding("protected header not bytes".into())),
    };
    if protected.as_slice() != PROTECTED_HEADER {
        return Err(PkiError::Encoding("unsupported cose algorithm".into()));
    }
    let payload = match &items[2] {
        Value::Bytes(b) => b.clone(),
        _ => return Err(PkiError::Encoding("cose payload not bytes".into())),
    };
    let signature = match &items[3] {
        Value::Bytes(b) => b,
        _ => return Err(PkiError::Encoding("cose signature not bytes".into())),
    };
    verify_raw(public_sec1, &sig_structure(&payload), signature)?;
    Ok(payload)
}
