//! Minimal ES256 JWT compact serialization.
//!
//! The claims carry a single `digest` field: the base64url-encoded hash the
//! token attests to. Only the exact header `{"alg":"ES256","typ":"JWT"}`
//! is accepted.

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde_json::json;

use crate::keys::{verify_raw, KeyHandle};
use crate::{PkiError, Result};

pub fn jwt_sign(digest: &[u8], key: &KeyHandle) -> String {
    let header = URL_SAFE_NO_PAD.encode(r#"{"alg":"ES256","typ":"JWT"}"#);
    let claims = URL_SAFE_NO_PAD.encode(
        json!({ "digest": URL_SAFE_NO_PAD.encode(digest) }).to_string(),
    );
    let signing_input = format!("{header}.{claims}");
    let signature = URL_SAFE_NO_PAD.encode(key.sign_raw(signing_input.as_bytes()));
    format!("{signing_input}.{signature}")
}

/// Check the token's signature and return the attested digest.
pub fn jwt_verify(token: &str, public_sec1: &[u8]) -> Result<Vec<u8>> {
    let parts: Vec<&str> = token.split('.').collect();
    if parts.len() != 3 {
        return Err(PkiError::Encoding("jwt is not three dot-joined parts".into()));
    }
    let header = URL_SAFE_NO_PAD
        .decode(parts[0])
        .map_err(|e| PkiError::Encoding(format!("jwt header: {e}")))?;
    let header: serde_json::Value = serde_json::from_slice(&header)
        .map_err(|e| PkiError::Encoding(format!("jwt header: {e}")))?;
    if header.get("alg").and_then(|a| a.as_str()) != Some("ES256") {
        return Err(PkiError::Encoding("unsupported jwt algorithm".into()));
    }
    let signature = URL_SAFE_NO_PAD
        .decode(parts[2])
        .map_err(|e| PkiError::Encoding(format!("jwt signature: {e}")))?;
    let signing_input = format!("{}.{}", parts[0], parts[1]);
    verify_raw(public_sec1, signing_input.as_bytes(), &signature)?;

    let claims = URL_SAFE_NO_PAD
        .decode(parts[1])
        .map_err(|e| PkiError::Encoding(format!("jwt claims: {e}")))?;
    let claims: serde_json::Value = serde_json::from_slice(&claims)
        .map_err(|e| PkiError::Encoding(format!("jwt claims: {e}")))?;
    let digest = claims
        .get("digest")
        .and_then(|d| d.as_str())
        .ok_or_else(|| PkiError::Encoding("jwt claims lack digest".into()))?;
    URL_SAFE_NO_PAD
        .decode(digest)
        .map_err(|e| PkiError::Encoding(format!("jwt digest claim: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_then_verify_returns_digest() {
        let key = KeyHandle::generate();
        let token = jwt_sign(&[7u8; 32], &key);
        assert_eq!(token.split('.').count(), 3);
        let digest = jwt_verify(&token, &key.public_sec1_bytes()).unwrap();
        assert_eq!(digest, vec![7u8; 32]);
    }

    #[test]
    fn altered_claims_fail() {
        let key = KeyHandle::generate();
        let token = jwt_sign(&[7u8; 32], &key);
        let parts: Vec<&str> = token.split('.').collect();
        let forged_claims = URL_SAFE_NO_PAD.encode(
            json!({ "digest": URL_SAFE_NO_PAD.encode([8u8; 32]) }).to_string(),
        );
        let forged = format!("{}.{}.{}", parts[0], forged_claims, parts[2]);
        assert_eq!(
            jwt_verify(&forged, &key.public_sec1_bytes()),
            Err(PkiError::BadSignature)
        );
    }

    #[test]
    fn wrong_key_fails() {
        let key = KeyHandle::generate();
        let other = KeyHandle::generate();
        let token = jwt_sign(b"digest", &key);
        assert_eq!(
            jwt_verify(&token, &other.public_sec1_bytes()),
            Err(PkiError::BadSignature)
        );
    }
}
