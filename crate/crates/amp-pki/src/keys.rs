//! ECDSA P-256 key handling shared by certificates, tokens, and the ledger.

use p256::ecdsa::signature::Signer;
use p256::ecdsa::{Signature, SigningKey, VerifyingKey};
use p256::pkcs8::{DecodePrivateKey, EncodePrivateKey, LineEnding};
use rand::rngs::OsRng;

use crate::{PkiError, Result};

/// A private signing key. Clone-safe: signing is deterministic per RFC 6979
/// and never mutates key state, so handles may be shared across threads.
#[derive(Clone)]
pub struct KeyHandle {
    signing: SigningKey,
}

impl std::fmt::Debug for KeyHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyHandle").finish_non_exhaustive()
    }
}

impl KeyHandle {
    pub fn generate() -> Self {
        KeyHandle {
            signing: SigningKey::random(&mut OsRng),
        }
    }

    pub fn from_pkcs8_pem(pem: &str) -> Result<Self> {
        let signing =
            SigningKey::from_pkcs8_pem(pem).map_err(|e| PkiError::Key(e.to_string()))?;
        Ok(KeyHandle { signing })
    }

    pub fn to_pkcs8_pem(&self) -> Result<String> {
        self.signing
            .to_pkcs8_pem(LineEnding::LF)
            .map(|z| z.to_string())
            .map_err(|e| PkiError::Key(e.to_string()))
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        *self.signing.verifying_key()
    }

    /// Uncompressed SEC1 point (65 bytes), as carried in certificate SPKIs.
    pub fn public_sec1_bytes(&self) -> Vec<u8> {
        self.verifying_key()
            .to_encoded_point(false)
            .as_bytes()
            .to_vec()
    }

    /// Raw fixed-width `r‖s` signature (64 bytes).
    pub fn sign_raw(&self, message: &[u8]) -> Vec<u8> {
        let signature: Signature = self.signing.sign(message);
        signature.to_bytes().to_vec()
    }
}

/// Verify a raw 64-byte `r‖s` signature against a SEC1-encoded public key.
///
/// Verification goes through `ring` rather than the pure-Rust field
/// arithmetic used for signing: it is several times faster and the ledger's
/// ingest path is verification-bound.
pub fn verify_raw(public_sec1: &[u8], message: &[u8], signature: &[u8]) -> Result<()> {
    let key = ring::signature::UnparsedPublicKey::new(
        &ring::signature::ECDSA_P256_SHA256_FIXED,
        public_sec1,
    );
    key.verify(message, signature)
        .map_err(|_| PkiError::BadSignature)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_verify_round_trip() {
        let key = KeyHandle::generate();
        let sig = key.sign_raw(b"message");
        assert_eq!(sig.len(), 64);
        verify_raw(&key.public_sec1_bytes(), b"message", &sig).unwrap();
        assert_eq!(
            verify_raw(&key.public_sec1_bytes(), b"other", &sig),
            Err(PkiError::BadSignature)
        );
    }

    #[test]
    fn pem_round_trip_preserves_key() {
        let key = KeyHandle::generate();
        let pem = key.to_pkcs8_pem().unwrap();
        let back = KeyHandle::from_pkcs8_pem(&pem).unwrap();
        assert_eq!(key.public_sec1_bytes(), back.public_sec1_bytes());
    }
}
