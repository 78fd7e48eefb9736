//! Digest algorithm registry. Only "sha256" is registered at launch;
//! unknown names are rejected wherever they are parsed.

use sha2::{Digest as _, Sha256};

use crate::error::{CoreError, Result};

pub const SHA256: &str = "sha256";

/// Output size in bytes for a registered algorithm name.
pub fn output_len(algorithm: &str) -> Result<usize> {
    match algorithm {
        SHA256 => Ok(32),
        other => Err(CoreError::UnsupportedAlgorithm(other.to_owned())),
    }
}

pub fn digest(algorithm: &str, data: &[u8]) -> Result<Vec<u8>> {
    match algorithm {
        SHA256 => Ok(Sha256::digest(data).to_vec()),
        other => Err(CoreError::UnsupportedAlgorithm(other.to_owned())),
    }
}

pub fn sha256(data: &[u8]) -> Vec<u8> {
    Sha256::digest(data).to_vec()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedDigest {
    /// Lowercase ASCII algorithm name, e.g. "sha256".
    pub algorithm: String,
    pub value: Vec<u8>,
}

impl TypedDigest {
    pub fn compute(algorithm: &str, data: &[u8]) -> Result<Self> {
        Ok(TypedDigest {
            algorithm: algorithm.to_owned(),
            value: digest(algorithm, data)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !self
            .algorithm
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        {
            return Err(CoreError::bad_field(
                "DigestAlgorithm",
                "must be lowercase ASCII",
            ));
        }
        let expected = output_len(&self.algorithm)?;
        if self.value.len() != expected {
            return Err(CoreError::bad_field(
                "DigestValue",
                format!(
                    "length {} does not match {} output size {expected}",
                    self.value.len(),
                    self.algorithm
                ),
            ));
        }
        Ok(())
    }

    pub fn to_hex(&self) -> String {
        self.value.iter().map(|b| format!("{b:02x}")).collect()
    }
}
