//! Manifest data model: the signed envelope and core record binding media
//! digests to publisher metadata, with canonical JSON (JCS) and CBOR
//! (RFC 7049) encodings, ManifestID computation, and structural validation.
//!
//! All values are immutable after construction and every operation is a
//! pure function.

pub mod codec;
pub mod digest;
pub mod error;
pub mod manifest;
pub mod time;
pub mod types;
pub mod value;

pub use codec::{
    bytes_from, bytes_value, decode_canonical_cbor, decode_canonical_json, encode_canonical_cbor,
    encode_canonical_json, require, time_from, time_value, Codec, Encodable,
};
pub use digest::TypedDigest;
pub use error::{CoreError, Result};
pub use manifest::{
    build_manifest, build_manifest_at, compute_manifest_id, validate_container, ValidationIssue,
    ValidationReport,
};
pub use time::Timestamp;
pub use types::*;
