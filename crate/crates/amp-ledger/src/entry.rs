//! Ledger entries and their digests.

use amp_core::codec::{bytes_from, bytes_value, require, time_from, time_value};
use amp_core::digest::digest;
use amp_core::value::{encode_cbor, Value};
use amp_core::{Codec, CoreError, Encodable, Timestamp, TypedDigest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Registration,
    Revocation,
    Governance,
}

impl EntryKind {
    fn code(self) -> i64 {
        match self {
            EntryKind::Registration => 1,
            EntryKind::Revocation => 2,
            EntryKind::Governance => 3,
        }
    }

    fn from_code(code: i64) -> Result<Self, CoreError> {
        match code {
            1 => Ok(EntryKind::Registration),
            2 => Ok(EntryKind::Revocation),
            3 => Ok(EntryKind::Governance),
            other => Err(CoreError::bad_field(
                "Kind",
                format!("unknown entry kind {other}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    /// Dense sequence number, assigned at append time.
    pub index: u64,
    pub kind: EntryKind,
    pub manifest_id: TypedDigest,
    pub copyright: String,
    /// Publisher signature over `manifest_id.value ‖ copyright` (UTF-8).
    pub publisher_signature: Vec<u8>,
    /// Common name of the organization the signer chains through; used to
    /// authorize later revocations.
    pub organization: String,
    pub timestamp: Timestamp,
}

impl LedgerEntry {
    /// The byte sequence the publisher signs.
    pub fn signed_message(manifest_id: &TypedDigest, copyright: &str) -> Vec<u8> {
        let mut m = manifest_id.value.clone();
        m.extend_from_slice(copyright.as_bytes());
        m
    }

    fn body_value(&self, codec: Codec) -> Result<Value, CoreError> {
        Ok(Value::map()
            .field("Kind", Value::Int(self.kind.code()))
            .field("ManifestID", self.manifest_id.to_value(codec)?)
            .field("Copyright", Value::Text(self.copyright.clone()))
            .field(
                "PublisherSignature",
                bytes_value(codec, &self.publisher_signature),
            )
            .field("Organization", Value::Text(self.organization.clone()))
            .field("Timestamp", time_value(codec, self.timestamp))
            .build())
    }
}

impl Encodable for LedgerEntry {
    fn to_value(&self, codec: Codec) -> Result<Value, CoreError> {
        let Value::Map(mut fields) = self.body_value(codec)? else {
            unreachable!("body_value builds a map");
        };
        fields.push(("Index".into(), Value::Int(self.index as i64)));
        Ok(Value::Map(fields))
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self, CoreError> {
        Ok(LedgerEntry {
            index: require(v, "Index")?.as_int()? as u64,
            kind: EntryKind::from_code(require(v, "Kind")?.as_int()?)?,
            manifest_id: TypedDigest::from_value(require(v, "ManifestID")?, codec)?,
            copyright: require(v, "Copyright")?.as_text()?.to_owned(),
            publisher_signature: bytes_from(
                require(v, "PublisherSignature")?,
                codec,
                "PublisherSignature",
            )?,
            organization: require(v, "Organization")?.as_text()?.to_owned(),
            timestamp: time_from(require(v, "Timestamp")?, codec)?,
        })
    }
}

/// Digest of an entry: hash of the canonical CBOR of every field except the
/// index, so the digest is computable before the entry is placed in the log.
pub fn entry_digest(entry: &LedgerEntry, algorithm: &str) -> Result<Vec<u8>, CoreError> {
    let body = entry.body_value(Codec::Cbor)?;
    digest(algorithm, &encode_cbor(&body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use amp_core::{decode_canonical_cbor, decode_canonical_json, encode_canonical_cbor};
    use amp_core::encode_canonical_json;

    fn fixture() -> LedgerEntry {
        LedgerEntry {
            index: 3,
            kind: EntryKind::Registration,
            manifest_id: TypedDigest {
                algorithm: "sha256".into(),
                value: vec![0xab; 32],
            },
            copyright: "Copyright (c) CompanyName Corporation. All rights reserved.".into(),
            publisher_signature: vec![1; 64],
            organization: "TPS".into(),
            timestamp: Timestamp::from_epoch_millis(1_700_000_000_000),
        }
    }

    #[test]
    fn round_trips_in_both_codecs() {
        let entry = fixture();
        let cbor = encode_canonical_cbor(&entry).unwrap();
        assert_eq!(decode_canonical_cbor::<LedgerEntry>(&cbor).unwrap(), entry);
        let json = encode_canonical_json(&entry).unwrap();
        assert_eq!(decode_canonical_json::<LedgerEntry>(&json).unwrap(), entry);
    }

    #[test]
    fn digest_ignores_the_index() {
        let a = fixture();
        let mut b = fixture();
        b.index = 999;
        assert_eq!(
            entry_digest(&a, "sha256").unwrap(),
            entry_digest(&b, "sha256").unwrap()
        );
        let mut c = fixture();
        c.copyright.push('!');
        assert_ne!(
            entry_digest(&a, "sha256").unwrap(),
            entry_digest(&c, "sha256").unwrap()
        );
    }
}
