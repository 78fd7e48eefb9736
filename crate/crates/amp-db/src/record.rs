//! A stored manifest with the evidence that admitted it.

use amp_core::codec::{require, time_from, time_value};
use amp_core::value::Value;
use amp_core::{Codec, CoreError, Encodable, ManifestContainer, Timestamp, TypedDigest};
use amp_ledger::Receipt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbRecord {
    pub container: ManifestContainer,
    pub receipt: Receipt,
    pub manifest_id: TypedDigest,
    pub ingest_time: Timestamp,
    pub revoked: bool,
}

impl Encodable for DbRecord {
    fn to_value(&self, codec: Codec) -> Result<Value, CoreError> {
        Ok(Value::map()
            .field("Container", self.container.to_value(codec)?)
            .field("Receipt", self.receipt.to_value(codec)?)
            .field("ManifestID", self.manifest_id.to_value(codec)?)
            .field("IngestTime", time_value(codec, self.ingest_time))
            .field("Revoked", Value::Bool(self.revoked))
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self, CoreError> {
        let revoked = match require(v, "Revoked")? {
            Value::Bool(b) => *b,
            _ => return Err(CoreError::bad_field("Revoked", "not a boolean")),
        };
        Ok(DbRecord {
            container: ManifestContainer::from_value(require(v, "Container")?, codec)?,
            receipt: Receipt::from_value(require(v, "Receipt")?, codec)?,
            manifest_id: TypedDigest::from_value(require(v, "ManifestID")?, codec)?,
            ingest_time: time_from(require(v, "IngestTime")?, codec)?,
            revoked,
        })
    }
}
