//! Codec-aware lowering between manifest records and [`Value`] trees.
//!
//! The two canonical projections differ in how they carry byte strings and
//! timestamps: CBOR uses native byte strings and epoch-millisecond integers,
//! JSON uses base64 and RFC 3339 strings.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;

use crate::error::{CoreError, Result};
use crate::time::Timestamp;
use crate::value::{self, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codec {
    Cbor,
    Json,
}

pub trait Encodable: Sized {
    fn to_value(&self, codec: Codec) -> Result<Value>;
    fn from_value(value: &Value, codec: Codec) -> Result<Self>;
}

/// Canonical JSON (JCS) encoding of a manifest record.
pub fn encode_canonical_json<T: Encodable>(record: &T) -> Result<Vec<u8>> {
    value::encode_json(&record.to_value(Codec::Json)?)
}

/// RFC 7049 canonical CBOR encoding of a manifest record.
pub fn encode_canonical_cbor<T: Encodable>(record: &T) -> Result<Vec<u8>> {
    Ok(value::encode_cbor(&record.to_value(Codec::Cbor)?))
}

pub fn decode_canonical_json<T: Encodable>(bytes: &[u8]) -> Result<T> {
    T::from_value(&value::decode_json(bytes)?, Codec::Json)
}

pub fn decode_canonical_cbor<T: Encodable>(bytes: &[u8]) -> Result<T> {
    T::from_value(&value::decode_cbor(bytes)?, Codec::Cbor)
}

pub fn bytes_value(codec: Codec, bytes: &[u8]) -> Value {
    match codec {
        Codec::Cbor => Value::Bytes(bytes.to_vec()),
        Codec::Json => Value::Text(BASE64.encode(bytes)),
    }
}

pub fn bytes_from(value: &Value, codec: Codec, field: &'static str) -> Result<Vec<u8>> {
    match codec {
        Codec::Cbor => Ok(value.as_bytes()?.to_vec()),
        Codec::Json => BASE64
            .decode(value.as_text()?)
            .map_err(|e| CoreError::bad_field(field, format!("invalid base64: {e}"))),
    }
}

pub fn time_value(codec: Codec, t: Timestamp) -> Value {
    match codec {
        Codec::Cbor => Value::Int(t.epoch_millis()),
        Codec::Json => Value::Text(t.to_rfc3339()),
    }
}

pub fn time_from(value: &Value, codec: Codec) -> Result<Timestamp> {
    match codec {
        Codec::Cbor => Ok(Timestamp::from_epoch_millis(value.as_int()?)),
        Codec::Json => Timestamp::parse_rfc3339(value.as_text()?),
    }
}

pub fn require<'a>(map: &'a Value, field: &'static str) -> Result<&'a Value> {
    map.get(field).ok_or(CoreError::MissingField(field))
}
