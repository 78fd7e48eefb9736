//! Canonical value tree shared by the JSON and CBOR codecs.
//!
//! Manifest records lower themselves into `Value` and are then rendered
//! either as canonical CBOR (RFC 7049 section 3.9: shortest-form integers,
//! definite lengths, map keys ordered by encoded length then bytes) or as
//! canonical JSON (JCS: lexicographically ordered member names, minimal
//! escaping). Absent optional fields never appear in a `Value` map.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Text(String),
    Bytes(Vec<u8>),
    Array(Vec<Value>),
    /// Insertion-ordered; the encoders sort by their own canonical rule.
    Map(Vec<(String, Value)>),
}

impl Value {
    pub fn map() -> MapBuilder {
        MapBuilder { entries: Vec::new() }
    }

    pub fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(i) => Ok(*i),
            _ => Err(CoreError::Encode(format!("expected integer, got {self:?}"))),
        }
    }

    pub fn as_text(&self) -> Result<&str> {
        match self {
            Value::Text(s) => Ok(s),
            _ => Err(CoreError::Encode(format!("expected text, got {self:?}"))),
        }
    }

    pub fn as_bytes(&self) -> Result<&[u8]> {
        match self {
            Value::Bytes(b) => Ok(b),
            _ => Err(CoreError::Encode(format!("expected bytes, got {self:?}"))),
        }
    }

    pub fn as_array(&self) -> Result<&[Value]> {
        match self {
            Value::Array(a) => Ok(a),
            _ => Err(CoreError::Encode(format!("expected array, got {self:?}"))),
        }
    }

    pub fn as_map(&self) -> Result<&[(String, Value)]> {
        match self {
            Value::Map(m) => Ok(m),
            _ => Err(CoreError::Encode(format!("expected map, got {self:?}"))),
        }
    }

    pub fn get<'a>(&'a self, key: &str) -> Option<&'a Value> {
        match self {
            Value::Map(m) => m.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }
}

pub struct MapBuilder {
    entries: Vec<(String, Value)>,
}

impl MapBuilder {
    pub fn field(mut self, key: &str, value: Value) -> Self {
        self.entries.push((key.to_owned(), value));
        self
    }

    pub fn opt(self, key: &str, value: Option<Value>) -> Self {
        match value {
            Some(v) => self.field(key, v),
            None => self,
        }
    }

    pub fn build(self) -> Value {
        Value::Map(self.entries)
    }
}

// ---------------------------------------------------------------------------
// Canonical CBOR (RFC 7049)
// ---------------------------------------------------------------------------

pub fn encode_cbor(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    write_cbor(value, &mut out);
    out
}

fn write_header(major: u8, arg: u64, out: &mut Vec<u8>) {
    let mt = major << 5;
    if arg < 24 {
        out.push(mt | arg as u8);
    } else if arg <= u8::MAX as u64 {
        out.push(mt | 24);
        out.push(arg as u8);
    } else if arg <= u16::MAX as u64 {
        out.push(mt | 25);
        out.extend_from_slice(&(arg as u16).to_be_bytes());
    } else if arg <= u32::MAX as u64 {
        out.push(mt | 26);
        out.extend_from_slice(&(arg as u32).to_be_bytes());
    } else {
        out.push(mt | 27);
        out.extend_from_slice(&arg.to_be_bytes());
    }
}

fn write_cbor(value: &Value, out: &mut Vec<u8>) {
    match value {
        Value::Int(i) => {
            if *i >= 0 {
                write_header(0, *i as u64, out);
            } else {
                write_header(1, (-1 - *i) as u64, out);
            }
        }
        Value::Bool(b) => out.push(if *b { 0xf5 } else { 0xf4 }),
        Value::Bytes(b) => {
            write_header(2, b.len() as u64, out);
            out.extend_from_slice(b);
        }
        Value::Text(s) => {
            write_header(3, s.len() as u64, out);
            out.extend_from_slice(s.as_bytes());
        }
        Value::Array(items) => {
            write_header(4, items.len() as u64, out);
            for item in items {
                write_cbor(item, out);
            }
        }
        Value::Map(entries) => {
            // Canonical key order: shorter encoded key first, then bytewise.
            let mut sorted: Vec<&(String, Value)> = entries.iter().collect();
            sorted.sort_by(|a, b| {
                (a.0.len(), a.0.as_bytes()).cmp(&(b.0.len(), b.0.as_bytes()))
            });
            write_header(5, sorted.len() as u64, out);
            for (k, v) in sorted {
                write_header(3, k.len() as u64, out);
                out.extend_from_slice(k.as_bytes());
                write_cbor(v, out);
            }
        }
    }
}

pub fn decode_cbor(bytes: &[u8]) -> Result<Value> {
    let mut pos = 0;
    let value = read_cbor(bytes, &mut pos)?;
    if pos != bytes.len() {
        return Err(CoreError::decode(pos, "trailing bytes after CBOR item"));
    }
    Ok(value)
}

fn read_arg(bytes: &[u8], pos: &mut usize, info: u8) -> Result<u64> {
    let take = |n: usize, pos: &mut usize| -> Result<u64> {
        if *pos + n > bytes.len() {
            return Err(CoreError::decode(*pos, "truncated CBOR argument"));
        }
        let mut v = 0u64;
        for &b in &bytes[*pos..*pos + n] {
            v = (v << 8) | b as u64;
        }
        *pos += n;
        Ok(v)
    };
    match info {
        0..=23 => Ok(info as u64),
        24 => take(1, pos),
        25 => take(2, pos),
        26 => take(4, pos),
        27 => take(8, pos),
        _ => Err(CoreError::decode(*pos, "indefinite-length items not allowed")),
    }
}

fn read_cbor(bytes: &[u8], pos: &mut usize) -> Result<Value> {
    let start = *pos;
    let head = *bytes
        .get(*pos)
        .ok_or_else(|| CoreError::decode(*pos, "unexpected end of input"))?;
    *pos += 1;
    let major = head >> 5;
    let info = head & 0x1f;
    match major {
        0 => {
            let v = read_arg(bytes, pos, info)?;
            i64::try_from(v)
                .map(Value::Int)
                .map_err(|_| CoreError::decode(start, "integer out of range"))
        }
        1 => {
            let v = read_arg(bytes, pos, info)?;
            i64::try_from(v)
                .map(|v| Value::Int(-1 - v))
                .map_err(|_| CoreError::decode(start, "integer out of range"))
        }
        2 | 3 => {
            let len = read_arg(bytes, pos, info)? as usize;
            if *pos + len > bytes.len() {
                return Err(CoreError::decode(start, "truncated string"));
            }
            let raw = bytes[*pos..*pos + len].to_vec();
            *pos += len;
            if major == 2 {
                Ok(Value::Bytes(raw))
            } else {
                String::from_utf8(raw)
                    .map(Value::Text)
                    .map_err(|_| CoreError::decode(start, "invalid UTF-8 in text string"))
            }
        }
        4 => {
            let len = read_arg(bytes, pos, info)? as usize;
            let mut items = Vec::with_capacity(len.min(4096));
            for _ in 0..len {
                items.push(read_cbor(bytes, pos)?);
            }
            Ok(Value::Array(items))
        }
        5 => {
            let len = read_arg(bytes, pos, info)? as usize;
            let mut entries = Vec::with_capacity(len.min(4096));
            for _ in 0..len {
                let key = match read_cbor(bytes, pos)? {
                    Value::Text(s) => s,
                    _ => return Err(CoreError::decode(start, "non-text map key")),
                };
                let value = read_cbor(bytes, pos)?;
                entries.push((key, value));
            }
            Ok(Value::Map(entries))
        }
        7 => match info {
            20 => Ok(Value::Bool(false)),
            21 => Ok(Value::Bool(true)),
            _ => Err(CoreError::decode(start, "unsupported simple value")),
        },
        _ => Err(CoreError::decode(start, "unsupported major type")),
    }
}

// ---------------------------------------------------------------------------
// Canonical JSON (JCS, RFC 8785)
// ---------------------------------------------------------------------------

pub fn encode_json(value: &Value) -> Result<Vec<u8>> {
    let mut out = String::new();
    write_json(value, &mut out)?;
    Ok(out.into_bytes())
}

fn write_json(value: &Value, out: &mut String) -> Result<()> {
    match value {
        Value::Int(i) => {
            if i.unsigned_abs() >= (1 << 53) {
                return Err(CoreError::Encode(format!(
                    "integer {i} exceeds JSON safe range"
                )));
            }
            out.push_str(&i.to_string());
        }
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Text(s) => write_json_string(s, out),
        Value::Bytes(_) => {
            // Byte fields must be projected to text before JSON encoding.
            return Err(CoreError::Encode("raw bytes in JSON value".into()));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out)?;
            }
            out.push(']');
        }
        Value::Map(entries) => {
            // JCS sorts by UTF-16 code units; all manifest keys are ASCII so
            // bytewise order is identical.
            let mut sorted: Vec<&(String, Value)> = entries.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            out.push('{');
            for (i, (k, v)) in sorted.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json_string(k, out);
                out.push(':');
                write_json(v, out)?;
            }
            out.push('}');
        }
    }
    Ok(())
}

fn write_json_string(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\u{8}' => out.push_str("\\b"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\u{c}' => out.push_str("\\f"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn decode_json(bytes: &[u8]) -> Result<Value> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CoreError::decode(e.valid_up_to(), "invalid UTF-8"))?;
    let parsed: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CoreError::decode(e.column(), e.to_string()))?;
    from_serde(&parsed)
}

fn from_serde(v: &serde_json::Value) -> Result<Value> {
    match v {
        serde_json::Value::Bool(b) => Ok(Value::Bool(*b)),
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| CoreError::Encode(format!("non-integer number {n}"))),
        serde_json::Value::String(s) => Ok(Value::Text(s.clone())),
        serde_json::Value::Array(items) => Ok(Value::Array(
            items.iter().map(from_serde).collect::<Result<_>>()?,
        )),
        serde_json::Value::Object(map) => Ok(Value::Map(
            map.iter()
                .map(|(k, v)| Ok((k.clone(), from_serde(v)?)))
                .collect::<Result<_>>()?,
        )),
        serde_json::Value::Null => Err(CoreError::Encode(
            "null is not a valid manifest value (omit the field)".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cbor_shortest_form_integers() {
        assert_eq!(encode_cbor(&Value::Int(1)), vec![0x01]);
        assert_eq!(encode_cbor(&Value::Int(23)), vec![0x17]);
        assert_eq!(encode_cbor(&Value::Int(24)), vec![0x18, 24]);
        assert_eq!(encode_cbor(&Value::Int(-1)), vec![0x20]);
        assert_eq!(encode_cbor(&Value::Int(256)), vec![0x19, 0x01, 0x00]);
    }

    #[test]
    fn cbor_map_key_order_is_length_first() {
        let v = Value::map()
            .field("bb", Value::Int(2))
            .field("a", Value::Int(1))
            .field("ab", Value::Int(3))
            .build();
        let bytes = encode_cbor(&v);
        // "a" (len 1) before "ab" before "bb".
        let decoded = decode_cbor(&bytes).unwrap();
        let keys: Vec<&str> = decoded.as_map().unwrap().iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, vec!["a", "ab", "bb"]);
    }

    #[test]
    fn cbor_rejects_trailing_garbage() {
        let mut bytes = encode_cbor(&Value::Int(5));
        bytes.push(0x00);
        assert!(decode_cbor(&bytes).is_err());
    }

    #[test]
    fn json_sorted_keys_and_escapes() {
        let v = Value::map()
            .field("b", Value::Text("x\ny\"".into()))
            .field("a", Value::Int(-7))
            .build();
        let s = String::from_utf8(encode_json(&v).unwrap()).unwrap();
        assert_eq!(s, r#"{"a":-7,"b":"x\ny\""}"#);
    }

    #[test]
    fn json_null_rejected_on_decode() {
        assert!(decode_json(br#"{"a":null}"#).is_err());
    }
}
