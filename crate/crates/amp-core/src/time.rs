//! UTC timestamps at millisecond precision.
//!
//! The JSON projection renders RFC 3339 strings; the CBOR projection uses
//! epoch milliseconds. Equality is over the abstract instant.

use chrono::{DateTime, SecondsFormat, Utc};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_epoch_millis(ms: i64) -> Self {
        Timestamp(ms)
    }

    pub fn epoch_millis(&self) -> i64 {
        self.0
    }

    pub fn now() -> Self {
        Timestamp(Utc::now().timestamp_millis())
    }

    pub fn to_rfc3339(&self) -> String {
        DateTime::<Utc>::from_timestamp_millis(self.0)
            .expect("timestamp in representable range")
            .to_rfc3339_opts(SecondsFormat::Millis, true)
    }

    pub fn parse_rfc3339(s: &str) -> Result<Self> {
        let dt = DateTime::parse_from_rfc3339(s)
            .map_err(|e| CoreError::bad_field("CreationTime", e.to_string()))?;
        Ok(Timestamp(dt.with_timezone(&Utc).timestamp_millis()))
    }
}
