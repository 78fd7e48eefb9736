use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("encoding error: {0}")]
    Encode(String),

    #[error("decoding error at byte {offset}: {message}")]
    Decode { offset: usize, message: String },

    #[error("unsupported digest algorithm {0:?}")]
    UnsupportedAlgorithm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing field {0:?}")]
    MissingField(&'static str),

    #[error("field {field:?}: {message}")]
    BadField { field: &'static str, message: String },
}

impl CoreError {
    pub fn decode(offset: usize, message: impl Into<String>) -> Self {
        CoreError::Decode {
            offset,
            message: message.into(),
        }
    }

    pub fn bad_field(field: &'static str, message: impl Into<String>) -> Self {
        CoreError::BadField {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
