//! Keyless fragile audio watermark: a low-energy additive spread-spectrum
//! signal over 16-bit mono PCM carrying a signed payload. Embedding and
//! extraction share a fixed public chip seed, so any party can detect the
//! mark; heavy edits destroy it by design.

pub mod fixture;
pub mod payload;
pub mod spread;
pub mod wav;

pub use fixture::multi_sine;
pub use payload::{
    build_payload, decode_payload, payload_bits, verify_payload, WatermarkPayload,
};
pub use spread::{embed_pcm, extract_pcm, watermark_energy_ratio_db, EmbedParams};
pub use wav::{read_wav_mono16, write_wav_mono16};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WatermarkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("payload needs {needed} samples but the carrier has {capacity}")]
    TooLarge { needed: usize, capacity: usize },

    #[error("locator `{0}` did not resolve to a certificate")]
    Unresolvable(String),

    #[error("payload signature does not verify")]
    BadSignature,

    #[error("identity failure: {0}")]
    Pki(#[from] amp_pki::PkiError),

    #[error("encoding failure: {0}")]
    Core(#[from] amp_core::CoreError),

    #[error("wav i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed wav: {0}")]
    BadWav(String),
}

pub type Result<T> = std::result::Result<T, WatermarkError>;
