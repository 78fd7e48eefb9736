//! The signed watermark payload and its bit framing.
//!
//! Frame layout, most significant bit first:
//! 32-bit sync word ‖ 16-bit payload byte length ‖ payload (canonical CBOR).

use amp_core::codec::{bytes_from, bytes_value, require};
use amp_core::value::Value;
use amp_core::{decode_canonical_cbor, encode_canonical_cbor, Codec, CoreError, Encodable};
use amp_pki::verify::certificate_public_key;
use amp_pki::{certificate_purposes, keys::verify_raw, EkuPurpose, TrustChain};

use crate::{Result, WatermarkError};

/// Fixed preamble marking a framed payload.
pub const SYNC_WORD: u32 = 0x1ACF_FC1D;

/// The 16-bit length prefix caps the serialized payload (and so the
/// locator) at 65,535 bytes; locators are further capped at 255 bytes.
pub const MAX_LOCATOR_BYTES: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkPayload {
    pub media_id: Vec<u8>,
    /// Where the verifier can fetch the master copy and the signing
    /// certificate for this payload.
    pub master_copy_locator: String,
    /// Signature over `media_id ‖ master_copy_locator` (UTF-8).
    pub signature: Vec<u8>,
}

impl WatermarkPayload {
    pub fn signed_message(media_id: &[u8], locator: &str) -> Vec<u8> {
        let mut m = media_id.to_vec();
        m.extend_from_slice(locator.as_bytes());
        m
    }
}

impl Encodable for WatermarkPayload {
    fn to_value(&self, codec: Codec) -> std::result::Result<Value, CoreError> {
        Ok(Value::map()
            .field("MediaID", bytes_value(codec, &self.media_id))
            .field(
                "MasterCopyLocator",
                Value::Text(self.master_copy_locator.clone()),
            )
            .field(
                "WatermarkPayloadSignature",
                bytes_value(codec, &self.signature),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> std::result::Result<Self, CoreError> {
        Ok(WatermarkPayload {
            media_id: bytes_from(require(v, "MediaID")?, codec, "MediaID")?,
            master_copy_locator: require(v, "MasterCopyLocator")?.as_text()?.to_owned(),
            signature: bytes_from(
                require(v, "WatermarkPayloadSignature")?,
                codec,
                "WatermarkPayloadSignature",
            )?,
        })
    }
}

/// Sign a payload with the chain's leaf key and return it with its framed
/// bit sequence (one 0/1 byte per bit).
pub fn build_payload(
    media_id: &[u8],
    locator: &str,
    chain: &TrustChain,
) -> Result<(WatermarkPayload, Vec<u8>)> {
    if media_id.is_empty() {
        return Err(WatermarkError::InvalidArgument("empty MediaID".into()));
    }
    if locator.len() > MAX_LOCATOR_BYTES {
        return Err(WatermarkError::InvalidArgument(format!(
            "locator longer than {MAX_LOCATOR_BYTES} bytes"
        )));
    }
    let leaf_pem = chain
        .certificates
        .last()
        .ok_or_else(|| WatermarkError::InvalidArgument("empty certificate chain".into()))?;
    if !certificate_purposes(leaf_pem)?.contains(&EkuPurpose::ManifestSigning) {
        return Err(WatermarkError::Pki(amp_pki::PkiError::PurposeViolation(
            EkuPurpose::ManifestSigning,
        )));
    }
    let payload = WatermarkPayload {
        media_id: media_id.to_vec(),
        master_copy_locator: locator.to_owned(),
        signature: chain
            .leaf_key
            .sign_raw(&WatermarkPayload::signed_message(media_id, locator)),
    };
    let bits = payload_bits(&payload)?;
    Ok((payload, bits))
}

/// Frame a payload as a bit sequence.
pub fn payload_bits(payload: &WatermarkPayload) -> Result<Vec<u8>> {
    let body = encode_canonical_cbor(payload)?;
    if body.len() > u16::MAX as usize {
        return Err(WatermarkError::InvalidArgument(
            "serialized payload exceeds the 16-bit length field".into(),
        ));
    }
    let mut bytes = SYNC_WORD.to_be_bytes().to_vec();
    bytes.extend_from_slice(&(body.len() as u16).to_be_bytes());
    bytes.extend_from_slice(&body);
    Ok(bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1))
        .collect())
}

/// Parse extracted payload bytes (the CBOR after the frame header) back
/// into a payload. Garbage bytes decode to an error, which detectors treat
/// as absence.
pub fn decode_payload(bytes: &[u8]) -> Result<WatermarkPayload> {
    Ok(decode_canonical_cbor(bytes)?)
}

/// Check a payload's signature against the certificate the resolver finds
/// at its locator; returns the attested fields.
pub fn verify_payload<R>(payload: &WatermarkPayload, cert_resolver: R) -> Result<(Vec<u8>, String)>
where
    R: Fn(&str) -> Option<String>,
{
    let pem = cert_resolver(&payload.master_copy_locator)
        .ok_or_else(|| WatermarkError::Unresolvable(payload.master_copy_locator.clone()))?;
    let key = certificate_public_key(&pem)?;
    let message =
        WatermarkPayload::signed_message(&payload.media_id, &payload.master_copy_locator);
    verify_raw(&key, &message, &payload.signature)
        .map_err(|_| WatermarkError::BadSignature)?;
    Ok((payload.media_id.clone(), payload.master_copy_locator.clone()))
}
