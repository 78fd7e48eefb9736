//! Playback-side verification: hash the media, locate a manifest
//! (object digest, then chunk digests, then sidecar, then watermark),
//! verify attestation and receipt, and check content integrity.
//!
//! Every path to `Authenticated` passes both the publisher attestation and
//! the offline receipt check; any doubt downgrades the verdict.

use std::fs;
use std::path::Path;

use amp_chunking::chunk_simple;
use amp_core::digest::sha256;
use amp_core::{
    compute_manifest_id, decode_canonical_cbor, ChunkAuthenticator, ManifestContainer,
    TypedDigest,
};
use amp_ledger::verify_receipt_offline;
use amp_mp4::{parse_boxes, verify_fmp4_stream};
use amp_pki::{verify_publisher_attestation, TrustPolicy};
use amp_watermark::{extract_pcm, read_wav_mono16, EmbedParams};

use crate::client::ManifestSource;
use crate::{Result, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Authenticated,
    Unverified,
    Tampered,
    Revoked,
    /// No content-bound manifest found, but a watermark recovered a
    /// MediaID with registered provenance.
    WatermarkFallback,
}

impl Status {
    /// Process exit code for the CLI: 0 success, 2 unverified, 3 tampered,
    /// 4 revoked. A watermark fallback is not an authentication.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Authenticated => 0,
            Status::Unverified | Status::WatermarkFallback => 2,
            Status::Tampered => 3,
            Status::Revoked => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Authenticated => "Authenticated",
            Status::Unverified => "Unverified",
            Status::Tampered => "Tampered",
            Status::Revoked => "Revoked",
            Status::WatermarkFallback => "WatermarkFallback",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub media_path: String,
    pub status: Status,
    pub publisher: Option<String>,
    pub manifest_id: Option<TypedDigest>,
    pub failing_chunks: Vec<u64>,
    pub receipt_checked: bool,
}

impl VerificationReport {
    fn unverified(media_path: &str) -> Self {
        VerificationReport {
            media_path: media_path.to_owned(),
            status: Status::Unverified,
            publisher: None,
            manifest_id: None,
            failing_chunks: Vec::new(),
            receipt_checked: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "media_path": self.media_path,
            "status": self.status.as_str(),
            "publisher": self.publisher,
            "manifest_id": self.manifest_id.as_ref().map(|id| hex::encode(&id.value)),
            "failing_chunks": self.failing_chunks,
            "receipt_checked": self.receipt_checked,
        })
        .to_string()
    }
}

/// How the candidate manifest was located, deciding which integrity check
/// applies.
enum Located {
    ContentBound(TypedDigest),
    Watermark(TypedDigest),
}

fn iso_chunk_digests(bytes: &[u8]) -> Option<Vec<Vec<u8>>> {
    let tree = parse_boxes(bytes).ok()?;
    if !tree.iter().any(|b| &b.box_type == b"moof") {
        return None;
    }
    let (chunks, _) = amp_mp4::extract_iso_chunks(&tree, bytes, "sha256").ok()?;
    Some(chunks.into_iter().map(|c| c.digest).collect())
}

fn locate(
    media_path: &Path,
    bytes: &[u8],
    object_digest: &[u8],
    source: &dyn ManifestSource,
) -> Result<Option<Located>> {
    // Cheapest first: whole-object digest.
    if let Some(id) = source.by_object_digest(object_digest)?.into_iter().next() {
        return Ok(Some(Located::ContentBound(id)));
    }
    // Chunk digests: fragment digests for fMP4, file-offset chunks otherwise.
    let chunk_digests = iso_chunk_digests(bytes)
        .or_else(|| {
            chunk_simple(bytes, amp_chunking::DEFAULT_CHUNK_SIZE, "sha256")
                .ok()
                .map(|a| a.chunk_digests)
        })
        .unwrap_or_default();
    if !chunk_digests.is_empty() {
        // Any single chunk suffices to find the manifest; integrity is
        // judged afterwards against the full authenticator.
        for digest in &chunk_digests {
            if let Some(id) = source
                .by_chunk_digests(std::slice::from_ref(digest))?
                .into_iter()
                .next()
            {
                return Ok(Some(Located::ContentBound(id)));
            }
        }
    }
    // Sidecar manifest next to the media.
    let mut sidecar_name = media_path.file_name().unwrap_or_default().to_os_string();
    sidecar_name.push(".amp.cbor");
    let sidecar = media_path.with_file_name(sidecar_name);
    if let Ok(encoded) = fs::read(&sidecar) {
        if let Ok(container) = decode_canonical_cbor::<ManifestContainer>(&encoded) {
            let id = compute_manifest_id(&container.core_manifest)?;
            return Ok(Some(Located::ContentBound(id)));
        }
    }
    // Last resort: a fragile watermark carrying the MediaID.
    if let Ok((_rate, samples)) = read_wav_mono16(media_path) {
        if let Some(payload) = extract_pcm(&samples, &EmbedParams::default()) {
            if let Some(id) = source.by_media_id(&payload.media_id)?.into_iter().next() {
                return Ok(Some(Located::Watermark(id)));
            }
        }
    }
    Ok(None)
}

/// Chunk indices failing against the manifest, or `None` when the media
/// cannot be checked against any authenticator it carries.
fn failing_chunks(bytes: &[u8], container: &ManifestContainer) -> Option<Vec<u64>> {
    if parse_boxes(bytes)
        .map(|t| t.iter().any(|b| &b.box_type == b"moof"))
        .unwrap_or(false)
    {
        if let Ok(verdicts) = verify_fmp4_stream(bytes, container) {
            return Some(
                verdicts
                    .into_iter()
                    .filter(|v| !v.ok)
                    .map(|v| v.index)
                    .collect(),
            );
        }
    }
    for tagged in &container.facsimile_info.records {
        for auth in tagged.facsimile.chunk_data.iter().flatten() {
            if let ChunkAuthenticator::Simple(simple) = auth {
                let mut failing = Vec::new();
                for (i, window) in bytes.chunks(simple.chunk_size as usize).enumerate() {
                    match amp_chunking::verify_simple_chunk(simple, i as u64, window, "sha256") {
                        Ok(true) => {}
                        _ => failing.push(i as u64),
                    }
                }
                if bytes.chunks(simple.chunk_size as usize).count() as u64 != simple.num_chunks {
                    // Length mismatch: report the trailing chunk as failing.
                    failing.push(simple.num_chunks.saturating_sub(1));
                    failing.dedup();
                }
                return Some(failing);
            }
        }
    }
    None
}

/// Verify a media file against the provenance service. Transport failures
/// and verification doubts yield `Unverified`, never a false
/// `Authenticated`.
pub fn playback_verify_flow(
    media_path: &Path,
    source: &dyn ManifestSource,
    policy: &TrustPolicy,
) -> VerificationReport {
    let path_text = media_path.display().to_string();
    let mut report = VerificationReport::unverified(&path_text);

    let Ok(bytes) = fs::read(media_path) else {
        return report;
    };
    let object_digest = sha256(&bytes);

    let located = match locate(media_path, &bytes, &object_digest, source) {
        Ok(Some(l)) => l,
        Ok(None) => return report,
        Err(ServiceError::Transport(_)) => return report,
        Err(_) => return report,
    };
    let (manifest_id, via_watermark) = match located {
        Located::ContentBound(id) => (id, false),
        Located::Watermark(id) => (id, true),
    };
    report.manifest_id = Some(manifest_id.clone());

    let Ok(Some((container, revoked))) = source.manifest(&manifest_id) else {
        return report;
    };
    if revoked {
        report.status = Status::Revoked;
        return report;
    }

    // Publisher attestation, then the offline receipt check.
    let Ok(identity) = verify_publisher_attestation(&container, policy) else {
        return report;
    };
    let Ok(Some(receipt)) = source.receipt(&manifest_id) else {
        return report;
    };
    let Ok(service_key) = source.service_public_key() else {
        return report;
    };
    if !verify_receipt_offline(&container, &receipt, &service_key).is_valid() {
        return report;
    }
    report.receipt_checked = true;
    report.publisher = Some(identity.publisher);

    if via_watermark {
        report.status = Status::WatermarkFallback;
        return report;
    }

    // Content integrity: a whole-object match authenticates outright.
    let object_match = container
        .facsimile_info
        .records
        .iter()
        .any(|t| t.facsimile.object_digest == object_digest);
    if object_match {
        report.status = Status::Authenticated;
        return report;
    }
    match failing_chunks(&bytes, &container) {
        Some(failing) if failing.is_empty() => {
            report.status = Status::Authenticated;
        }
        Some(failing) => {
            report.status = Status::Tampered;
            report.failing_chunks = failing;
        }
        None => {
            report.status = Status::Unverified;
        }
    }
    report
}
