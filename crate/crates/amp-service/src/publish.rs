//! The publishing pipeline: media id assignment, optional audio
//! watermarking, chunk authentication, manifest construction and signing,
//! ledger registration, and sidecar emission.

use std::fs;
use std::path::{Path, PathBuf};

use amp_chunking::{default_encoded_row, merkle_authenticator, merkle_build, chunk_simple, DEFAULT_CHUNK_SIZE};
use amp_core::digest::sha256;
use amp_core::{
    build_manifest_at, compute_manifest_id, encode_canonical_cbor, encode_canonical_json,
    ChunkAuthenticator, DerivationSort, FacsimileDescriptor, FacsimileMajorType,
    ManifestContainer, ManifestReference, PublisherInfo, SourceWork, SourceWorkInfo, Timestamp,
    TypedDigest, WorkInfo, MANIFEST_VERSION,
};
use amp_ledger::{LedgerEntry, Receipt};
use amp_mp4::{extract_iso_chunks, inject_evidence, parse_boxes};
use amp_pki::{sign_manifest, TrustChain};
use amp_watermark::{build_payload, embed_pcm, read_wav_mono16, write_wav_mono16, EmbedParams};
use rand::RngCore;

use crate::client::Registrar;
use crate::{Result, ServiceError};

#[derive(Debug, Clone)]
pub struct PublishOptions {
    pub publisher: String,
    pub title: String,
    pub copyright: String,
    /// Byte size for file-offset chunking of non-fMP4 media.
    pub chunk_size: u64,
    /// Merkle row encoded into fMP4 manifests; `None` picks the default
    /// for the leaf count.
    pub encoded_row: Option<i64>,
    /// Manifest id of the original work; sets an origin back-pointer with
    /// a Transcoded derivation.
    pub origin: Option<TypedDigest>,
    /// Publisher-assigned MediaID; `None` draws 16 random bytes.
    pub media_id: Option<Vec<u8>>,
    /// Master-copy locator; when set, WAV inputs are watermarked with the
    /// MediaID before digesting.
    pub watermark_locator: Option<String>,
}

impl Default for PublishOptions {
    fn default() -> Self {
        PublishOptions {
            publisher: "publisher".into(),
            title: "untitled".into(),
            copyright: "all rights reserved".into(),
            chunk_size: DEFAULT_CHUNK_SIZE,
            encoded_row: None,
            origin: None,
            media_id: None,
            watermark_locator: None,
        }
    }
}

#[derive(Debug)]
pub struct PublishOutcome {
    pub container: ManifestContainer,
    pub manifest_id: TypedDigest,
    pub receipt: Receipt,
    /// Canonical CBOR sidecar next to the first media file.
    pub manifest_path: PathBuf,
    pub receipt_path: PathBuf,
    /// fMP4 copy with per-fragment evidence boxes injected, when produced.
    pub injected_paths: Vec<PathBuf>,
    /// Watermarked WAV copies, when produced.
    pub watermarked_paths: Vec<PathBuf>,
    pub media_id: Vec<u8>,
}

fn major_type_for(path: &Path) -> (FacsimileMajorType, String) {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_uppercase();
    let major = match ext.as_str() {
        "MP4" | "M4V" => FacsimileMajorType::MuxedAv,
        "WAV" | "MP3" | "FLAC" => FacsimileMajorType::Audio,
        "JPG" | "JPEG" | "PNG" | "GIF" => FacsimileMajorType::Image,
        "TXT" | "HTML" => FacsimileMajorType::Text,
        _ => FacsimileMajorType::Unknown,
    };
    (major, ext)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

fn is_fmp4(bytes: &[u8]) -> bool {
    parse_boxes(bytes)
        .map(|tree| tree.iter().any(|b| &b.box_type == b"moof"))
        .unwrap_or(false)
}

/// Publish media files under one manifest: watermark (optional), chunk,
/// build, sign, register, ingest, and write sidecars. Each stage failure
/// aborts with a stage-tagged error.
pub fn publish_flow(
    media_paths: &[PathBuf],
    chain: &TrustChain,
    options: &PublishOptions,
    registrar: &dyn Registrar,
) -> Result<PublishOutcome> {
    if media_paths.is_empty() {
        return Err(ServiceError::InvalidArgument("no media files given".into()));
    }
    let media_id = options.media_id.clone().unwrap_or_else(|| {
        let mut id = vec![0u8; 16];
        rand::thread_rng().fill_bytes(&mut id);
        id
    });

    let mut facsimiles = Vec::new();
    let mut injected_paths = Vec::new();
    let mut watermarked_paths = Vec::new();
    // fMP4 trees kept for evidence injection after the manifest id is known.
    let mut pending_injection = Vec::new();

    for path in media_paths {
        let mut bytes =
            fs::read(path).map_err(|e| ServiceError::stage("media-read", format!("{path:?}: {e}")))?;
        let (major_type, ext) = major_type_for(path);

        if ext == "WAV" {
            if let Some(locator) = &options.watermark_locator {
                let (rate, samples) = read_wav_mono16(path)
                    .map_err(|e| ServiceError::stage("watermark", e))?;
                let (_payload, bits) = build_payload(&media_id, locator, chain)
                    .map_err(|e| ServiceError::stage("watermark", e))?;
                let marked = embed_pcm(&samples, &bits, &EmbedParams::default())
                    .map_err(|e| ServiceError::stage("watermark", e))?;
                let marked_path = sidecar(path, ".marked.wav");
                write_wav_mono16(&marked_path, rate, &marked)
                    .map_err(|e| ServiceError::stage("watermark", e))?;
                bytes = fs::read(&marked_path)?;
                watermarked_paths.push(marked_path);
            }
        }

        let authenticator = if is_fmp4(&bytes) {
            let tree = parse_boxes(&bytes).map_err(|e| ServiceError::stage("chunking", e))?;
            let (_chunks, iso_auth) = extract_iso_chunks(&tree, &bytes, "sha256")
                .map_err(|e| ServiceError::stage("chunking", e))?;
            let merkle = merkle_build(&iso_auth.chunk_digests, "sha256")
                .map_err(|e| ServiceError::stage("chunking", e))?;
            let row = options
                .encoded_row
                .unwrap_or_else(|| default_encoded_row(merkle.num_chunks()));
            let auth = merkle_authenticator(&merkle, row)
                .map_err(|e| ServiceError::stage("chunking", e))?;
            pending_injection.push((path.clone(), bytes.clone(), merkle, row));
            ChunkAuthenticator::MerkleTree(auth)
        } else {
            let auth = chunk_simple(&bytes[..], options.chunk_size, "sha256")
                .map_err(|e| ServiceError::stage("chunking", e))?;
            ChunkAuthenticator::Simple(auth)
        };

        facsimiles.push(FacsimileDescriptor {
            major_type,
            container_type: ext,
            encoding_information: "unspecified".into(),
            encoding_information2: None,
            length: bytes.len() as u64,
            object_digest: sha256(&bytes),
            facsimile_locator: path
                .file_name()
                .and_then(|n| n.to_str())
                .map(str::to_owned),
            object_containers: None,
            additional_claims: None,
            chunk_data: Some(vec![authenticator]),
        });
    }

    let origins = options.origin.as_ref().map(|origin_id| SourceWorkInfo {
        origin_manifests: vec![SourceWork {
            origin_manifest: ManifestReference {
                version: MANIFEST_VERSION,
                manifest_locator: None,
                manifest_id: origin_id.clone(),
            },
            derivation_type: DerivationSort::Transcoded,
            additional_claims: None,
        }],
    });

    let mut container = build_manifest_at(
        PublisherInfo::named(&options.publisher),
        WorkInfo::titled(&options.title),
        facsimiles,
        origins,
        Timestamp::now(),
        Some(media_id.clone()),
    )
    .map_err(|e| ServiceError::stage("manifest-build", e))?;

    container.publisher_attestation = Some(
        sign_manifest(&container.core_manifest, chain)
            .map_err(|e| ServiceError::stage("signing", e))?,
    );

    let manifest_id = compute_manifest_id(&container.core_manifest)?;
    let registration_signature = chain
        .leaf_key
        .sign_raw(&LedgerEntry::signed_message(&manifest_id, &options.copyright));
    let (registered_id, receipt) = registrar
        .register(&container, &options.copyright, &registration_signature)
        .map_err(|e| ServiceError::stage("registration", e))?;
    if registered_id != manifest_id {
        return Err(ServiceError::stage(
            "registration",
            "service returned a different manifest id",
        ));
    }

    for (path, bytes, merkle, row) in pending_injection {
        let injected =
            inject_evidence(&bytes, &merkle, row, 1).map_err(|e| ServiceError::stage("injection", e))?;
        let injected_path = sidecar(&path, ".amp.mp4");
        fs::write(&injected_path, injected)?;
        injected_paths.push(injected_path);
    }

    let manifest_path = sidecar(&media_paths[0], ".amp.cbor");
    fs::write(&manifest_path, encode_canonical_cbor(&container)?)?;
    fs::write(
        sidecar(&media_paths[0], ".amp.json"),
        encode_canonical_json(&container)?,
    )?;
    let receipt_path = sidecar(&media_paths[0], ".amp.receipt.cbor");
    fs::write(&receipt_path, encode_canonical_cbor(&receipt)?)?;

    Ok(PublishOutcome {
        container,
        manifest_id,
        receipt,
        manifest_path,
        receipt_path,
        injected_paths,
        watermarked_paths,
        media_id,
    })
}
