//! Manifest identity, container validation, and authoring.

use rand::RngCore;

use crate::codec::encode_canonical_cbor;
use crate::digest::{self, TypedDigest};
use crate::error::{CoreError, Result};
use crate::time::Timestamp;
use crate::types::{
    FacsimileDescriptor, FacsimileInformation, ManifestContainer, ManifestCore, PublisherInfo,
    SourceWorkInfo, TaggedFacsimileDescriptor, WorkInfo, MANIFEST_VERSION,
};

/// The ManifestID is the digest of the canonical CBOR encoding of the core;
/// the JSON encoding is a projection and never feeds the ID.
pub fn compute_manifest_id(core: &ManifestCore) -> Result<TypedDigest> {
    let bytes = encode_canonical_cbor(core)?;
    TypedDigest::compute(&core.digest_algorithm, &bytes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// Digest of Records\[i\].Facsimile does not match FacsimileInfoDigests\[Index\].
    FacsimileDigestMismatch { index: u32 },
    /// Record Index exceeds the FacsimileInfoDigests bounds.
    IndexOutOfRange { index: u32 },
    DuplicateIndex { index: u32 },
    Structural { message: String },
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
    /// Per-record digest check outcome, in Records order.
    pub facsimile_checks: Vec<(u32, bool)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }
}

pub fn validate_container(container: &ManifestContainer) -> ValidationReport {
    let mut report = ValidationReport::default();
    if let Err(e) = container.core_manifest.validate() {
        report.issues.push(ValidationIssue::Structural {
            message: e.to_string(),
        });
        return report;
    }
    let core = &container.core_manifest;
    let mut seen = std::collections::HashSet::new();
    for record in &container.facsimile_info.records {
        let index = record.index;
        if !seen.insert(index) {
            report.issues.push(ValidationIssue::DuplicateIndex { index });
            continue;
        }
        if index as usize >= core.facsimile_info_digests.len() {
            report.issues.push(ValidationIssue::IndexOutOfRange { index });
            continue;
        }
        if let Err(e) = record.facsimile.validate() {
            report.issues.push(ValidationIssue::Structural {
                message: e.to_string(),
            });
            continue;
        }
        let matches = match encode_canonical_cbor(&record.facsimile)
            .and_then(|bytes| digest::digest(&core.digest_algorithm, &bytes))
        {
            Ok(d) => d == core.facsimile_info_digests[index as usize],
            Err(_) => false,
        };
        report.facsimile_checks.push((index, matches));
        if !matches {
            report
                .issues
                .push(ValidationIssue::FacsimileDigestMismatch { index });
        }
    }
    report
}

/// Assemble a fresh unsigned ManifestContainer over the given facsimiles.
pub fn build_manifest(
    publisher: PublisherInfo,
    work: WorkInfo,
    facsimiles: Vec<FacsimileDescriptor>,
    origins: Option<SourceWorkInfo>,
) -> Result<ManifestContainer> {
    build_manifest_at(publisher, work, facsimiles, origins, Timestamp::now(), None)
}

/// As [`build_manifest`] but with explicit creation time and MediaID, for
/// reproducible fixtures and publisher-assigned IDs.
pub fn build_manifest_at(
    publisher: PublisherInfo,
    work: WorkInfo,
    facsimiles: Vec<FacsimileDescriptor>,
    origins: Option<SourceWorkInfo>,
    creation_time: Timestamp,
    media_id: Option<Vec<u8>>,
) -> Result<ManifestContainer> {
    if facsimiles.is_empty() {
        return Err(CoreError::InvalidArgument(
            "at least one facsimile required".into(),
        ));
    }
    publisher.validate()?;
    work.validate()?;

    let algorithm = digest::SHA256;
    let mut facsimile_info_digests = Vec::with_capacity(facsimiles.len());
    let mut records = Vec::with_capacity(facsimiles.len());
    for (i, facsimile) in facsimiles.into_iter().enumerate() {
        facsimile.validate()?;
        let bytes = encode_canonical_cbor(&facsimile)?;
        facsimile_info_digests.push(digest::digest(algorithm, &bytes)?);
        records.push(TaggedFacsimileDescriptor {
            index: i as u32,
            facsimile,
        });
    }

    let mut serial_number = vec![0u8; 16];
    rand::thread_rng().fill_bytes(&mut serial_number);
    let media_id = media_id.unwrap_or_else(|| {
        let mut id = vec![0u8; 16];
        rand::thread_rng().fill_bytes(&mut id);
        id
    });

    let core = ManifestCore {
        version: MANIFEST_VERSION,
        serial_number,
        digest_algorithm: algorithm.to_owned(),
        media_id,
        creation_time,
        publisher,
        work,
        facsimile_info_digests,
        origin_manifests: origins,
    };
    core.validate()?;

    Ok(ManifestContainer {
        version: MANIFEST_VERSION,
        core_manifest: core,
        facsimile_info: FacsimileInformation {
            version: MANIFEST_VERSION,
            records,
        },
        publisher_attestation: None,
        ledger_attestation: None,
        manifest_locator: None,
    })
}

/// File extension for canonical CBOR containers.
pub const CBOR_EXTENSION: &str = "amp.cbor";
/// File extension for JCS JSON containers.
pub const JSON_EXTENSION: &str = "amp.json";
