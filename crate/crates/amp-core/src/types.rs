//! Manifest data structures and their canonical encodings.

use crate::codec::{bytes_from, bytes_value, require, time_from, time_value, Codec, Encodable};
use crate::digest::{self, TypedDigest};
use crate::error::{CoreError, Result};
use crate::time::Timestamp;
use crate::value::Value;

pub const MANIFEST_VERSION: i64 = 1;

impl Encodable for TypedDigest {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("DigestAlgorithm", Value::Text(self.algorithm.clone()))
            .field("DigestValue", bytes_value(codec, &self.value))
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let d = TypedDigest {
            algorithm: require(v, "DigestAlgorithm")?.as_text()?.to_owned(),
            value: bytes_from(require(v, "DigestValue")?, codec, "DigestValue")?,
        };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtherClaims {
    /// DNS-style namespace type descriptor, e.g. "com.example.amp.extra".
    pub claim_sort: String,
    pub embedded_claims: Option<String>,
    pub external_claims: Option<String>,
    pub external_claims_digest: Option<Vec<u8>>,
}

impl OtherClaims {
    pub fn validate(&self) -> Result<()> {
        if self.embedded_claims.is_none() && self.external_claims.is_none() {
            return Err(CoreError::bad_field(
                "OtherClaims",
                "at least one of EmbeddedClaims/ExternalClaims required",
            ));
        }
        if self.external_claims_digest.is_some() && self.external_claims.is_none() {
            return Err(CoreError::bad_field(
                "ExternalClaimsDigest",
                "present without ExternalClaims",
            ));
        }
        Ok(())
    }
}

impl Encodable for OtherClaims {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("ClaimSort", Value::Text(self.claim_sort.clone()))
            .opt(
                "EmbeddedClaims",
                self.embedded_claims.clone().map(Value::Text),
            )
            .opt(
                "ExternalClaims",
                self.external_claims.clone().map(Value::Text),
            )
            .opt(
                "ExternalClaimsDigest",
                self.external_claims_digest
                    .as_deref()
                    .map(|b| bytes_value(codec, b)),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let c = OtherClaims {
            claim_sort: require(v, "ClaimSort")?.as_text()?.to_owned(),
            embedded_claims: v
                .get("EmbeddedClaims")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            external_claims: v
                .get("ExternalClaims")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            external_claims_digest: v
                .get("ExternalClaimsDigest")
                .map(|x| bytes_from(x, codec, "ExternalClaimsDigest"))
                .transpose()?,
        };
        c.validate()?;
        Ok(c)
    }
}

fn claims_value(codec: Codec, claims: &Option<Vec<OtherClaims>>) -> Result<Option<Value>> {
    claims
        .as_ref()
        .map(|cs| {
            Ok(Value::Array(
                cs.iter().map(|c| c.to_value(codec)).collect::<Result<_>>()?,
            ))
        })
        .transpose()
}

fn claims_from(v: Option<&Value>, codec: Codec) -> Result<Option<Vec<OtherClaims>>> {
    v.map(|arr| {
        arr.as_array()?
            .iter()
            .map(|c| OtherClaims::from_value(c, codec))
            .collect()
    })
    .transpose()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublisherInfo {
    pub name: String,
    pub other_info: Option<String>,
    pub additional_claims: Option<Vec<OtherClaims>>,
}

impl PublisherInfo {
    pub fn named(name: &str) -> Self {
        PublisherInfo {
            name: name.to_owned(),
            other_info: None,
            additional_claims: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(CoreError::bad_field("Name", "publisher name empty"));
        }
        for c in self.additional_claims.iter().flatten() {
            c.validate()?;
        }
        Ok(())
    }
}

impl Encodable for PublisherInfo {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Name", Value::Text(self.name.clone()))
            .opt("OtherInfo", self.other_info.clone().map(Value::Text))
            .opt(
                "AdditionalClaims",
                claims_value(codec, &self.additional_claims)?,
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let p = PublisherInfo {
            name: require(v, "Name")?.as_text()?.to_owned(),
            other_info: v
                .get("OtherInfo")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            additional_claims: claims_from(v.get("AdditionalClaims"), codec)?,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkInfo {
    pub title: String,
    pub title2: Option<String>,
    pub other_info: Option<String>,
    pub copyright: Option<String>,
    pub master_copy_locator: Option<String>,
    pub creation_time: Option<Timestamp>,
    /// Duration of the work in 100 ns units.
    pub duration: Option<i64>,
    pub additional_claims: Option<Vec<OtherClaims>>,
}

impl WorkInfo {
    pub fn titled(title: &str) -> Self {
        WorkInfo {
            title: title.to_owned(),
            title2: None,
            other_info: None,
            copyright: None,
            master_copy_locator: None,
            creation_time: None,
            duration: None,
            additional_claims: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.title.is_empty() {
            return Err(CoreError::bad_field("Title", "work title empty"));
        }
        if let Some(d) = self.duration {
            if d < 0 {
                return Err(CoreError::bad_field("Duration", "negative"));
            }
        }
        for c in self.additional_claims.iter().flatten() {
            c.validate()?;
        }
        Ok(())
    }
}

impl Encodable for WorkInfo {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Title", Value::Text(self.title.clone()))
            .opt("Title2", self.title2.clone().map(Value::Text))
            .opt("OtherInfo", self.other_info.clone().map(Value::Text))
            .opt("Copyright", self.copyright.clone().map(Value::Text))
            .opt(
                "MasterCopyLocator",
                self.master_copy_locator.clone().map(Value::Text),
            )
            .opt(
                "CreationTime",
                self.creation_time.map(|t| time_value(codec, t)),
            )
            .opt("Duration", self.duration.map(Value::Int))
            .opt(
                "AdditionalClaims",
                claims_value(codec, &self.additional_claims)?,
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let w = WorkInfo {
            title: require(v, "Title")?.as_text()?.to_owned(),
            title2: v
                .get("Title2")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            other_info: v
                .get("OtherInfo")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            copyright: v
                .get("Copyright")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            master_copy_locator: v
                .get("MasterCopyLocator")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            creation_time: v
                .get("CreationTime")
                .map(|x| time_from(x, codec))
                .transpose()?,
            duration: v.get("Duration").map(|x| x.as_int()).transpose()?,
            additional_claims: claims_from(v.get("AdditionalClaims"), codec)?,
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivationSort {
    Transcoded = 1,
    CompleteCopy = 2,
    PartialCopy = 3,
    EditedCopy = 4,
}

impl DerivationSort {
    pub fn from_code(code: i64) -> Result<Self> {
        match code {
            1 => Ok(DerivationSort::Transcoded),
            2 => Ok(DerivationSort::CompleteCopy),
            3 => Ok(DerivationSort::PartialCopy),
            4 => Ok(DerivationSort::EditedCopy),
            other => Err(CoreError::bad_field(
                "DerivationType",
                format!("unknown code {other}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestReference {
    pub version: i64,
    pub manifest_locator: Option<String>,
    pub manifest_id: TypedDigest,
}

impl Encodable for ManifestReference {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Version", Value::Int(self.version))
            .opt(
                "ManifestLocator",
                self.manifest_locator.clone().map(Value::Text),
            )
            .field("ManifestID", self.manifest_id.to_value(codec)?)
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        Ok(ManifestReference {
            version: require(v, "Version")?.as_int()?,
            manifest_locator: v
                .get("ManifestLocator")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            manifest_id: TypedDigest::from_value(require(v, "ManifestID")?, codec)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceWork {
    pub origin_manifest: ManifestReference,
    pub derivation_type: DerivationSort,
    pub additional_claims: Option<Vec<OtherClaims>>,
}

impl Encodable for SourceWork {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("OriginManifest", self.origin_manifest.to_value(codec)?)
            .field("DerivationType", Value::Int(self.derivation_type as i64))
            .opt(
                "AdditionalClaims",
                claims_value(codec, &self.additional_claims)?,
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        Ok(SourceWork {
            origin_manifest: ManifestReference::from_value(require(v, "OriginManifest")?, codec)?,
            derivation_type: DerivationSort::from_code(require(v, "DerivationType")?.as_int()?)?,
            additional_claims: claims_from(v.get("AdditionalClaims"), codec)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceWorkInfo {
    pub origin_manifests: Vec<SourceWork>,
}

impl SourceWorkInfo {
    pub fn validate(&self) -> Result<()> {
        if self.origin_manifests.is_empty() {
            return Err(CoreError::bad_field(
                "OriginManifests",
                "must be non-empty when present",
            ));
        }
        Ok(())
    }
}

impl Encodable for SourceWorkInfo {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field(
                "OriginManifests",
                Value::Array(
                    self.origin_manifests
                        .iter()
                        .map(|s| s.to_value(codec))
                        .collect::<Result<_>>()?,
                ),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let s = SourceWorkInfo {
            origin_manifests: require(v, "OriginManifests")?
                .as_array()?
                .iter()
                .map(|x| SourceWork::from_value(x, codec))
                .collect::<Result<_>>()?,
        };
        s.validate()?;
        Ok(s)
    }
}

// ---------------------------------------------------------------------------
// Chunk authenticators
// ---------------------------------------------------------------------------

pub const SCHEME_SIMPLE_CHUNK_LIST: i64 = 1;
pub const SCHEME_ISO_BOX: i64 = 2;
pub const SCHEME_MERKLE_TREE: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleChunkListAuthenticator {
    pub chunk_size: u64,
    pub num_chunks: u64,
    pub chunk_digests: Vec<Vec<u8>>,
}

impl SimpleChunkListAuthenticator {
    pub fn validate(&self) -> Result<()> {
        if self.chunk_digests.len() as u64 != self.num_chunks {
            return Err(CoreError::bad_field(
                "NumChunks",
                "does not match ChunkDigest length",
            ));
        }
        if let Some(first) = self.chunk_digests.first() {
            if self.chunk_digests.iter().any(|d| d.len() != first.len()) {
                return Err(CoreError::bad_field("ChunkDigest", "uneven digest sizes"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoBoxAuthenticator {
    pub num_chunks: u64,
    pub chunk_digests: Vec<Vec<u8>>,
}

impl IsoBoxAuthenticator {
    pub fn validate(&self) -> Result<()> {
        if self.chunk_digests.len() as u64 != self.num_chunks {
            return Err(CoreError::bad_field(
                "NumChunks",
                "does not match ChunkDigest length",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerkleTreeAuthenticator {
    /// Row of the hash tree encoded here: 0 is the root row, -1 the leaves.
    pub encoded_row: i64,
    /// Count of real (non-null) leaves.
    pub num_chunks: u64,
    /// Non-null hashes of the encoded row, left to right.
    pub chunk_digests: Vec<Vec<u8>>,
}

impl MerkleTreeAuthenticator {
    pub fn validate(&self) -> Result<()> {
        if self.num_chunks == 0 {
            return Err(CoreError::bad_field("NumChunks", "must be >= 1"));
        }
        if self.encoded_row < -1 {
            return Err(CoreError::bad_field("EncodedRow", "below -1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChunkAuthenticator {
    Simple(SimpleChunkListAuthenticator),
    IsoBox(IsoBoxAuthenticator),
    MerkleTree(MerkleTreeAuthenticator),
}

impl ChunkAuthenticator {
    pub fn validate(&self) -> Result<()> {
        match self {
            ChunkAuthenticator::Simple(a) => a.validate(),
            ChunkAuthenticator::IsoBox(a) => a.validate(),
            ChunkAuthenticator::MerkleTree(a) => a.validate(),
        }
    }

    pub fn chunk_digests(&self) -> &[Vec<u8>] {
        match self {
            ChunkAuthenticator::Simple(a) => &a.chunk_digests,
            ChunkAuthenticator::IsoBox(a) => &a.chunk_digests,
            ChunkAuthenticator::MerkleTree(a) => &a.chunk_digests,
        }
    }
}

fn digests_value(codec: Codec, digests: &[Vec<u8>]) -> Value {
    Value::Array(digests.iter().map(|d| bytes_value(codec, d)).collect())
}

fn digests_from(v: &Value, codec: Codec) -> Result<Vec<Vec<u8>>> {
    v.as_array()?
        .iter()
        .map(|x| bytes_from(x, codec, "ChunkDigest"))
        .collect()
}

impl Encodable for ChunkAuthenticator {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(match self {
            ChunkAuthenticator::Simple(a) => Value::map()
                .field("ChunkingScheme", Value::Int(SCHEME_SIMPLE_CHUNK_LIST))
                .field("ChunkSize", Value::Int(a.chunk_size as i64))
                .field("NumChunks", Value::Int(a.num_chunks as i64))
                .field("ChunkDigest", digests_value(codec, &a.chunk_digests))
                .build(),
            ChunkAuthenticator::IsoBox(a) => Value::map()
                .field("ChunkingScheme", Value::Int(SCHEME_ISO_BOX))
                .field("NumChunks", Value::Int(a.num_chunks as i64))
                .field("ChunkDigest", digests_value(codec, &a.chunk_digests))
                .build(),
            ChunkAuthenticator::MerkleTree(a) => Value::map()
                .field("ChunkingScheme", Value::Int(SCHEME_MERKLE_TREE))
                .field("EncodedRow", Value::Int(a.encoded_row))
                .field("NumChunks", Value::Int(a.num_chunks as i64))
                .field("ChunkDigest", digests_value(codec, &a.chunk_digests))
                .build(),
        })
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let auth = match require(v, "ChunkingScheme")?.as_int()? {
            SCHEME_SIMPLE_CHUNK_LIST => ChunkAuthenticator::Simple(SimpleChunkListAuthenticator {
                chunk_size: require(v, "ChunkSize")?.as_int()? as u64,
                num_chunks: require(v, "NumChunks")?.as_int()? as u64,
                chunk_digests: digests_from(require(v, "ChunkDigest")?, codec)?,
            }),
            SCHEME_ISO_BOX => ChunkAuthenticator::IsoBox(IsoBoxAuthenticator {
                num_chunks: require(v, "NumChunks")?.as_int()? as u64,
                chunk_digests: digests_from(require(v, "ChunkDigest")?, codec)?,
            }),
            SCHEME_MERKLE_TREE => ChunkAuthenticator::MerkleTree(MerkleTreeAuthenticator {
                encoded_row: require(v, "EncodedRow")?.as_int()?,
                num_chunks: require(v, "NumChunks")?.as_int()? as u64,
                chunk_digests: digests_from(require(v, "ChunkDigest")?, codec)?,
            }),
            other => {
                return Err(CoreError::bad_field(
                    "ChunkingScheme",
                    format!("unknown scheme {other}"),
                ))
            }
        };
        auth.validate()?;
        Ok(auth)
    }
}

// ---------------------------------------------------------------------------
// Facsimiles
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacsimileMajorType {
    Unknown = 0,
    MuxedAv = 1,
    Video = 2,
    Audio = 3,
    Image = 4,
    Text = 5,
}

impl FacsimileMajorType {
    pub fn from_code(code: i64) -> Result<Self> {
        match code {
            0 => Ok(FacsimileMajorType::Unknown),
            1 => Ok(FacsimileMajorType::MuxedAv),
            2 => Ok(FacsimileMajorType::Video),
            3 => Ok(FacsimileMajorType::Audio),
            4 => Ok(FacsimileMajorType::Image),
            5 => Ok(FacsimileMajorType::Text),
            other => Err(CoreError::bad_field(
                "FacsimileMajorType",
                format!("unknown code {other}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacsimileDescriptor {
    pub major_type: FacsimileMajorType,
    /// Container format, e.g. "JPG", "MP4".
    pub container_type: String,
    pub encoding_information: String,
    pub encoding_information2: Option<String>,
    /// Total byte count of the facsimile.
    pub length: u64,
    /// Digest of the entire facsimile under the manifest digest algorithm.
    pub object_digest: Vec<u8>,
    pub facsimile_locator: Option<String>,
    /// Carried opaquely; marked placeholder upstream.
    pub object_containers: Option<String>,
    pub additional_claims: Option<Vec<OtherClaims>>,
    pub chunk_data: Option<Vec<ChunkAuthenticator>>,
}

impl FacsimileDescriptor {
    pub fn validate(&self) -> Result<()> {
        for c in self.additional_claims.iter().flatten() {
            c.validate()?;
        }
        for a in self.chunk_data.iter().flatten() {
            a.validate()?;
        }
        Ok(())
    }
}

impl Encodable for FacsimileDescriptor {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("FacsimileMajorType", Value::Int(self.major_type as i64))
            .field("ContainerType", Value::Text(self.container_type.clone()))
            .field(
                "EncodingInformation",
                Value::Text(self.encoding_information.clone()),
            )
            .opt(
                "EncodingInformation2",
                self.encoding_information2.clone().map(Value::Text),
            )
            .field("Length", Value::Int(self.length as i64))
            .field("ObjectDigest", bytes_value(codec, &self.object_digest))
            .opt(
                "FacsimileLocator",
                self.facsimile_locator.clone().map(Value::Text),
            )
            .opt(
                "ObjectContainers",
                self.object_containers.clone().map(Value::Text),
            )
            .opt(
                "AdditionalClaims",
                claims_value(codec, &self.additional_claims)?,
            )
            .opt(
                "ChunkData",
                self.chunk_data
                    .as_ref()
                    .map(|cd| {
                        Ok::<_, CoreError>(Value::Array(
                            cd.iter()
                                .map(|a| a.to_value(codec))
                                .collect::<Result<_>>()?,
                        ))
                    })
                    .transpose()?,
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let f = FacsimileDescriptor {
            major_type: FacsimileMajorType::from_code(
                require(v, "FacsimileMajorType")?.as_int()?,
            )?,
            container_type: require(v, "ContainerType")?.as_text()?.to_owned(),
            encoding_information: require(v, "EncodingInformation")?.as_text()?.to_owned(),
            encoding_information2: v
                .get("EncodingInformation2")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            length: require(v, "Length")?.as_int()? as u64,
            object_digest: bytes_from(require(v, "ObjectDigest")?, codec, "ObjectDigest")?,
            facsimile_locator: v
                .get("FacsimileLocator")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            object_containers: v
                .get("ObjectContainers")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            additional_claims: claims_from(v.get("AdditionalClaims"), codec)?,
            chunk_data: v
                .get("ChunkData")
                .map(|arr| {
                    arr.as_array()?
                        .iter()
                        .map(|x| ChunkAuthenticator::from_value(x, codec))
                        .collect()
                })
                .transpose()?,
        };
        f.validate()?;
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedFacsimileDescriptor {
    /// Zero-based index into ManifestCore.FacsimileInfoDigests.
    pub index: u32,
    pub facsimile: FacsimileDescriptor,
}

impl Encodable for TaggedFacsimileDescriptor {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Index", Value::Int(self.index as i64))
            .field("Facsimile", self.facsimile.to_value(codec)?)
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let index = require(v, "Index")?.as_int()?;
        if !(0..=u32::MAX as i64).contains(&index) {
            return Err(CoreError::bad_field("Index", "out of range"));
        }
        Ok(TaggedFacsimileDescriptor {
            index: index as u32,
            facsimile: FacsimileDescriptor::from_value(require(v, "Facsimile")?, codec)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacsimileInformation {
    pub version: i64,
    pub records: Vec<TaggedFacsimileDescriptor>,
}

impl Encodable for FacsimileInformation {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Version", Value::Int(self.version))
            .field(
                "Records",
                Value::Array(
                    self.records
                        .iter()
                        .map(|r| r.to_value(codec))
                        .collect::<Result<_>>()?,
                ),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        Ok(FacsimileInformation {
            version: require(v, "Version")?.as_int()?,
            records: require(v, "Records")?
                .as_array()?
                .iter()
                .map(|x| TaggedFacsimileDescriptor::from_value(x, codec))
                .collect::<Result<_>>()?,
        })
    }
}

// ---------------------------------------------------------------------------
// Core manifest and container
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestCore {
    pub version: i64,
    /// Statistically unique serial; at least 16 bytes.
    pub serial_number: Vec<u8>,
    /// Algorithm used by every digest in this manifest.
    pub digest_algorithm: String,
    pub media_id: Vec<u8>,
    pub creation_time: Timestamp,
    pub publisher: PublisherInfo,
    pub work: WorkInfo,
    /// Digests of the canonical CBOR encodings of each FacsimileDescriptor.
    pub facsimile_info_digests: Vec<Vec<u8>>,
    pub origin_manifests: Option<SourceWorkInfo>,
}

impl ManifestCore {
    pub fn validate(&self) -> Result<()> {
        if self.version != MANIFEST_VERSION {
            return Err(CoreError::bad_field("Version", "must be 1"));
        }
        if self.serial_number.len() < 16 {
            return Err(CoreError::bad_field("SerialNumber", "shorter than 16 bytes"));
        }
        let dlen = digest::output_len(&self.digest_algorithm)?;
        if self.facsimile_info_digests.is_empty() {
            return Err(CoreError::bad_field(
                "FacsimileInfoDigests",
                "must be non-empty",
            ));
        }
        if self.facsimile_info_digests.iter().any(|d| d.len() != dlen) {
            return Err(CoreError::bad_field(
                "FacsimileInfoDigests",
                "digest length does not match DigestAlgorithm",
            ));
        }
        self.publisher.validate()?;
        self.work.validate()?;
        if let Some(o) = &self.origin_manifests {
            o.validate()?;
        }
        Ok(())
    }
}

impl Encodable for ManifestCore {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Version", Value::Int(self.version))
            .field("SerialNumber", bytes_value(codec, &self.serial_number))
            .field(
                "DigestAlgorithm",
                Value::Text(self.digest_algorithm.clone()),
            )
            .field("MediaID", bytes_value(codec, &self.media_id))
            .field("CreationTime", time_value(codec, self.creation_time))
            .field("Publisher", self.publisher.to_value(codec)?)
            .field("Work", self.work.to_value(codec)?)
            .field(
                "FacsimileInfoDigests",
                digests_value(codec, &self.facsimile_info_digests),
            )
            .opt(
                "OriginManifests",
                self.origin_manifests
                    .as_ref()
                    .map(|o| o.to_value(codec))
                    .transpose()?,
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let core = ManifestCore {
            version: require(v, "Version")?.as_int()?,
            serial_number: bytes_from(require(v, "SerialNumber")?, codec, "SerialNumber")?,
            digest_algorithm: require(v, "DigestAlgorithm")?.as_text()?.to_owned(),
            media_id: bytes_from(require(v, "MediaID")?, codec, "MediaID")?,
            creation_time: time_from(require(v, "CreationTime")?, codec)?,
            publisher: PublisherInfo::from_value(require(v, "Publisher")?, codec)?,
            work: WorkInfo::from_value(require(v, "Work")?, codec)?,
            facsimile_info_digests: digests_from(require(v, "FacsimileInfoDigests")?, codec)?,
            origin_manifests: v
                .get("OriginManifests")
                .map(|x| SourceWorkInfo::from_value(x, codec))
                .transpose()?,
        };
        core.validate()?;
        Ok(core)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PublisherAttestation {
    pub cose_signature_token: Option<Vec<u8>>,
    pub json_web_token: Option<String>,
    /// Certificate chain ordered from the self-signed root to the leaf.
    pub pem_encoded_certificates: Option<Vec<String>>,
}

impl PublisherAttestation {
    pub fn validate(&self) -> Result<()> {
        if self.cose_signature_token.is_none() && self.json_web_token.is_none() {
            return Err(CoreError::bad_field(
                "PublisherAttestation",
                "no signature token present",
            ));
        }
        Ok(())
    }
}

impl Encodable for PublisherAttestation {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .opt(
                "CoseSignatureToken",
                self.cose_signature_token
                    .as_deref()
                    .map(|b| bytes_value(codec, b)),
            )
            .opt(
                "JsonWebToken",
                self.json_web_token.clone().map(Value::Text),
            )
            .opt(
                "PemEncodedCertificates",
                self.pem_encoded_certificates.as_ref().map(|certs| {
                    Value::Array(certs.iter().cloned().map(Value::Text).collect())
                }),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        let a = PublisherAttestation {
            cose_signature_token: v
                .get("CoseSignatureToken")
                .map(|x| bytes_from(x, codec, "CoseSignatureToken"))
                .transpose()?,
            json_web_token: v
                .get("JsonWebToken")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
            pem_encoded_certificates: v
                .get("PemEncodedCertificates")
                .map(|arr| {
                    arr.as_array()?
                        .iter()
                        .map(|x| x.as_text().map(str::to_owned))
                        .collect()
                })
                .transpose()?,
        };
        a.validate()?;
        Ok(a)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LedgerAttestation {
    /// Serialized Receipt issued by the provenance ledger.
    pub ledger_attestation_value: Option<String>,
}

impl Encodable for LedgerAttestation {
    fn to_value(&self, _codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .opt(
                "LedgerAttestationValue",
                self.ledger_attestation_value.clone().map(Value::Text),
            )
            .build())
    }

    fn from_value(v: &Value, _codec: Codec) -> Result<Self> {
        Ok(LedgerAttestation {
            ledger_attestation_value: v
                .get("LedgerAttestationValue")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestContainer {
    pub version: i64,
    pub core_manifest: ManifestCore,
    pub facsimile_info: FacsimileInformation,
    pub publisher_attestation: Option<PublisherAttestation>,
    pub ledger_attestation: Option<LedgerAttestation>,
    pub manifest_locator: Option<String>,
}

impl Encodable for ManifestContainer {
    fn to_value(&self, codec: Codec) -> Result<Value> {
        Ok(Value::map()
            .field("Version", Value::Int(self.version))
            .field("CoreManifest", self.core_manifest.to_value(codec)?)
            .field("FacsimileInfo", self.facsimile_info.to_value(codec)?)
            .opt(
                "PublisherAttestation",
                self.publisher_attestation
                    .as_ref()
                    .map(|a| a.to_value(codec))
                    .transpose()?,
            )
            .opt(
                "LedgerAttestation",
                self.ledger_attestation
                    .as_ref()
                    .map(|a| a.to_value(codec))
                    .transpose()?,
            )
            .opt(
                "ManifestLocator",
                self.manifest_locator.clone().map(Value::Text),
            )
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> Result<Self> {
        Ok(ManifestContainer {
            version: require(v, "Version")?.as_int()?,
            core_manifest: ManifestCore::from_value(require(v, "CoreManifest")?, codec)?,
            facsimile_info: FacsimileInformation::from_value(require(v, "FacsimileInfo")?, codec)?,
            publisher_attestation: v
                .get("PublisherAttestation")
                .map(|x| PublisherAttestation::from_value(x, codec))
                .transpose()?,
            ledger_attestation: v
                .get("LedgerAttestation")
                .map(|x| LedgerAttestation::from_value(x, codec))
                .transpose()?,
            manifest_locator: v
                .get("ManifestLocator")
                .map(|x| x.as_text().map(str::to_owned))
                .transpose()?,
        })
    }
}
