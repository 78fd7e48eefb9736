//! The database proper: verification-gated ingest, four hash indexes, and
//! an append-only persistence journal.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use amp_core::value::Value;
use amp_core::{
    compute_manifest_id, require, ChunkAuthenticator, Codec, Encodable, ManifestContainer,
    Timestamp, TypedDigest,
};
use amp_ledger::offline::verify_receipt_structure;
use amp_ledger::{verify_receipt_offline, EntryKind, Receipt};
use amp_pki::{verify_publisher_attestation, TrustPolicy};

use crate::record::DbRecord;
use crate::{DbError, Result};

/// Which notion of "oldest" a MediaID query is ordered by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// Publisher-claimed CreationTime, ascending.
    CreationTime,
    /// Position in the ledger (entry index), ascending.
    LedgerIndex,
}

/// A record matched through an object digest, with the facsimile indices
/// that carried the digest.
#[derive(Debug, Clone)]
pub struct ObjectHit<'a> {
    pub record: &'a DbRecord,
    pub facsimile_indices: Vec<u32>,
}

/// A record matched through chunk digests, mapping each queried digest to
/// the chunk indices where it appears.
#[derive(Debug, Clone)]
pub struct ChunkHit<'a> {
    pub record: &'a DbRecord,
    pub chunk_indices: HashMap<Vec<u8>, Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DbStats {
    pub records: u64,
    pub media_id_entries: u64,
    pub object_digest_entries: u64,
    pub chunk_digest_entries: u64,
    pub manifest_id_entries: u64,
    /// Each index entry budgets 64 bytes: a 32-byte hash plus 32 bytes of
    /// bookkeeping.
    pub estimated_index_bytes: u64,
}

pub struct ManifestDb {
    records: Vec<DbRecord>,
    by_manifest_id: HashMap<Vec<u8>, usize>,
    by_media_id: HashMap<Vec<u8>, Vec<usize>>,
    by_object_digest: HashMap<Vec<u8>, Vec<usize>>,
    by_chunk_digest: HashMap<Vec<u8>, Vec<usize>>,
    policy: TrustPolicy,
    service_public_key: Vec<u8>,
    journal: Option<File>,
}

fn chunk_digests(auth: &ChunkAuthenticator) -> &[Vec<u8>] {
    match auth {
        ChunkAuthenticator::Simple(a) => &a.chunk_digests,
        ChunkAuthenticator::IsoBox(a) => &a.chunk_digests,
        ChunkAuthenticator::MerkleTree(a) => &a.chunk_digests,
    }
}

impl ManifestDb {
    pub fn new(policy: TrustPolicy, service_public_key: Vec<u8>) -> Self {
        ManifestDb {
            records: Vec::new(),
            by_manifest_id: HashMap::new(),
            by_media_id: HashMap::new(),
            by_object_digest: HashMap::new(),
            by_chunk_digest: HashMap::new(),
            policy,
            service_public_key,
            journal: None,
        }
    }

    /// Open (or create) a database backed by an append-only journal of
    /// length-prefixed canonical-CBOR events.
    pub fn open(
        path: &Path,
        policy: TrustPolicy,
        service_public_key: Vec<u8>,
    ) -> Result<Self> {
        let mut db = ManifestDb::new(policy, service_public_key);
        if path.exists() {
            let mut bytes = Vec::new();
            File::open(path)?.read_to_end(&mut bytes)?;
            let mut at = 0usize;
            while at < bytes.len() {
                if at + 4 > bytes.len() {
                    return Err(DbError::InvalidArgument(
                        "journal truncated inside a length prefix".into(),
                    ));
                }
                let len =
                    u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
                at += 4;
                if at + len > bytes.len() {
                    return Err(DbError::InvalidArgument(
                        "journal truncated inside an event".into(),
                    ));
                }
                db.replay(&bytes[at..at + len])?;
                at += len;
            }
        }
        db.journal = Some(OpenOptions::new().create(true).append(true).open(path)?);
        Ok(db)
    }

    fn replay(&mut self, event: &[u8]) -> Result<()> {
        let value = amp_core::value::decode_cbor(event).map_err(DbError::Core)?;
        match require(&value, "Event").map_err(DbError::Core)?.as_text()? {
            "Ingest" => {
                let record =
                    DbRecord::from_value(require(&value, "Record").map_err(DbError::Core)?, Codec::Cbor)?;
                self.insert(record);
            }
            "Revoke" => {
                let id = TypedDigest::from_value(
                    require(&value, "ManifestID").map_err(DbError::Core)?,
                    Codec::Cbor,
                )?;
                if let Some(&at) = self.by_manifest_id.get(&id.value) {
                    self.records[at].revoked = true;
                }
            }
            other => {
                return Err(DbError::InvalidArgument(format!(
                    "unknown journal event `{other}`"
                )))
            }
        }
        Ok(())
    }

    fn journal_event(&mut self, event: &Value) -> Result<()> {
        if let Some(journal) = &mut self.journal {
            let bytes = amp_core::value::encode_cbor(event);
            journal.write_all(&(bytes.len() as u32).to_be_bytes())?;
            journal.write_all(&bytes)?;
        }
        Ok(())
    }

    fn insert(&mut self, record: DbRecord) {
        let at = self.records.len();
        self.by_manifest_id
            .insert(record.manifest_id.value.clone(), at);
        self.by_media_id
            .entry(record.container.core_manifest.media_id.clone())
            .or_default()
            .push(at);
        for tagged in &record.container.facsimile_info.records {
            self.by_object_digest
                .entry(tagged.facsimile.object_digest.clone())
                .or_default()
                .push(at);
            for auth in tagged.facsimile.chunk_data.iter().flatten() {
                for digest in chunk_digests(auth) {
                    let slot = self.by_chunk_digest.entry(digest.clone()).or_default();
                    if slot.last() != Some(&at) {
                        slot.push(at);
                    }
                }
            }
        }
        self.records.push(record);
    }

    /// Admit a manifest: its receipt must verify offline against the
    /// service key and its publisher attestation against the trust policy.
    /// Re-ingesting a known manifest is a no-op.
    pub fn ingest(
        &mut self,
        container: ManifestContainer,
        receipt: Receipt,
    ) -> Result<TypedDigest> {
        let check = verify_receipt_offline(&container, &receipt, &self.service_public_key);
        if !check.is_valid() {
            return Err(DbError::BadReceipt(format!("{check:?}")));
        }
        verify_publisher_attestation(&container, &self.policy)?;
        let manifest_id = compute_manifest_id(&container.core_manifest)?;
        if self.by_manifest_id.contains_key(&manifest_id.value) {
            return Ok(manifest_id); // idempotent
        }
        let record = DbRecord {
            container,
            receipt,
            manifest_id: manifest_id.clone(),
            ingest_time: Timestamp::now(),
            revoked: false,
        };
        self.journal_event(
            &Value::map()
                .field("Event", Value::Text("Ingest".into()))
                .field("Record", record.to_value(Codec::Cbor)?)
                .build(),
        )?;
        self.insert(record);
        Ok(manifest_id)
    }

    /// Fetch by manifest id, revoked or not (the audit view).
    pub fn get(&self, manifest_id: &TypedDigest) -> Option<&DbRecord> {
        self.by_manifest_id
            .get(&manifest_id.value)
            .map(|&at| &self.records[at])
    }

    fn live(&self, slots: Option<&Vec<usize>>) -> Vec<&DbRecord> {
        slots
            .into_iter()
            .flatten()
            .map(|&at| &self.records[at])
            .filter(|r| !r.revoked)
            .collect()
    }

    /// All non-revoked records claiming a MediaID, oldest first.
    pub fn query_media_id(&self, media_id: &[u8], order: Ordering) -> Vec<&DbRecord> {
        let mut hits = self.live(self.by_media_id.get(media_id));
        match order {
            Ordering::CreationTime => hits.sort_by_key(|r| {
                (
                    r.container.core_manifest.creation_time.epoch_millis(),
                    r.receipt.entry.index,
                )
            }),
            Ordering::LedgerIndex => hits.sort_by_key(|r| r.receipt.entry.index),
        }
        hits
    }

    /// Exact match over every facsimile's ObjectDigest.
    pub fn query_object_digest(&self, digest: &[u8]) -> Vec<ObjectHit<'_>> {
        self.live(self.by_object_digest.get(digest))
            .into_iter()
            .map(|record| ObjectHit {
                facsimile_indices: record
                    .container
                    .facsimile_info
                    .records
                    .iter()
                    .filter(|t| t.facsimile.object_digest == digest)
                    .map(|t| t.index)
                    .collect(),
                record,
            })
            .collect()
    }

    /// Records whose authenticators contain *all* supplied chunk digests,
    /// with the chunk indices where each digest sits.
    pub fn query_chunk_digest(&self, digests: &[Vec<u8>]) -> Vec<ChunkHit<'_>> {
        let Some(first) = digests.first() else {
            return Vec::new();
        };
        self.live(self.by_chunk_digest.get(first))
            .into_iter()
            .filter_map(|record| {
                let mut chunk_indices: HashMap<Vec<u8>, Vec<u64>> = HashMap::new();
                for digest in digests {
                    let mut positions = Vec::new();
                    for tagged in &record.container.facsimile_info.records {
                        for auth in tagged.facsimile.chunk_data.iter().flatten() {
                            for (i, d) in chunk_digests(auth).iter().enumerate() {
                                if d == digest {
                                    positions.push(i as u64);
                                }
                            }
                        }
                    }
                    if positions.is_empty() {
                        return None; // this record lacks one of the digests
                    }
                    chunk_indices.insert(digest.clone(), positions);
                }
                Some(ChunkHit {
                    record,
                    chunk_indices,
                })
            })
            .collect()
    }

    /// Mark a manifest revoked given ledger evidence: a verified receipt for
    /// a Revocation entry naming the same manifest. Returns false when the
    /// manifest is unknown here. The record stays fetchable via [`Self::get`].
    pub fn apply_revocation(
        &mut self,
        manifest_id: &TypedDigest,
        ledger_evidence: &Receipt,
    ) -> Result<bool> {
        let check = verify_receipt_structure(ledger_evidence, &self.service_public_key);
        if !check.is_valid() {
            return Err(DbError::BadEvidence(format!("{check:?}")));
        }
        if ledger_evidence.entry.kind != EntryKind::Revocation
            || &ledger_evidence.entry.manifest_id != manifest_id
        {
            return Err(DbError::BadEvidence(
                "receipt is not a revocation of this manifest".into(),
            ));
        }
        let Some(&at) = self.by_manifest_id.get(&manifest_id.value) else {
            return Ok(false);
        };
        self.journal_event(
            &Value::map()
                .field("Event", Value::Text("Revoke".into()))
                .field("ManifestID", manifest_id.to_value(Codec::Cbor)?)
                .build(),
        )?;
        self.records[at].revoked = true;
        Ok(true)
    }

    pub fn stats(&self) -> DbStats {
        let media: u64 = self.by_media_id.values().map(|v| v.len() as u64).sum();
        let object: u64 = self.by_object_digest.values().map(|v| v.len() as u64).sum();
        let chunk: u64 = self.by_chunk_digest.values().map(|v| v.len() as u64).sum();
        let manifest = self.by_manifest_id.len() as u64;
        DbStats {
            records: self.records.len() as u64,
            media_id_entries: media,
            object_digest_entries: object,
            chunk_digest_entries: chunk,
            manifest_id_entries: manifest,
            estimated_index_bytes: (media + object + chunk + manifest) * 64,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
