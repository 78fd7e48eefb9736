//! The append-only ledger: registrations, revocations, governance records,
//! signed roots, receipts, and an append-only persistence journal.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use amp_core::codec::{bytes_from, bytes_value, require, time_from, time_value};
use amp_core::value::{encode_cbor, Value};
use amp_core::{
    decode_canonical_cbor, encode_canonical_cbor, Codec, CoreError, Encodable, Timestamp,
    TypedDigest,
};
use amp_pki::{certificate_public_key, verify_chain, KeyHandle, TrustPolicy};

use crate::entry::{entry_digest, EntryKind, LedgerEntry};
use crate::tree::{inclusion_path, merkle_root};
use crate::{LedgerError, Result};

/// Root signing cadence: a fresh signed root at least every this many
/// entries, or after this much wall time, whichever comes first.
pub const ROOT_CADENCE_ENTRIES: u64 = 1000;
pub const ROOT_CADENCE_TIME: Duration = Duration::from_secs(1);

/// Copyright string recorded on revocation entries; the revoker signs
/// `manifest_id ‖ this string`.
pub const REVOCATION_COPYRIGHT: &str = "revocation";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedTreeRoot {
    pub tree_size: u64,
    pub root_hash: Vec<u8>,
    pub service_signature: Vec<u8>,
    pub signing_time: Timestamp,
}

impl SignedTreeRoot {
    /// Canonical bytes the service signs: the root fields minus the signature.
    pub fn signed_message(tree_size: u64, root_hash: &[u8], signing_time: Timestamp) -> Vec<u8> {
        encode_cbor(
            &Value::map()
                .field("RootHash", Value::Bytes(root_hash.to_vec()))
                .field("SigningTime", Value::Int(signing_time.epoch_millis()))
                .field("TreeSize", Value::Int(tree_size as i64))
                .build(),
        )
    }
}

impl Encodable for SignedTreeRoot {
    fn to_value(&self, codec: Codec) -> std::result::Result<Value, CoreError> {
        Ok(Value::map()
            .field("TreeSize", Value::Int(self.tree_size as i64))
            .field("RootHash", bytes_value(codec, &self.root_hash))
            .field(
                "ServiceSignature",
                bytes_value(codec, &self.service_signature),
            )
            .field("SigningTime", time_value(codec, self.signing_time))
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> std::result::Result<Self, CoreError> {
        Ok(SignedTreeRoot {
            tree_size: require(v, "TreeSize")?.as_int()? as u64,
            root_hash: bytes_from(require(v, "RootHash")?, codec, "RootHash")?,
            service_signature: bytes_from(
                require(v, "ServiceSignature")?,
                codec,
                "ServiceSignature",
            )?,
            signing_time: time_from(require(v, "SigningTime")?, codec)?,
        })
    }
}

/// A self-contained inclusion proof. Carries the full entry (not just its
/// digest) so that offline verification can recompute the digest from the
/// manifest without contacting the service.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receipt {
    pub entry: LedgerEntry,
    pub entry_digest: Vec<u8>,
    pub inclusion_path: Vec<Vec<u8>>,
    pub signed_root: SignedTreeRoot,
}

impl Receipt {
    pub fn entry_index(&self) -> u64 {
        self.entry.index
    }
}

impl Encodable for Receipt {
    fn to_value(&self, codec: Codec) -> std::result::Result<Value, CoreError> {
        Ok(Value::map()
            .field("Entry", self.entry.to_value(codec)?)
            .field("EntryDigest", bytes_value(codec, &self.entry_digest))
            .field(
                "InclusionPath",
                Value::Array(
                    self.inclusion_path
                        .iter()
                        .map(|h| bytes_value(codec, h))
                        .collect(),
                ),
            )
            .field("SignedRoot", self.signed_root.to_value(codec)?)
            .build())
    }

    fn from_value(v: &Value, codec: Codec) -> std::result::Result<Self, CoreError> {
        Ok(Receipt {
            entry: LedgerEntry::from_value(require(v, "Entry")?, codec)?,
            entry_digest: bytes_from(require(v, "EntryDigest")?, codec, "EntryDigest")?,
            inclusion_path: require(v, "InclusionPath")?
                .as_array()?
                .iter()
                .map(|h| bytes_from(h, codec, "InclusionPath"))
                .collect::<std::result::Result<_, _>>()?,
            signed_root: SignedTreeRoot::from_value(require(v, "SignedRoot")?, codec)?,
        })
    }
}

pub struct Ledger {
    entries: Vec<LedgerEntry>,
    digests: Vec<Vec<u8>>,
    algorithm: String,
    service_key: KeyHandle,
    policy: TrustPolicy,
    latest_root: Option<SignedTreeRoot>,
    journal: Option<File>,
    size_at_last_sign: u64,
    last_sign: Instant,
    /// Chains already validated against the policy: key is the concatenated
    /// PEM text, value is (organization, leaf public key). Re-presenting a
    /// known chain skips re-walking its certificate signatures.
    chain_cache: Mutex<HashMap<String, (String, Vec<u8>)>>,
}

impl Ledger {
    pub fn new(service_key: KeyHandle, policy: TrustPolicy) -> Self {
        Ledger {
            entries: Vec::new(),
            digests: Vec::new(),
            algorithm: "sha256".into(),
            service_key,
            policy,
            latest_root: None,
            journal: None,
            size_at_last_sign: 0,
            last_sign: Instant::now(),
            chain_cache: Mutex::new(HashMap::new()),
        }
    }

    /// Open (or create) a ledger backed by an append-only journal file of
    /// length-prefixed canonical-CBOR entries.
    pub fn open(path: &Path, service_key: KeyHandle, policy: TrustPolicy) -> Result<Self> {
        let mut ledger = Ledger::new(service_key, policy);
        if path.exists() {
            let mut bytes = Vec::new();
            File::open(path)?.read_to_end(&mut bytes)?;
            let mut at = 0usize;
            while at < bytes.len() {
                if at + 4 > bytes.len() {
                    return Err(LedgerError::InvalidArgument(
                        "journal truncated inside a length prefix".into(),
                    ));
                }
                let len =
                    u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
                at += 4;
                if at + len > bytes.len() {
                    return Err(LedgerError::InvalidArgument(
                        "journal truncated inside an entry".into(),
                    ));
                }
                let entry: LedgerEntry = decode_canonical_cbor(&bytes[at..at + len])?;
                at += len;
                if entry.index != ledger.entries.len() as u64 {
                    return Err(LedgerError::InvalidArgument(format!(
                        "journal entry index {} out of sequence",
                        entry.index
                    )));
                }
                ledger
                    .digests
                    .push(entry_digest(&entry, &ledger.algorithm)?);
                ledger.entries.push(entry);
            }
        }
        ledger.journal = Some(OpenOptions::new().create(true).append(true).open(path)?);
        Ok(ledger)
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, index: u64) -> Option<&LedgerEntry> {
        self.entries.get(index as usize)
    }

    pub fn service_public_key(&self) -> Vec<u8> {
        self.service_key.public_sec1_bytes()
    }

    pub fn latest_root(&self) -> Option<&SignedTreeRoot> {
        self.latest_root.as_ref()
    }

    fn authenticate_chain(&self, chain: &[String]) -> Result<(String, Vec<u8>)> {
        let cache_key = chain.concat();
        if let Some(hit) = self.chain_cache.lock().expect("cache lock").get(&cache_key) {
            return Ok(hit.clone());
        }
        let identity = verify_chain(chain, &self.policy)?;
        // The organization is the first authority under the root; in a
        // two-level hierarchy the leaf is its own organization.
        let organization = identity
            .chain_subjects
            .get(1)
            .unwrap_or(&identity.publisher)
            .clone();
        let leaf_key =
            certificate_public_key(chain.last().expect("verify_chain rejects empty chains"))?;
        let resolved = (organization, leaf_key);
        self.chain_cache
            .lock()
            .expect("cache lock")
            .insert(cache_key, resolved.clone());
        Ok(resolved)
    }

    /// Check a registration request without mutating the log: chain trust,
    /// purpose, and the publisher signature over `manifest_id ‖ copyright`.
    /// The returned entry still needs [`Ledger::append_prepared`].
    pub fn verify_registration(
        &self,
        manifest_id: &TypedDigest,
        copyright: &str,
        publisher_signature: &[u8],
        chain: &[String],
    ) -> Result<LedgerEntry> {
        let (organization, leaf_key) = self.authenticate_chain(chain)?;
        let message = LedgerEntry::signed_message(manifest_id, copyright);
        amp_pki::keys::verify_raw(&leaf_key, &message, publisher_signature)
            .map_err(|_| LedgerError::BadSignature)?;
        Ok(LedgerEntry {
            index: 0, // assigned at append
            kind: EntryKind::Registration,
            manifest_id: manifest_id.clone(),
            copyright: copyright.to_owned(),
            publisher_signature: publisher_signature.to_vec(),
            organization,
            timestamp: Timestamp::now(),
        })
    }

    /// Place a verified entry at the next index, journal it, and extend the
    /// Merkle log. Signs a fresh root when the cadence is due.
    pub fn append_prepared(&mut self, mut entry: LedgerEntry) -> Result<u64> {
        entry.index = self.entries.len() as u64;
        let digest = entry_digest(&entry, &self.algorithm)?;
        if let Some(journal) = &mut self.journal {
            let bytes = encode_canonical_cbor(&entry)?;
            journal.write_all(&(bytes.len() as u32).to_be_bytes())?;
            journal.write_all(&bytes)?;
        }
        self.digests.push(digest);
        self.entries.push(entry);
        let due = self.len() - self.size_at_last_sign >= ROOT_CADENCE_ENTRIES
            || self.last_sign.elapsed() >= ROOT_CADENCE_TIME;
        if due {
            self.sign_root()?;
        }
        Ok(self.len() - 1)
    }

    pub fn append_registration(
        &mut self,
        manifest_id: &TypedDigest,
        copyright: &str,
        publisher_signature: &[u8],
        chain: &[String],
    ) -> Result<u64> {
        let entry =
            self.verify_registration(manifest_id, copyright, publisher_signature, chain)?;
        self.append_prepared(entry)
    }

    /// Append a revocation for an already-registered manifest. The revoker
    /// must chain through the same organization that registered it and sign
    /// `manifest_id ‖ "revocation"`. The registration entry itself is never
    /// removed.
    pub fn append_revocation(
        &mut self,
        manifest_id: &TypedDigest,
        revoker_signature: &[u8],
        chain: &[String],
    ) -> Result<u64> {
        let (organization, leaf_key) = self.authenticate_chain(chain)?;
        let registered = self
            .entries
            .iter()
            .rev()
            .find(|e| e.kind == EntryKind::Registration && &e.manifest_id == manifest_id)
            .ok_or(LedgerError::UnknownManifest)?;
        if registered.organization != organization {
            return Err(LedgerError::Unauthorized(organization));
        }
        let message = LedgerEntry::signed_message(manifest_id, REVOCATION_COPYRIGHT);
        amp_pki::keys::verify_raw(&leaf_key, &message, revoker_signature)
            .map_err(|_| LedgerError::BadSignature)?;
        self.append_prepared(LedgerEntry {
            index: 0,
            kind: EntryKind::Revocation,
            manifest_id: manifest_id.clone(),
            copyright: REVOCATION_COPYRIGHT.into(),
            publisher_signature: revoker_signature.to_vec(),
            organization,
            timestamp: Timestamp::now(),
        })
    }

    /// Record a governance action (member add/remove and similar), attested
    /// by the service key itself.
    pub fn append_governance(&mut self, action: &str) -> Result<u64> {
        let manifest_id = TypedDigest::compute(&self.algorithm, action.as_bytes())?;
        let signature = self
            .service_key
            .sign_raw(&LedgerEntry::signed_message(&manifest_id, action));
        self.append_prepared(LedgerEntry {
            index: 0,
            kind: EntryKind::Governance,
            manifest_id,
            copyright: action.to_owned(),
            publisher_signature: signature,
            organization: "service".into(),
            timestamp: Timestamp::now(),
        })
    }

    /// Is a Revocation entry present for this manifest id?
    pub fn is_revoked(&self, manifest_id: &TypedDigest) -> bool {
        self.entries
            .iter()
            .any(|e| e.kind == EntryKind::Revocation && &e.manifest_id == manifest_id)
    }

    pub fn sign_root(&mut self) -> Result<SignedTreeRoot> {
        if self.digests.is_empty() {
            return Err(LedgerError::EmptyLedger);
        }
        let tree_size = self.len();
        let root_hash = merkle_root(&self.digests, &self.algorithm)?;
        let signing_time = Timestamp::now();
        let service_signature = self.service_key.sign_raw(&SignedTreeRoot::signed_message(
            tree_size,
            &root_hash,
            signing_time,
        ));
        let root = SignedTreeRoot {
            tree_size,
            root_hash,
            service_signature,
            signing_time,
        };
        self.latest_root = Some(root.clone());
        self.size_at_last_sign = tree_size;
        self.last_sign = Instant::now();
        Ok(root)
    }

    /// Inclusion proof for an entry under the latest signed root.
    pub fn issue_receipt(&self, index: u64) -> Result<Receipt> {
        let root = self.latest_root.as_ref().ok_or(LedgerError::EmptyLedger)?;
        if index >= root.tree_size {
            return Err(LedgerError::NotYetSigned {
                index,
                signed: root.tree_size,
            });
        }
        let covered = &self.digests[..root.tree_size as usize];
        Ok(Receipt {
            entry: self.entries[index as usize].clone(),
            entry_digest: self.digests[index as usize].clone(),
            inclusion_path: inclusion_path(covered, index, &self.algorithm)?,
            signed_root: root.clone(),
        })
    }
}
