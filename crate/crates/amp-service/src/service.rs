//! In-process service state: a ledger and a manifest database behind locks,
//! with every registration flowing through the ledger before the database.

use std::sync::RwLock;

use amp_core::{compute_manifest_id, ManifestContainer, TypedDigest};
use amp_db::ManifestDb;
use amp_ledger::{Ledger, Receipt};
use amp_pki::keys::verify_raw;
use amp_pki::verify::certificate_public_key;
use amp_pki::{verify_chain, EkuPurpose, KeyHandle, TrustPolicy};

use crate::{Result, ServiceError};

pub struct AmpService {
    ledger: RwLock<Ledger>,
    db: RwLock<ManifestDb>,
    client_policy: TrustPolicy,
}

impl AmpService {
    /// `policy` governs manifest attestation (leaf must carry
    /// ManifestSigning); client authentication reuses the same roots and
    /// clock but demands ClientAuth.
    pub fn new(service_key: KeyHandle, policy: TrustPolicy) -> Self {
        let public = service_key.public_sec1_bytes();
        let client_policy = TrustPolicy {
            trusted_roots: policy.trusted_roots.clone(),
            required_eku: EkuPurpose::ClientAuth,
            clock: policy.clock,
        };
        AmpService {
            ledger: RwLock::new(Ledger::new(service_key, policy.clone())),
            db: RwLock::new(ManifestDb::new(policy, public)),
            client_policy,
        }
    }

    pub fn service_public_key(&self) -> Vec<u8> {
        self.ledger.read().expect("ledger lock").service_public_key()
    }

    /// Authenticate a mutating request: the chain must verify with the
    /// ClientAuth purpose and the leaf key must have signed the body.
    pub fn verify_client(&self, body: &[u8], chain: &[String], signature: &[u8]) -> Result<()> {
        verify_chain(chain, &self.client_policy)
            .map_err(|e| ServiceError::Unauthorized(e.to_string()))?;
        let leaf = chain.last().expect("non-empty after verify_chain");
        let key = certificate_public_key(leaf)?;
        verify_raw(&key, body, signature)
            .map_err(|_| ServiceError::Unauthorized("bad request signature".into()))
    }

    /// Register a manifest: ledger append, receipt issuance, then database
    /// ingest. When the caller already holds a receipt (a manifest
    /// registered earlier), only the ingest runs.
    pub fn register(
        &self,
        container: &ManifestContainer,
        copyright: &str,
        registration_signature: &[u8],
        prior_receipt: Option<Receipt>,
    ) -> Result<(TypedDigest, Receipt)> {
        let manifest_id = compute_manifest_id(&container.core_manifest)?;
        let receipt = match prior_receipt {
            Some(receipt) => receipt,
            None => {
                let chain = container
                    .publisher_attestation
                    .as_ref()
                    .and_then(|a| a.pem_encoded_certificates.clone())
                    .ok_or_else(|| {
                        ServiceError::InvalidArgument(
                            "container carries no certificate chain".into(),
                        )
                    })?;
                let mut ledger = self.ledger.write().expect("ledger lock");
                let index = ledger
                    .append_registration(&manifest_id, copyright, registration_signature, &chain)
                    .map_err(|e| ServiceError::stage("ledger-append", e))?;
                if ledger.latest_root().map_or(true, |r| r.tree_size <= index) {
                    ledger
                        .sign_root()
                        .map_err(|e| ServiceError::stage("root-signing", e))?;
                }
                ledger
                    .issue_receipt(index)
                    .map_err(|e| ServiceError::stage("receipt-issuance", e))?
            }
        };
        self.db
            .write()
            .expect("db lock")
            .ingest(container.clone(), receipt.clone())
            .map_err(|e| ServiceError::stage("db-ingest", e))?;
        Ok((manifest_id, receipt))
    }

    /// Audit view: the stored container plus its revocation flag.
    pub fn manifest(&self, id: &TypedDigest) -> Option<(ManifestContainer, bool)> {
        self.db
            .read()
            .expect("db lock")
            .get(id)
            .map(|r| (r.container.clone(), r.revoked))
    }

    pub fn receipt(&self, id: &TypedDigest) -> Option<Receipt> {
        self.db
            .read()
            .expect("db lock")
            .get(id)
            .map(|r| r.receipt.clone())
    }

    pub fn query_media_id(&self, media_id: &[u8]) -> Vec<TypedDigest> {
        self.db
            .read()
            .expect("db lock")
            .query_media_id(media_id, amp_db::Ordering::LedgerIndex)
            .into_iter()
            .map(|r| r.manifest_id.clone())
            .collect()
    }

    pub fn query_object_digest(&self, digest: &[u8]) -> Vec<TypedDigest> {
        self.db
            .read()
            .expect("db lock")
            .query_object_digest(digest)
            .into_iter()
            .map(|h| h.record.manifest_id.clone())
            .collect()
    }

    pub fn query_chunk_digests(&self, digests: &[Vec<u8>]) -> Vec<TypedDigest> {
        self.db
            .read()
            .expect("db lock")
            .query_chunk_digest(digests)
            .into_iter()
            .map(|h| h.record.manifest_id.clone())
            .collect()
    }

    /// Revoke a registered manifest: ledger revocation entry, fresh root,
    /// then a database soft-delete backed by the revocation receipt.
    pub fn revoke(
        &self,
        manifest_id: &TypedDigest,
        revoker_signature: &[u8],
        chain: &[String],
    ) -> Result<(u64, Receipt)> {
        let evidence = {
            let mut ledger = self.ledger.write().expect("ledger lock");
            let index = ledger
                .append_revocation(manifest_id, revoker_signature, chain)
                .map_err(|e| ServiceError::stage("ledger-revocation", e))?;
            if ledger.latest_root().map_or(true, |r| r.tree_size <= index) {
                ledger
                    .sign_root()
                    .map_err(|e| ServiceError::stage("root-signing", e))?;
            }
            (index, ledger.issue_receipt(index)?)
        };
        self.db
            .write()
            .expect("db lock")
            .apply_revocation(manifest_id, &evidence.1)
            .map_err(|e| ServiceError::stage("db-revocation", e))?;
        Ok(evidence)
    }
}
