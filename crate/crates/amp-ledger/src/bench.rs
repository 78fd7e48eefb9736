//! Single-node ingest benchmark: sustained registrations per second against
//! an in-memory ledger, with roots signed on the normal cadence.
//!
//! Signature verification stays on the timed path; client threads verify in
//! parallel under a read lock and serialize only the append itself.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use amp_core::digest::sha256;
use amp_core::types::{FacsimileDescriptor, FacsimileMajorType};
use amp_core::{build_manifest, compute_manifest_id, ManifestContainer, Timestamp};
use amp_core::{PublisherInfo, TypedDigest, WorkInfo};
use amp_pki::{
    generate_test_pki, EkuPurpose, KeyHandle, NodeSpec, PkiSpec, TrustPolicy,
};

use crate::entry::LedgerEntry;
use crate::ledger::{Ledger, Receipt};
use crate::{LedgerError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestReport {
    pub tx_per_sec: f64,
    pub mean_latency_ms: f64,
    pub entries: u64,
}

impl IngestReport {
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "tx_per_sec": self.tx_per_sec,
            "mean_latency_ms": self.mean_latency_ms,
            "entries": self.entries,
        })
        .to_string()
    }
}

/// Benchmark output plus enough material to audit it afterwards.
pub struct BenchRun {
    pub report: IngestReport,
    /// Manifest/receipt pairs sampled across the run, for offline
    /// re-verification.
    pub samples: Vec<(ManifestContainer, Receipt)>,
    pub service_public_key: Vec<u8>,
}

struct Request {
    container: ManifestContainer,
    manifest_id: TypedDigest,
    copyright: String,
    signature: Vec<u8>,
}

const POOL_SIZE: usize = 64;
const COPYRIGHT: &str = "Copyright (c) CompanyName Corporation. All rights reserved.";

fn request_pool(chain: &amp_pki::TrustChain) -> Result<Vec<Request>> {
    (0..POOL_SIZE)
        .map(|i| {
            let facsimile = FacsimileDescriptor {
                major_type: FacsimileMajorType::Video,
                container_type: "MP4".into(),
                encoding_information: "h264".into(),
                encoding_information2: None,
                length: 8,
                object_digest: sha256(&(i as u64).to_be_bytes()),
                facsimile_locator: None,
                object_containers: None,
                additional_claims: None,
                chunk_data: None,
            };
            let container = build_manifest(
                PublisherInfo::named("bench-publisher"),
                WorkInfo::titled(&format!("bench-work-{i}")),
                vec![facsimile],
                None,
            )?;
            let manifest_id = compute_manifest_id(&container.core_manifest)?;
            let signature = chain
                .leaf_key
                .sign_raw(&LedgerEntry::signed_message(&manifest_id, COPYRIGHT));
            Ok(Request {
                container,
                manifest_id,
                copyright: COPYRIGHT.into(),
                signature,
            })
        })
        .collect()
}

pub fn benchmark_ingest(clients: usize, duration: Duration) -> Result<BenchRun> {
    if clients == 0 {
        return Err(LedgerError::InvalidArgument("need at least one client".into()));
    }
    let pki = generate_test_pki(&PkiSpec {
        root_name: "bench-root".into(),
        organizations: vec![NodeSpec::leaf(
            "bench-publisher",
            &[EkuPurpose::ManifestSigning],
        )],
    })?;
    let chain = pki.chain_for("bench-publisher")?;
    let policy = TrustPolicy::new(pki.root_pem(), EkuPurpose::ManifestSigning, Timestamp::now());
    let service_key = KeyHandle::generate();
    let ledger = Ledger::new(service_key, policy);
    let service_public_key = ledger.service_public_key();
    let pool = request_pool(&chain)?;
    let chain_pems = chain.certificates.clone();

    let ledger = Arc::new(RwLock::new(ledger));
    let pool = Arc::new(pool);
    let next = Arc::new(AtomicUsize::new(0));
    let started = Instant::now();
    let deadline = started + duration;

    let workers: Vec<_> = (0..clients)
        .map(|_| {
            let ledger = Arc::clone(&ledger);
            let pool = Arc::clone(&pool);
            let next = Arc::clone(&next);
            let chain_pems = chain_pems.clone();
            std::thread::spawn(move || -> Result<(u64, Duration)> {
                let mut count = 0u64;
                let mut busy = Duration::ZERO;
                while Instant::now() < deadline {
                    let request = &pool[next.fetch_add(1, Ordering::Relaxed) % POOL_SIZE];
                    let t0 = Instant::now();
                    let prepared = ledger.read().expect("ledger lock").verify_registration(
                        &request.manifest_id,
                        &request.copyright,
                        &request.signature,
                        &chain_pems,
                    )?;
                    ledger
                        .write()
                        .expect("ledger lock")
                        .append_prepared(prepared)?;
                    busy += t0.elapsed();
                    count += 1;
                }
                Ok((count, busy))
            })
        })
        .collect();

    let mut entries = 0u64;
    let mut busy = Duration::ZERO;
    for worker in workers {
        let (count, spent) = worker.join().expect("worker panicked")?;
        entries += count;
        busy += spent;
    }
    let elapsed = started.elapsed();

    let mut ledger = Arc::try_unwrap(ledger)
        .unwrap_or_else(|_| panic!("workers still hold the ledger"))
        .into_inner()
        .expect("ledger lock");
    ledger.sign_root()?;
    let mut samples = Vec::new();
    if entries > 0 {
        for i in 0..10u64 {
            let index = i * (entries - 1) / 9;
            let receipt = ledger.issue_receipt(index)?;
            let container = pool
                .iter()
                .find(|r| r.manifest_id == receipt.entry.manifest_id)
                .expect("every entry came from the pool")
                .container
                .clone();
            samples.push((container, receipt));
        }
    }
    let report = IngestReport {
        tx_per_sec: entries as f64 / elapsed.as_secs_f64(),
        mean_latency_ms: if entries == 0 {
            0.0
        } else {
            busy.as_secs_f64() * 1000.0 / entries as f64
        },
        entries,
    };
    Ok(BenchRun {
        report,
        samples,
        service_public_key,
    })
}
