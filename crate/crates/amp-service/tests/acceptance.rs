//! End-to-end acceptance suite across the whole workspace. Each test covers
//! one numbered criterion and prints a `criterion N: pass` line on success
//! (visible with `--nocapture`).

use std::fs;
use std::sync::Arc;
use std::time::{Duration, Instant};

use amp_chunking::{merkle_authenticator, merkle_build, merkle_evidence, merkle_verify};
use amp_core::digest::sha256;
use amp_core::{
    build_manifest, build_manifest_at, compute_manifest_id, decode_canonical_cbor,
    decode_canonical_json, encode_canonical_cbor, encode_canonical_json, ChunkAuthenticator,
    DerivationSort, FacsimileDescriptor, FacsimileMajorType, IsoBoxAuthenticator,
    ManifestContainer, ManifestReference, MerkleTreeAuthenticator, OtherClaims, PublisherInfo,
    SimpleChunkListAuthenticator, SourceWork, SourceWorkInfo, Timestamp, TypedDigest, WorkInfo,
    MANIFEST_VERSION,
};
use amp_ledger::{
    benchmark_ingest, run_replicated, verify_receipt_offline, Ledger, LedgerEntry, Receipt,
    ReplicaHarness,
};
use amp_mp4::{
    decode_chunk_integrity_box, encode_chunk_integrity_box, extract_iso_chunks, generate_fmp4,
    parse_boxes, ChunkIntegrityBox, CIB_EXTENDED_TYPE,
};
use amp_pki::{
    generate_test_pki, sign_manifest, verify_chain, EkuPurpose, KeyHandle, NodeSpec, PkiError,
    PkiSpec, TestPki, TrustChain, TrustPolicy,
};
use amp_service::{playback_verify_flow, publish_flow, AmpService, PublishOptions, Status};
use amp_watermark::{
    build_payload, embed_pcm, extract_pcm, multi_sine, verify_payload, watermark_energy_ratio_db,
    EmbedParams,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Shared fixtures

fn leaves(n: usize) -> Vec<Vec<u8>> {
    (0..n).map(|i| sha256(&(i as u64).to_be_bytes())).collect()
}

fn publisher_pki() -> (TestPki, TrustChain, TrustPolicy) {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "acceptance root".into(),
        organizations: vec![NodeSpec::authority(
            "newsroom",
            vec![NodeSpec::leaf(
                "newsroom publisher",
                &[
                    EkuPurpose::ManifestSigning,
                    EkuPurpose::LedgerRegistration,
                    EkuPurpose::ClientAuth,
                ],
            )],
        )],
    })
    .expect("pki");
    let chain = pki.chain_for("newsroom publisher").expect("chain");
    let policy = TrustPolicy::new(
        pki.root_pem(),
        EkuPurpose::ManifestSigning,
        Timestamp::now(),
    );
    (pki, chain, policy)
}

// Seeded container generator so the 1000-sample suite is reproducible.

const TEXT_CHARS: &[char] = &[
    'a', 'b', 'c', 'x', 'y', 'z', 'A', 'M', 'P', '0', '7', '9', ' ', '-', '_', '/', '"', '\\',
    '\n', '\t', 'é', '中',
];

fn rand_text(rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(1..=24);
    (0..len)
        .map(|_| TEXT_CHARS[rng.gen_range(0..TEXT_CHARS.len())])
        .collect()
}

fn rand_bytes(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    out
}

fn rand_digests(rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let n = rng.gen_range(1..5);
    (0..n).map(|_| rand_bytes(rng, 32)).collect()
}

fn rand_authenticator(rng: &mut ChaCha8Rng) -> ChunkAuthenticator {
    match rng.gen_range(0..3) {
        0 => {
            let digests = rand_digests(rng);
            ChunkAuthenticator::Simple(SimpleChunkListAuthenticator {
                chunk_size: rng.gen_range(1..=1u64 << 20),
                num_chunks: digests.len() as u64,
                chunk_digests: digests,
            })
        }
        1 => {
            let digests = rand_digests(rng);
            ChunkAuthenticator::IsoBox(IsoBoxAuthenticator {
                num_chunks: digests.len() as u64,
                chunk_digests: digests,
            })
        }
        _ => {
            let digests = rand_digests(rng);
            ChunkAuthenticator::MerkleTree(MerkleTreeAuthenticator {
                encoded_row: rng.gen_range(-1..4),
                num_chunks: digests.len() as u64,
                chunk_digests: digests,
            })
        }
    }
}

fn rand_claims(rng: &mut ChaCha8Rng) -> Option<Vec<OtherClaims>> {
    if rng.gen_bool(0.5) {
        return None;
    }
    let n = rng.gen_range(1..3);
    Some(
        (0..n)
            .map(|_| {
                let external = rng.gen_bool(0.5);
                OtherClaims {
                    claim_sort: rand_text(rng),
                    embedded_claims: Some(rand_text(rng)),
                    external_claims: external.then(|| "https://x/claims".into()),
                    external_claims_digest: external.then(|| rand_bytes(rng, 16)),
                }
            })
            .collect(),
    )
}

fn rand_facsimile(rng: &mut ChaCha8Rng) -> FacsimileDescriptor {
    let chunk_data = if rng.gen_bool(0.7) {
        let n = rng.gen_range(1..3);
        Some((0..n).map(|_| rand_authenticator(rng)).collect())
    } else {
        None
    };
    FacsimileDescriptor {
        major_type: FacsimileMajorType::from_code(rng.gen_range(0..6)).unwrap(),
        container_type: rand_text(rng),
        encoding_information: rand_text(rng),
        encoding_information2: rng.gen_bool(0.3).then(|| rand_text(rng)),
        length: rng.gen::<u32>() as u64,
        object_digest: rand_bytes(rng, 32),
        facsimile_locator: rng.gen_bool(0.5).then(|| rand_text(rng)),
        object_containers: None,
        additional_claims: rand_claims(rng),
        chunk_data,
    }
}

fn rand_container(rng: &mut ChaCha8Rng) -> ManifestContainer {
    let facsimiles = {
        let n = rng.gen_range(1..4);
        (0..n).map(|_| rand_facsimile(rng)).collect()
    };
    let work = WorkInfo {
        title: rand_text(rng),
        title2: rng.gen_bool(0.3).then(|| rand_text(rng)),
        other_info: None,
        copyright: rng.gen_bool(0.5).then(|| rand_text(rng)),
        master_copy_locator: rng.gen_bool(0.5).then(|| rand_text(rng)),
        creation_time: rng
            .gen_bool(0.5)
            .then(|| Timestamp::from_epoch_millis(rng.gen_range(0..4_000_000_000_000))),
        duration: rng.gen_bool(0.5).then(|| rng.gen_range(0..1 << 52)),
        additional_claims: None,
    };
    let origins = rng.gen_bool(0.4).then(|| SourceWorkInfo {
        origin_manifests: vec![SourceWork {
            origin_manifest: ManifestReference {
                version: MANIFEST_VERSION,
                manifest_locator: None,
                manifest_id: TypedDigest {
                    algorithm: "sha256".into(),
                    value: rand_bytes(rng, 32),
                },
            },
            derivation_type: DerivationSort::Transcoded,
            additional_claims: None,
        }],
    });
    let publisher = rand_text(rng);
    build_manifest_at(
        PublisherInfo::named(&publisher),
        work,
        facsimiles,
        origins,
        Timestamp::from_epoch_millis(rng.gen_range(0..4_000_000_000_000)),
        Some(rand_bytes(rng, 16)),
    )
    .expect("container builds")
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_manifest_round_trip_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut failures = 0usize;
    for _ in 0..1000 {
        let container = rand_container(&mut rng);
        let id = compute_manifest_id(&container.core_manifest).unwrap();

        let json = encode_canonical_json(&container).unwrap();
        let from_json: ManifestContainer = decode_canonical_json(&json).unwrap();
        let cbor = encode_canonical_cbor(&container).unwrap();
        let from_cbor: ManifestContainer = decode_canonical_cbor(&cbor).unwrap();

        let intact = from_json == container
            && from_cbor == container
            && encode_canonical_json(&from_json).unwrap() == json
            && encode_canonical_cbor(&from_cbor).unwrap() == cbor
            && compute_manifest_id(&from_json.core_manifest).unwrap() == id
            && compute_manifest_id(&from_cbor.core_manifest).unwrap() == id;
        if !intact {
            failures += 1;
        }
    }
    assert_eq!(failures, 0);
    assert!(
        started.elapsed() < Duration::from_secs(10),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 1 (manifest round-trip suite, 1000 containers): pass");
}

#[test]
fn criterion_02_merkle_oracle_equivalence() {
    let started = Instant::now();
    let mut violations = 0usize;

    // Completeness: every size, every valid encoded row, every leaf.
    for n in 1..=64usize {
        let ls = leaves(n);
        let tree = merkle_build(&ls, "sha256").unwrap();
        let top = tree.depth() as i64 - 1;
        for encoded_row in -1..=top {
            let auth = merkle_authenticator(&tree, encoded_row).unwrap();
            for (leaf_index, leaf) in ls.iter().enumerate() {
                let ev = merkle_evidence(&tree, leaf_index as u64, encoded_row).unwrap();
                if !merkle_verify(leaf, &ev, &auth, "sha256") {
                    violations += 1;
                }
            }
        }
    }

    // Soundness: all 64 cross-leaf replays on the 8-leaf fixture.
    let ls = leaves(8);
    let tree = merkle_build(&ls, "sha256").unwrap();
    let auth = merkle_authenticator(&tree, 1).unwrap();
    for i in 0..8u64 {
        let ev = merkle_evidence(&tree, i, 1).unwrap();
        for j in 0..8usize {
            let ok = merkle_verify(&ls[j], &ev, &auth, "sha256");
            if (i == j as u64) != ok {
                violations += 1;
            }
        }
    }

    assert_eq!(violations, 0);
    assert!(
        started.elapsed() < Duration::from_secs(30),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 2 (exhaustive Merkle oracle, 0 violations): pass");
}

#[test]
fn criterion_03_worked_example_reproduced() {
    // Five chunks pad to eight leaves: depth 4 including the leaf row.
    let tree = merkle_build(&leaves(5), "sha256").unwrap();
    assert_eq!(tree.depth(), 4);

    // Eight leaves, leaf 0, encoded row 1: the evidence is exactly the
    // sibling leaf and the row-1 neighbor of leaf 0's ancestor.
    let ls = leaves(8);
    let tree = merkle_build(&ls, "sha256").unwrap();
    let ev = merkle_evidence(&tree, 0, 1).unwrap();
    assert_eq!(
        ev.hashes,
        vec![
            tree.node(0, 1).unwrap().to_vec(),
            tree.node(1, 1).unwrap().to_vec(),
        ]
    );
    println!("criterion 3 (worked tree example, depth 4 and leaf-0 evidence): pass");
}

#[test]
fn criterion_04_chunk_integrity_box_golden_bytes() {
    // Two 32-byte hashes: 8 + 16 + 4 + 1 + 2 + 1 + 1 + 64 = 97 bytes.
    let golden = ChunkIntegrityBox {
        hash_tree_id: 1,
        hash_location: 0,
        hash_size: 32,
        hashes: vec![vec![0xAA; 32], vec![0xBB; 32]],
    };
    let bytes = encode_chunk_integrity_box(&golden).unwrap();
    assert_eq!(bytes.len(), 97);
    assert_eq!(bytes.len(), golden.total_size());
    assert_eq!(&bytes[8..24], &CIB_EXTENDED_TYPE);
    assert_eq!(decode_chunk_integrity_box(&bytes).unwrap(), golden);

    // decode ∘ encode is the identity over 10^4 random boxes.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1B);
    for _ in 0..10_000 {
        let hash_size = *[16u8, 20, 32, 64].get(rng.gen_range(0..4)).unwrap();
        let count = rng.gen_range(0..8);
        let cib = ChunkIntegrityBox {
            hash_tree_id: rng.gen(),
            hash_location: rng.gen(),
            hash_size,
            hashes: (0..count)
                .map(|_| rand_bytes(&mut rng, hash_size as usize))
                .collect(),
        };
        let bytes = encode_chunk_integrity_box(&cib).unwrap();
        assert_eq!(bytes.len(), cib.total_size());
        assert_eq!(decode_chunk_integrity_box(&bytes).unwrap(), cib);
    }
    println!("criterion 4 (chunk integrity box golden bytes + 10^4 round-trips): pass");
}

fn simple_container(i: usize) -> ManifestContainer {
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
    build_manifest(
        PublisherInfo::named("Newsroom"),
        WorkInfo::titled(&format!("work {i}")),
        vec![facsimile],
        None,
    )
    .unwrap()
}

#[test]
fn criterion_05_receipt_suite_with_bit_mutations() {
    let (_pki, chain, policy) = publisher_pki();
    let mut ledger = Ledger::new(KeyHandle::generate(), policy);
    let service_key = ledger.service_public_key();
    const COPYRIGHT: &str = "all rights reserved";

    let containers: Vec<ManifestContainer> = (0..100).map(simple_container).collect();
    for container in &containers {
        let id = compute_manifest_id(&container.core_manifest).unwrap();
        let signature = chain
            .leaf_key
            .sign_raw(&LedgerEntry::signed_message(&id, COPYRIGHT));
        ledger
            .append_registration(&id, COPYRIGHT, &signature, &chain.certificates)
            .unwrap();
    }
    ledger.sign_root().unwrap();

    let mut mutation_escapes = 0usize;
    for (i, container) in containers.iter().enumerate() {
        let receipt = ledger.issue_receipt(i as u64).unwrap();
        // The genuine receipt verifies with no service contact.
        assert!(
            verify_receipt_offline(container, &receipt, &service_key).is_valid(),
            "receipt {i} must verify offline"
        );

        let bit = 1u8 << (i % 8);
        let survives = |c: &ManifestContainer, r: &Receipt| {
            verify_receipt_offline(c, r, &service_key).is_valid()
        };

        // Manifest mutation.
        let mut bad = container.clone();
        let at = i % bad.core_manifest.media_id.len();
        bad.core_manifest.media_id[at] ^= bit;
        if survives(&bad, &receipt) {
            mutation_escapes += 1;
        }

        // Entry mutation (digest recomputation must catch it).
        let mut bad = receipt.clone();
        let at = i % bad.entry.publisher_signature.len();
        bad.entry.publisher_signature[at] ^= bit;
        if survives(container, &bad) {
            mutation_escapes += 1;
        }

        // Inclusion path mutation.
        let mut bad = receipt.clone();
        assert!(!bad.inclusion_path.is_empty());
        let hop = i % bad.inclusion_path.len();
        bad.inclusion_path[hop][i % 32] ^= bit;
        if survives(container, &bad) {
            mutation_escapes += 1;
        }

        // Root hash mutation.
        let mut bad = receipt.clone();
        let at = i % bad.signed_root.root_hash.len();
        bad.signed_root.root_hash[at] ^= bit;
        if survives(container, &bad) {
            mutation_escapes += 1;
        }

        // Endorsement signature mutation.
        let mut bad = receipt.clone();
        let at = i % bad.signed_root.service_signature.len();
        bad.signed_root.service_signature[at] ^= bit;
        if survives(container, &bad) {
            mutation_escapes += 1;
        }
    }
    assert_eq!(mutation_escapes, 0);
    println!("criterion 5 (100 offline receipts, all bit-mutation classes rejected): pass");
}

#[test]
fn criterion_06_end_to_end_tamper_detection() {
    let (pki, chain, policy) = publisher_pki();
    let service = Arc::new(AmpService::new(KeyHandle::generate(), policy));
    let playback_policy = TrustPolicy::new(
        pki.root_pem(),
        EkuPurpose::ManifestSigning,
        Timestamp::now(),
    );

    let dir = tempfile::tempdir().unwrap();
    let media_path = dir.path().join("clip.mp4");
    fs::write(&media_path, generate_fmp4(0x6E6, 6, 4_096)).unwrap();
    let outcome = publish_flow(
        std::slice::from_ref(&media_path),
        &chain,
        &PublishOptions {
            publisher: "Newsroom".into(),
            title: "tamper clip".into(),
            ..PublishOptions::default()
        },
        &service,
    )
    .expect("publish");

    // The evidence-carrying copy plays back clean from a sidecar-free spot.
    let injected = fs::read(&outcome.injected_paths[0]).unwrap();
    let clean_path = dir.path().join("probe-clean.mp4");
    fs::write(&clean_path, &injected).unwrap();
    let report = playback_verify_flow(&clean_path, &service, &playback_policy);
    assert_eq!(report.status, Status::Authenticated);
    assert!(report.failing_chunks.is_empty());
    assert!(report.receipt_checked);

    let boxes = parse_boxes(&injected).unwrap();
    let (chunks, _) = extract_iso_chunks(&boxes, &injected, "sha256").unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(0x7A3);
    for trial in 0..20 {
        let chunk = &chunks[rng.gen_range(0..chunks.len())];
        let position = rng.gen_range(chunk.mdat_range.clone());
        let mut tampered = injected.clone();
        tampered[position] ^= 1 << rng.gen_range(0..8);

        let probe = dir.path().join(format!("probe-{trial}.mp4"));
        fs::write(&probe, &tampered).unwrap();
        let report = playback_verify_flow(&probe, &service, &playback_policy);
        assert_eq!(report.status, Status::Tampered, "trial {trial}");
        assert_eq!(
            report.failing_chunks,
            vec![chunk.index],
            "trial {trial} must name exactly the altered chunk"
        );
        assert_eq!(report.status.exit_code(), 3);
    }
    println!("criterion 6 (tampered chunk named in 20/20 trials, clean copy authenticated): pass");
}

#[test]
fn criterion_07_ledger_ingest_benchmark() {
    let started = Instant::now();
    let run = benchmark_ingest(2, Duration::from_secs(5)).unwrap();
    let report = run.report;
    assert!(started.elapsed() <= Duration::from_secs(60));

    // Sampled receipts must audit cleanly offline.
    for (container, receipt) in &run.samples {
        assert!(verify_receipt_offline(container, receipt, &run.service_public_key).is_valid());
    }

    println!("benchmark report: {}", report.to_json());
    assert!(
        report.tx_per_sec >= 5_000.0,
        "sustained {:.0} tx/s, need 5000",
        report.tx_per_sec
    );
    const EXPECTED_LOAD: f64 = 11_575.0;
    if report.tx_per_sec >= EXPECTED_LOAD {
        println!(
            "expected load of {EXPECTED_LOAD} ops/s met: {:.0} tx/s",
            report.tx_per_sec
        );
    } else {
        println!(
            "expected load of {EXPECTED_LOAD} ops/s NOT met: shortfall {:.0} ops/s",
            EXPECTED_LOAD - report.tx_per_sec
        );
    }
    println!("criterion 7 (single-node ingest ≥ 5000 registrations/s): pass");
}

#[test]
fn criterion_08_replication_simulation() {
    let started = Instant::now();
    let workload: Vec<Vec<u8>> = (0..20u64).map(|i| i.to_be_bytes().to_vec()).collect();

    for seed in 0..100u64 {
        for replicas in [3usize, 5] {
            let trace = run_replicated(
                &ReplicaHarness {
                    replicas,
                    drop_probability: 0.2,
                    partitioned: Vec::new(),
                },
                &workload,
                seed,
            )
            .unwrap();
            assert!(!trace.stalled, "seed {seed} n={replicas}");
            let majority = replicas / 2 + 1;
            // Commits are dense and each reached a true majority.
            for (k, commit) in trace.commits.iter().enumerate() {
                assert_eq!(commit.commit_index, k as u64);
                assert!(commit.acks >= majority);
            }
            // Safety: no replica log diverges from the committed prefix.
            let leader = &trace.replica_logs[0];
            for log in &trace.replica_logs {
                let shared = log.len().min(leader.len());
                assert_eq!(&log[..shared], &leader[..shared], "divergent log");
            }
        }

        // Majority partitioned away: no entry can commit.
        let stalled = run_replicated(
            &ReplicaHarness {
                replicas: 3,
                drop_probability: 0.2,
                partitioned: vec![1, 2],
            },
            &workload[..1],
            seed,
        )
        .unwrap();
        assert!(stalled.stalled);
        assert!(stalled.commits.is_empty());

        // One node partitioned: the remaining majority still progresses.
        let progressing = run_replicated(
            &ReplicaHarness {
                replicas: 3,
                drop_probability: 0.2,
                partitioned: vec![1],
            },
            &workload,
            seed,
        )
        .unwrap();
        assert!(!progressing.stalled);
        assert_eq!(progressing.commits.len(), workload.len());
    }
    assert!(
        started.elapsed() < Duration::from_secs(60),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 8 (replication: 100 seeds, n=3/n=5, quorum behavior): pass");
}

#[test]
fn criterion_09_watermark_suite() {
    let (_pki, chain, _policy) = publisher_pki();
    let leaf_pem = chain.certificates.last().unwrap().clone();
    let params = EmbedParams::default();
    assert_eq!(params.chips_per_bit, 512);

    const LOCATOR: &str = "https://media.example.test/masters/acceptance-0001";
    let media_id = vec![0x5A; 16];
    let (payload, bits) = build_payload(&media_id, LOCATOR, &chain).unwrap();
    assert!(bits.len() >= 1000, "payload carries {} bits", bits.len());

    // Bit-exact embed/extract loop on long fixtures.
    let carriers = [
        multi_sine(48_000, 800_000, &[220.0, 330.0, 495.0, 742.5]),
        multi_sine(48_000, 800_000, &[185.0, 277.5, 620.0]),
        multi_sine(44_100, 900_000, &[130.8, 329.6, 523.3, 987.8]),
    ];
    let mut energy_db: f64 = f64::NEG_INFINITY;
    let mut marked_fixtures = Vec::new();
    for carrier in &carriers {
        assert!(carrier.len() >= 512_000);
        let marked = embed_pcm(carrier, &bits, &params).unwrap();
        let recovered = extract_pcm(&marked, &params).expect("mark detected");
        assert_eq!(recovered, payload, "payload recovered bit-exactly");
        let (got_id, got_locator) =
            verify_payload(&recovered, |loc: &str| (loc == LOCATOR).then(|| leaf_pem.clone()))
                .unwrap();
        assert_eq!(got_id, media_id);
        assert_eq!(got_locator, LOCATOR);
        energy_db = energy_db.max(watermark_energy_ratio_db(carrier, &marked));
        marked_fixtures.push(marked);
    }

    // Imperceptibility proxy: the mark stays at or below -30 dB.
    assert!(energy_db <= -30.0, "energy ratio {energy_db:.2} dB");

    // False positives: under 1% across 1000 unwatermarked signals.
    let mut rng = ChaCha8Rng::seed_from_u64(0xFA15E);
    let mut false_positives = 0usize;
    for i in 0..1000 {
        let signal: Vec<i16> = if i % 2 == 0 {
            let f = 100.0 + (i as f64) * 1.7;
            multi_sine(48_000, 64_000, &[f, f * 1.5, f * 2.25])
        } else {
            (0..64_000).map(|_| rng.gen_range(-12_000..12_000)).collect()
        };
        if extract_pcm(&signal, &params).is_some() {
            false_positives += 1;
        }
    }
    assert!(false_positives < 10, "{false_positives} false positives");

    // Fragility: replacing a contiguous half with silence defeats the mark
    // (or at least its payload signature) in every trial.
    let marked = &marked_fixtures[0];
    let half = marked.len() / 2;
    let mut defeated = 0usize;
    for _ in 0..50 {
        let start = rng.gen_range(0..marked.len() - half);
        let mut edited = marked.clone();
        edited[start..start + half].fill(0);
        let survived = match extract_pcm(&edited, &params) {
            None => false,
            Some(recovered) => {
                verify_payload(&recovered, |loc: &str| (loc == LOCATOR).then(|| leaf_pem.clone()))
                    .is_ok()
            }
        };
        if !survived {
            defeated += 1;
        }
    }
    assert_eq!(defeated, 50);

    println!("criterion 9 (watermark: bit-exact loop, <1% FP, 50/50 fragility, ≤ -30 dB): pass");
}

#[test]
fn criterion_10_pki_purpose_enforcement() {
    let purposes = [
        EkuPurpose::ServerAuth,
        EkuPurpose::ClientAuth,
        EkuPurpose::ManifestSigning,
        EkuPurpose::TimeStamping,
        EkuPurpose::LedgerRegistration,
    ];
    let pki = generate_test_pki(&PkiSpec {
        root_name: "purpose root".into(),
        organizations: purposes
            .iter()
            .map(|p| NodeSpec::leaf(&format!("{p:?} leaf"), std::slice::from_ref(p)))
            .collect(),
    })
    .unwrap();

    // A ClientAuth-only leaf cannot sign manifests.
    let client_only = pki.chain_for("ClientAuth leaf").unwrap();
    let container = simple_container(0);
    assert_eq!(
        sign_manifest(&container.core_manifest, &client_only).unwrap_err(),
        PkiError::PurposeViolation(EkuPurpose::ManifestSigning)
    );

    // Every purpose is distinguishable: a policy requiring purpose P accepts
    // exactly the leaf certified for P.
    for required in purposes {
        let policy = TrustPolicy::new(pki.root_pem(), required, Timestamp::now());
        for candidate in purposes {
            let chain = pki.chain_for(&format!("{candidate:?} leaf")).unwrap();
            let result = verify_chain(&chain.certificates, &policy);
            if candidate == required {
                assert!(result.is_ok(), "{required:?} must accept its own leaf");
            } else {
                assert_eq!(
                    result.unwrap_err(),
                    PkiError::PurposeViolation(required),
                    "{candidate:?} leaf must not satisfy {required:?}"
                );
            }
        }
    }
    println!("criterion 10 (purpose enforcement, five distinguishable key usages): pass");
}
