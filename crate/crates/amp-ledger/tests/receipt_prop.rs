//! Randomized soundness: any single-bit mutation of a receipt's entry,
//! path, root, or signature falsifies offline verification, and path
//! lengths match the tree arithmetic.

use amp_core::digest::sha256;
use amp_core::types::{FacsimileDescriptor, FacsimileMajorType};
use amp_core::{build_manifest, compute_manifest_id, ManifestContainer, PublisherInfo};
use amp_core::{Timestamp, WorkInfo};
use amp_ledger::entry::LedgerEntry;
use amp_ledger::{verify_receipt_offline, Ledger, Receipt};
use amp_pki::{generate_test_pki, EkuPurpose, KeyHandle, NodeSpec, PkiSpec, TrustPolicy};
use proptest::prelude::*;

fn ledger_with(n: u8) -> (Ledger, Vec<ManifestContainer>) {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![NodeSpec::leaf("org", &[EkuPurpose::ManifestSigning])],
    })
    .unwrap();
    let chain = pki.chain_for("org").unwrap();
    let policy = TrustPolicy::new(pki.root_pem(), EkuPurpose::ManifestSigning, Timestamp::now());
    let mut ledger = Ledger::new(KeyHandle::generate(), policy);
    let containers: Vec<ManifestContainer> = (0..n)
        .map(|tag| {
            let facsimile = FacsimileDescriptor {
                major_type: FacsimileMajorType::Audio,
                container_type: "WAV".into(),
                encoding_information: "pcm".into(),
                encoding_information2: None,
                length: 1,
                object_digest: sha256(&[tag]),
                facsimile_locator: None,
                object_containers: None,
                additional_claims: None,
                chunk_data: None,
            };
            build_manifest(
                PublisherInfo::named("org"),
                WorkInfo::titled(&format!("w{tag}")),
                vec![facsimile],
                None,
            )
            .unwrap()
        })
        .collect();
    for c in &containers {
        let id = compute_manifest_id(&c.core_manifest).unwrap();
        let sig = chain
            .leaf_key
            .sign_raw(&LedgerEntry::signed_message(&id, "c"));
        ledger
            .append_registration(&id, "c", &sig, &chain.certificates)
            .unwrap();
    }
    ledger.sign_root().unwrap();
    (ledger, containers)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_bit_mutations_falsify_receipts(
        n in 1u8..12,
        pick in any::<prop::sample::Index>(),
        site in 0usize..4,
        byte in any::<prop::sample::Index>(),
        bit in 0u8..8,
    ) {
        let (ledger, containers) = ledger_with(n);
        let key = ledger.service_public_key();
        let index = pick.index(n as usize) as u64;
        let receipt = ledger.issue_receipt(index).unwrap();
        let manifest = &containers[index as usize];
        prop_assert!(verify_receipt_offline(manifest, &receipt, &key).is_valid());

        let mut mutated: Receipt = receipt.clone();
        let target: &mut Vec<u8> = match site {
            0 => &mut mutated.entry.manifest_id.value,
            1 => {
                if mutated.inclusion_path.is_empty() {
                    &mut mutated.entry_digest
                } else {
                    let i = byte.index(mutated.inclusion_path.len());
                    &mut mutated.inclusion_path[i]
                }
            }
            2 => &mut mutated.signed_root.root_hash,
            _ => &mut mutated.signed_root.service_signature,
        };
        let at = byte.index(target.len());
        target[at] ^= 1 << bit;
        prop_assert!(!verify_receipt_offline(manifest, &mutated, &key).is_valid());
    }
}

#[test]
fn path_lengths_match_tree_arithmetic_for_sizes_up_to_32() {
    let (ledger, _) = ledger_with(32);
    for index in 0..32u64 {
        let receipt = ledger.issue_receipt(index).unwrap();
        assert_eq!(receipt.inclusion_path.len(), 5); // log2(32)
    }
}
