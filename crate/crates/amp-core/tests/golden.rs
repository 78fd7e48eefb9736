//! Golden vectors for the canonical encodings and the ManifestID.
//!
//! The expected CBOR bytes are assembled by hand from the RFC 7049 rules so
//! they are independent of the encoder under test.

use amp_core::{
    compute_manifest_id, encode_canonical_cbor, encode_canonical_json, ManifestCore,
    PublisherInfo, Timestamp, WorkInfo,
};
use sha2::{Digest, Sha256};

fn fixture_core() -> ManifestCore {
    ManifestCore {
        version: 1,
        serial_number: (0u8..16).collect(),
        digest_algorithm: "sha256".into(),
        media_id: vec![1, 2, 3, 4],
        creation_time: Timestamp::from_epoch_millis(1_700_000_000_000),
        publisher: PublisherInfo::named("TPS-UK"),
        work: WorkInfo::titled("Fixture"),
        facsimile_info_digests: vec![vec![0xAA; 32]],
        origin_manifests: None,
    }
}

fn hand_encoded_core() -> Vec<u8> {
    let mut b: Vec<u8> = Vec::new();
    let text = |b: &mut Vec<u8>, s: &str| {
        assert!(s.len() < 24);
        b.push(0x60 | s.len() as u8);
        b.extend_from_slice(s.as_bytes());
    };
    // Map of 8 entries; canonical key order is length-first, then bytewise:
    // Work, MediaID, Version, Publisher, CreationTime, SerialNumber,
    // DigestAlgorithm, FacsimileInfoDigests.
    b.push(0xa8);
    text(&mut b, "Work");
    b.push(0xa1);
    text(&mut b, "Title");
    text(&mut b, "Fixture");
    text(&mut b, "MediaID");
    b.push(0x44);
    b.extend_from_slice(&[1, 2, 3, 4]);
    text(&mut b, "Version");
    b.push(0x01);
    text(&mut b, "Publisher");
    b.push(0xa1);
    text(&mut b, "Name");
    text(&mut b, "TPS-UK");
    text(&mut b, "CreationTime");
    b.push(0x1b);
    b.extend_from_slice(&1_700_000_000_000u64.to_be_bytes());
    text(&mut b, "SerialNumber");
    b.push(0x50);
    b.extend((0u8..16).collect::<Vec<_>>());
    text(&mut b, "DigestAlgorithm");
    text(&mut b, "sha256");
    text(&mut b, "FacsimileInfoDigests");
    b.push(0x81);
    b.push(0x58);
    b.push(0x20);
    b.extend_from_slice(&[0xAA; 32]);
    b
}

#[test]
fn canonical_cbor_matches_hand_encoding() {
    let encoded = encode_canonical_cbor(&fixture_core()).unwrap();
    assert_eq!(encoded, hand_encoded_core());
}

#[test]
fn manifest_id_is_sha256_of_canonical_cbor() {
    let id = compute_manifest_id(&fixture_core()).unwrap();
    assert_eq!(id.algorithm, "sha256");
    assert_eq!(id.value.len(), 32);
    let expected = Sha256::digest(hand_encoded_core());
    assert_eq!(id.value, expected.to_vec());
}

#[test]
fn canonical_json_matches_jcs_reference() {
    // serde_jcs is an independent JCS implementation; re-serializing our
    // output through it must be a fixpoint.
    let ours = encode_canonical_json(&fixture_core()).unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&ours).unwrap();
    let reference = serde_jcs::to_vec(&parsed).unwrap();
    assert_eq!(ours, reference);
}

#[test]
fn json_timestamps_are_rfc3339_utc() {
    let json = String::from_utf8(encode_canonical_json(&fixture_core()).unwrap()).unwrap();
    assert!(json.contains("\"CreationTime\":\"2023-11-14T22:13:20.000Z\""));
}
