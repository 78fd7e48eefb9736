//! Hierarchy generation, chain validation, dual-token signing, and targeted
//! soundness mutations.

use amp_core::{build_manifest, encode_canonical_cbor, encode_canonical_json};
use amp_core::{digest::sha256, PublisherInfo, Timestamp, WorkInfo};
use amp_pki::cose::cose_verify;
use amp_pki::jwt::jwt_verify;
use amp_pki::{
    certificate_public_key, certificate_purposes, generate_test_pki, sign_manifest, verify_chain,
    verify_publisher_attestation, EkuPurpose, NodeSpec, PkiError, PkiSpec, TestPki, TrustPolicy,
};

fn now() -> Timestamp {
    Timestamp::from_epoch_millis(1_756_000_000_000) // 2025-08-24
}

/// Alliance root, two member organizations, two bureaus each, one signing
/// individual per bureau.
fn alliance_pki() -> TestPki {
    let bureau = |org: &str, city: &str| {
        NodeSpec::authority(
            &format!("{org}-{city}"),
            vec![NodeSpec::leaf(
                &format!("{org}-{city}-signer"),
                &[EkuPurpose::ManifestSigning],
            )],
        )
    };
    generate_test_pki(&PkiSpec {
        root_name: "Alliance Root".into(),
        organizations: vec![
            NodeSpec::authority("TPS", vec![bureau("TPS", "UK"), bureau("TPS", "US")]),
            NodeSpec::authority("WBC", vec![bureau("WBC", "DE"), bureau("WBC", "JP")]),
        ],
    })
    .unwrap()
}

fn manifest_policy(pki: &TestPki) -> TrustPolicy {
    TrustPolicy::new(pki.root_pem(), EkuPurpose::ManifestSigning, now())
}

#[test]
fn alliance_hierarchy_has_seven_authorities() {
    let pki = alliance_pki();
    assert_eq!(pki.ca_count(), 7); // root + 2 orgs + 4 bureaus
    assert_eq!(pki.leaf_count(), 4);
}

#[test]
fn every_generated_chain_verifies_against_its_own_root() {
    let pki = alliance_pki();
    for name in [
        "TPS-UK-signer",
        "TPS-US-signer",
        "WBC-DE-signer",
        "WBC-JP-signer",
    ] {
        let chain = pki.chain_for(name).unwrap();
        assert_eq!(chain.certificates.len(), 4); // root, org, bureau, leaf
        let identity = verify_chain(&chain.certificates, &manifest_policy(&pki)).unwrap();
        assert_eq!(identity.publisher, name);
        assert_eq!(identity.chain_subjects.len(), 4);
        assert_eq!(identity.chain_subjects[0], "Alliance Root");
    }
}

#[test]
fn two_level_hierarchy_makes_the_organization_the_leaf() {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![NodeSpec::leaf("small-org", &[EkuPurpose::ManifestSigning])],
    })
    .unwrap();
    let chain = pki.chain_for("small-org").unwrap();
    assert_eq!(chain.certificates.len(), 2);
    let identity = verify_chain(&chain.certificates, &manifest_policy(&pki)).unwrap();
    assert_eq!(identity.publisher, "small-org");
}

#[test]
fn duplicate_names_are_rejected() {
    let result = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![
            NodeSpec::leaf("org", &[EkuPurpose::ManifestSigning]),
            NodeSpec::leaf("org", &[EkuPurpose::ClientAuth]),
        ],
    });
    assert!(matches!(result, Err(PkiError::InvalidArgument(_))));
}

#[test]
fn combined_purpose_certificates_carry_both_ekus() {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![NodeSpec::leaf(
            "dual",
            &[EkuPurpose::ManifestSigning, EkuPurpose::ClientAuth],
        )],
    })
    .unwrap();
    let purposes = certificate_purposes(pki.certificate_pem("dual").unwrap()).unwrap();
    assert!(purposes.contains(&EkuPurpose::ManifestSigning));
    assert!(purposes.contains(&EkuPurpose::ClientAuth));
    let chain = pki.chain_for("dual").unwrap();
    verify_chain(&chain.certificates, &manifest_policy(&pki)).unwrap();
    let client_policy = TrustPolicy::new(pki.root_pem(), EkuPurpose::ClientAuth, now());
    verify_chain(&chain.certificates, &client_policy).unwrap();
}

#[test]
fn client_auth_only_leaf_is_a_purpose_violation() {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![NodeSpec::leaf("client-only", &[EkuPurpose::ClientAuth])],
    })
    .unwrap();
    let chain = pki.chain_for("client-only").unwrap();
    assert_eq!(
        verify_chain(&chain.certificates, &manifest_policy(&pki)),
        Err(PkiError::PurposeViolation(EkuPurpose::ManifestSigning))
    );
}

// build_manifest requires at least one facsimile; give it a trivial one.
fn signed_fixture(pki: &TestPki, signer: &str) -> amp_core::ManifestContainer {
    use amp_core::types::{FacsimileDescriptor, FacsimileMajorType};
    let facsimile = FacsimileDescriptor {
        major_type: FacsimileMajorType::Video,
        container_type: "MP4".into(),
        encoding_information: "h264".into(),
        encoding_information2: None,
        length: 4,
        object_digest: sha256(b"abcd"),
        facsimile_locator: None,
        object_containers: None,
        additional_claims: None,
        chunk_data: None,
    };
    let mut container = build_manifest(
        PublisherInfo::named(signer),
        WorkInfo::titled("story"),
        vec![facsimile],
        None,
    )
    .unwrap();
    let chain = pki.chain_for(signer).unwrap();
    container.publisher_attestation =
        Some(sign_manifest(&container.core_manifest, &chain).unwrap());
    container
}

#[test]
fn signed_container_verifies_and_names_the_signer() {
    let pki = alliance_pki();
    let container = signed_fixture(&pki, "TPS-UK-signer");
    let identity = verify_publisher_attestation(&container, &manifest_policy(&pki)).unwrap();
    assert_eq!(identity.publisher, "TPS-UK-signer");
}

#[test]
fn cose_attests_the_cbor_digest_and_jwt_the_json_digest() {
    let pki = alliance_pki();
    let container = signed_fixture(&pki, "TPS-UK-signer");
    let attestation = container.publisher_attestation.as_ref().unwrap();
    let chain = container
        .publisher_attestation
        .as_ref()
        .unwrap()
        .pem_encoded_certificates
        .as_ref()
        .unwrap();
    let leaf_key = certificate_public_key(chain.last().unwrap()).unwrap();

    let cose_payload =
        cose_verify(attestation.cose_signature_token.as_ref().unwrap(), &leaf_key).unwrap();
    assert_eq!(
        cose_payload,
        sha256(&encode_canonical_cbor(&container.core_manifest).unwrap())
    );
    let jwt_digest =
        jwt_verify(attestation.json_web_token.as_ref().unwrap(), &leaf_key).unwrap();
    assert_eq!(
        jwt_digest,
        sha256(&encode_canonical_json(&container.core_manifest).unwrap())
    );
    assert_ne!(cose_payload, jwt_digest); // the two canonical forms differ
}

#[test]
fn same_core_signed_twice_yields_two_valid_attestations() {
    let pki = alliance_pki();
    let mut container = signed_fixture(&pki, "WBC-DE-signer");
    let chain = pki.chain_for("WBC-DE-signer").unwrap();
    let policy = manifest_policy(&pki);
    verify_publisher_attestation(&container, &policy).unwrap();
    container.publisher_attestation =
        Some(sign_manifest(&container.core_manifest, &chain).unwrap());
    verify_publisher_attestation(&container, &policy).unwrap();
}

#[test]
fn signing_with_a_wrong_purpose_leaf_is_rejected() {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "root".into(),
        organizations: vec![NodeSpec::leaf("server", &[EkuPurpose::ServerAuth])],
    })
    .unwrap();
    let chain = pki.chain_for("server").unwrap();
    let fixture = signed_fixture(&alliance_pki(), "TPS-UK-signer");
    assert_eq!(
        sign_manifest(&fixture.core_manifest, &chain),
        Err(PkiError::PurposeViolation(EkuPurpose::ManifestSigning))
    );
}

#[test]
fn each_trust_factor_fails_in_isolation() {
    let pki = alliance_pki();
    let other_pki = alliance_pki(); // same shape, different keys
    let container = signed_fixture(&pki, "TPS-UK-signer");
    let policy = manifest_policy(&pki);

    // Root membership.
    let foreign = TrustPolicy::new(other_pki.root_pem(), EkuPurpose::ManifestSigning, now());
    assert_eq!(
        verify_publisher_attestation(&container, &foreign),
        Err(PkiError::UntrustedRoot)
    );

    // Chain signatures: splice in an intermediate from the other hierarchy.
    let mut spliced = container.clone();
    let certs = spliced
        .publisher_attestation
        .as_mut()
        .unwrap()
        .pem_encoded_certificates
        .as_mut()
        .unwrap();
    certs[1] = other_pki.certificate_pem("TPS").unwrap().to_owned();
    assert!(matches!(
        verify_publisher_attestation(&spliced, &policy),
        Err(PkiError::ChainSignature(_))
    ));

    // Validity window: certificates expire at the generator's default
    // horizon; a far-future clock lands past it.
    let future = TrustPolicy::new(
        pki.root_pem(),
        EkuPurpose::ManifestSigning,
        Timestamp::from_epoch_millis(95_619_000_000_000), // year ~5000
    );
    assert!(matches!(
        verify_publisher_attestation(&container, &future),
        Err(PkiError::Expired(_))
    ));

    // Content digest: flip the work title after signing.
    let mut tampered = container.clone();
    tampered.core_manifest.work.title = "different story".into();
    assert_eq!(
        verify_publisher_attestation(&tampered, &policy),
        Err(PkiError::BadSignature)
    );
}

#[test]
fn disagreeing_tokens_are_a_mismatch() {
    let pki = alliance_pki();
    let mut container = signed_fixture(&pki, "TPS-UK-signer");
    let policy = manifest_policy(&pki);

    // Replace the JWT with one from a different key over the right digest:
    // the COSE token still verifies, the JWT no longer does.
    let stranger = amp_pki::KeyHandle::generate();
    let json_digest = sha256(&encode_canonical_json(&container.core_manifest).unwrap());
    container
        .publisher_attestation
        .as_mut()
        .unwrap()
        .json_web_token = Some(amp_pki::jwt::jwt_sign(&json_digest, &stranger));
    assert_eq!(
        verify_publisher_attestation(&container, &policy),
        Err(PkiError::TokenMismatch)
    );
}

#[test]
fn missing_attestation_pieces_are_reported() {
    let pki = alliance_pki();
    let policy = manifest_policy(&pki);
    let mut container = signed_fixture(&pki, "TPS-UK-signer");
    container.publisher_attestation = None;
    assert_eq!(
        verify_publisher_attestation(&container, &policy),
        Err(PkiError::MissingAttestation)
    );

    let mut tokenless = signed_fixture(&pki, "TPS-UK-signer");
    let att = tokenless.publisher_attestation.as_mut().unwrap();
    att.cose_signature_token = None;
    att.json_web_token = None;
    assert_eq!(
        verify_publisher_attestation(&tokenless, &policy),
        Err(PkiError::MissingAttestation)
    );
}
