//! Chain and attestation verification.
//!
//! Verification is anchored only at caller-supplied roots: system trust
//! stores are never consulted. All checks are pure given the policy clock.

use amp_core::{
    digest::sha256, encode_canonical_cbor, encode_canonical_json, ManifestContainer, Timestamp,
};
use x509_parser::certificate::X509Certificate;
use x509_parser::extensions::ParsedExtension;
use x509_parser::oid_registry::OID_SIG_ECDSA_WITH_SHA256;
use x509_parser::pem::parse_x509_pem;
use x509_parser::prelude::FromDer;
use x509_parser::time::ASN1Time;

use crate::cose::cose_verify;
use crate::eku::EkuPurpose;
use crate::jwt::jwt_verify;
use crate::keys::verify_raw;
use crate::{PkiError, Result};

#[derive(Debug, Clone)]
pub struct TrustPolicy {
    /// PEM certificates accepted as self-signed anchors.
    pub trusted_roots: Vec<String>,
    /// Purpose the chain's leaf must carry.
    pub required_eku: EkuPurpose,
    /// Instant at which every certificate's validity window is checked.
    pub clock: Timestamp,
}

impl TrustPolicy {
    pub fn new(root_pem: &str, required_eku: EkuPurpose, clock: Timestamp) -> Self {
        TrustPolicy {
            trusted_roots: vec![root_pem.to_owned()],
            required_eku,
            clock,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedIdentity {
    /// Common name of the signing leaf certificate.
    pub publisher: String,
    /// Common names along the chain, root first.
    pub chain_subjects: Vec<String>,
}

pub(crate) fn pem_to_der(pem: &str) -> Result<Vec<u8>> {
    let (_, parsed) = parse_x509_pem(pem.as_bytes())
        .map_err(|e| PkiError::CertParse(format!("pem: {e}")))?;
    Ok(parsed.contents)
}

fn parse_cert<'a>(der: &'a [u8]) -> Result<X509Certificate<'a>> {
    let (_, cert) = X509Certificate::from_der(der)
        .map_err(|e| PkiError::CertParse(format!("x509: {e}")))?;
    Ok(cert)
}

pub(crate) fn common_name(cert: &X509Certificate<'_>) -> String {
    cert.subject()
        .iter_common_name()
        .next()
        .and_then(|a| a.as_str().ok())
        .unwrap_or_default()
        .to_owned()
}

pub(crate) fn purposes_of(cert: &X509Certificate<'_>) -> Vec<EkuPurpose> {
    let mut out = Vec::new();
    for ext in cert.extensions() {
        if let ParsedExtension::ExtendedKeyUsage(eku) = ext.parsed_extension() {
            if eku.server_auth {
                out.push(EkuPurpose::ServerAuth);
            }
            if eku.client_auth {
                out.push(EkuPurpose::ClientAuth);
            }
            if eku.time_stamping {
                out.push(EkuPurpose::TimeStamping);
            }
            for oid in &eku.other {
                let dotted = oid.to_id_string();
                if dotted == EkuPurpose::ManifestSigning.oid_string() {
                    out.push(EkuPurpose::ManifestSigning);
                } else if dotted == EkuPurpose::LedgerRegistration.oid_string() {
                    out.push(EkuPurpose::LedgerRegistration);
                }
            }
        }
    }
    out
}

fn check_signed_by(cert: &X509Certificate<'_>, issuer: &X509Certificate<'_>) -> Result<()> {
    let name = common_name(cert);
    if cert.issuer() != issuer.subject() {
        return Err(PkiError::ChainSignature(name));
    }
    if cert.signature_algorithm.algorithm != OID_SIG_ECDSA_WITH_SHA256 {
        return Err(PkiError::CertParse(format!(
            "`{name}` uses an unsupported signature algorithm"
        )));
    }
    let spki = &issuer.public_key().subject_public_key.data;
    // Certificate signatures are DER-encoded; normalize to raw r‖s.
    let signature = p256::ecdsa::Signature::from_der(&cert.signature_value.data)
        .map_err(|_| PkiError::ChainSignature(name.clone()))?;
    verify_raw(spki, cert.tbs_certificate.as_ref(), &signature.to_bytes())
        .map_err(|_| PkiError::ChainSignature(name))
}

fn check_validity(cert: &X509Certificate<'_>, clock: Timestamp) -> Result<()> {
    let at = ASN1Time::from_timestamp(clock.epoch_millis() / 1000)
        .map_err(|e| PkiError::InvalidArgument(format!("policy clock: {e}")))?;
    if at < cert.validity().not_before || at > cert.validity().not_after {
        return Err(PkiError::Expired(common_name(cert)));
    }
    Ok(())
}

/// Validate a root→leaf chain against the policy and return the leaf identity.
pub fn verify_chain(chain: &[String], policy: &TrustPolicy) -> Result<VerifiedIdentity> {
    if policy.trusted_roots.is_empty() {
        return Err(PkiError::InvalidArgument("empty trusted root set".into()));
    }
    if chain.is_empty() {
        return Err(PkiError::InvalidArgument("empty certificate chain".into()));
    }
    let ders: Vec<Vec<u8>> = chain.iter().map(|p| pem_to_der(p)).collect::<Result<_>>()?;
    let certs: Vec<X509Certificate<'_>> =
        ders.iter().map(|d| parse_cert(d)).collect::<Result<_>>()?;

    let root_ders: Vec<Vec<u8>> = policy
        .trusted_roots
        .iter()
        .map(|p| pem_to_der(p))
        .collect::<Result<_>>()?;
    if !root_ders.iter().any(|r| r == &ders[0]) {
        return Err(PkiError::UntrustedRoot);
    }

    check_signed_by(&certs[0], &certs[0])?; // root self-signature
    for i in 1..certs.len() {
        check_signed_by(&certs[i], &certs[i - 1])?;
    }
    for cert in &certs {
        check_validity(cert, policy.clock)?;
    }

    let leaf = certs.last().expect("non-empty chain");
    if !purposes_of(leaf).contains(&policy.required_eku) {
        return Err(PkiError::PurposeViolation(policy.required_eku));
    }
    Ok(VerifiedIdentity {
        publisher: common_name(leaf),
        chain_subjects: certs.iter().map(common_name).collect(),
    })
}

/// Validate a container's publisher attestation: chain to a policy root,
/// leaf purpose, and token signatures over the recomputed canonical digests
/// of the core record. Both tokens are checked when both are present.
pub fn verify_publisher_attestation(
    container: &ManifestContainer,
    policy: &TrustPolicy,
) -> Result<VerifiedIdentity> {
    let attestation = container
        .publisher_attestation
        .as_ref()
        .ok_or(PkiError::MissingAttestation)?;
    let chain = attestation
        .pem_encoded_certificates
        .as_ref()
        .filter(|c| !c.is_empty())
        .ok_or(PkiError::MissingAttestation)?;
    if attestation.cose_signature_token.is_none() && attestation.json_web_token.is_none() {
        return Err(PkiError::MissingAttestation);
    }

    let identity = verify_chain(chain, policy)?;
    let leaf_der = pem_to_der(chain.last().expect("non-empty chain"))?;
    let leaf = parse_cert(&leaf_der)?;
    let leaf_key = leaf.public_key().subject_public_key.data.to_vec();

    let core = &container.core_manifest;
    let cose_ok = attestation
        .cose_signature_token
        .as_ref()
        .map(|token| {
            let expected = sha256(&encode_canonical_cbor(core)?);
            Ok::<bool, PkiError>(cose_verify(token, &leaf_key).ok() == Some(expected))
        })
        .transpose()?;
    let jwt_ok = attestation
        .json_web_token
        .as_ref()
        .map(|token| {
            let expected = sha256(&encode_canonical_json(core)?);
            Ok::<bool, PkiError>(jwt_verify(token, &leaf_key).ok() == Some(expected))
        })
        .transpose()?;

    match (cose_ok, jwt_ok) {
        (Some(true), Some(true)) | (Some(true), None) | (None, Some(true)) => Ok(identity),
        (Some(true), Some(false)) | (Some(false), Some(true)) => Err(PkiError::TokenMismatch),
        _ => Err(PkiError::BadSignature),
    }
}

/// Purposes carried by a PEM certificate's extended-key-usage extension.
pub fn certificate_purposes(pem: &str) -> Result<Vec<EkuPurpose>> {
    let der = pem_to_der(pem)?;
    Ok(purposes_of(&parse_cert(&der)?))
}

/// SEC1-encoded public key of a PEM certificate.
pub fn certificate_public_key(pem: &str) -> Result<Vec<u8>> {
    let der = pem_to_der(pem)?;
    Ok(parse_cert(&der)?.public_key().subject_public_key.data.to_vec())
}

/// Common name of a PEM certificate's subject.
pub fn certificate_common_name(pem: &str) -> Result<String> {
    let der = pem_to_der(pem)?;
    Ok(common_name(&parse_cert(&der)?))
}
