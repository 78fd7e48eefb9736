//! Dual signing of core records: a COSE_Sign1 token over the hash of the
//! canonical CBOR form and a JWT over the hash of the canonical JSON form,
//! packaged with the root→leaf certificate chain.

use amp_core::{
    digest::sha256, encode_canonical_cbor, encode_canonical_json, ManifestCore,
    PublisherAttestation,
};

use crate::cose::cose_sign1;
use crate::eku::EkuPurpose;
use crate::jwt::jwt_sign;
use crate::testpki::TrustChain;
use crate::verify::certificate_purposes;
use crate::{PkiError, Result};

pub fn sign_manifest(core: &ManifestCore, chain: &TrustChain) -> Result<PublisherAttestation> {
    let leaf_pem = chain
        .certificates
        .last()
        .ok_or_else(|| PkiError::InvalidArgument("empty certificate chain".into()))?;
    if !certificate_purposes(leaf_pem)?.contains(&EkuPurpose::ManifestSigning) {
        return Err(PkiError::PurposeViolation(EkuPurpose::ManifestSigning));
    }
    let cbor_digest = sha256(&encode_canonical_cbor(core)?);
    let json_digest = sha256(&encode_canonical_json(core)?);
    Ok(PublisherAttestation {
        cose_signature_token: Some(cose_sign1(&cbor_digest, &chain.leaf_key)),
        json_web_token: Some(jwt_sign(&json_digest, &chain.leaf_key)),
        pem_encoded_certificates: Some(chain.certificates.clone()),
    })
}
