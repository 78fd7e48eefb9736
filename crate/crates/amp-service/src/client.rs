//! Service access behind one trait, so the publish and playback flows run
//! identically against an in-process service or a remote one over HTTP.

use std::sync::Arc;

use amp_core::{ManifestContainer, TypedDigest};
use amp_ledger::Receipt;
use amp_pki::TrustChain;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use reqwest::StatusCode;

use crate::service::AmpService;
use crate::wire::{
    self, ManifestResponse, QueryResponse, ReceiptResponse, RegisterRequest, RegisterResponse,
    RevocationEvidence, RevocationRequest, RevocationResponse, ServiceKeyResponse, CHAIN_HEADER,
    SIGNATURE_HEADER,
};
use crate::{Result, ServiceError};

/// Read access used by playback verification.
pub trait ManifestSource {
    fn by_object_digest(&self, digest: &[u8]) -> Result<Vec<TypedDigest>>;
    fn by_chunk_digests(&self, digests: &[Vec<u8>]) -> Result<Vec<TypedDigest>>;
    fn by_media_id(&self, media_id: &[u8]) -> Result<Vec<TypedDigest>>;
    fn manifest(&self, id: &TypedDigest) -> Result<Option<(ManifestContainer, bool)>>;
    fn receipt(&self, id: &TypedDigest) -> Result<Option<Receipt>>;
    fn service_public_key(&self) -> Result<Vec<u8>>;
}

/// Write access used by the publish flow.
pub trait Registrar {
    fn register(
        &self,
        container: &ManifestContainer,
        copyright: &str,
        registration_signature: &[u8],
    ) -> Result<(TypedDigest, Receipt)>;
}

impl ManifestSource for Arc<AmpService> {
    fn by_object_digest(&self, digest: &[u8]) -> Result<Vec<TypedDigest>> {
        Ok(self.query_object_digest(digest))
    }

    fn by_chunk_digests(&self, digests: &[Vec<u8>]) -> Result<Vec<TypedDigest>> {
        Ok(self.query_chunk_digests(digests))
    }

    fn by_media_id(&self, media_id: &[u8]) -> Result<Vec<TypedDigest>> {
        Ok(self.query_media_id(media_id))
    }

    fn manifest(&self, id: &TypedDigest) -> Result<Option<(ManifestContainer, bool)>> {
        Ok(AmpService::manifest(self, id))
    }

    fn receipt(&self, id: &TypedDigest) -> Result<Option<Receipt>> {
        Ok(AmpService::receipt(self, id))
    }

    fn service_public_key(&self) -> Result<Vec<u8>> {
        Ok(AmpService::service_public_key(self))
    }
}

impl Registrar for Arc<AmpService> {
    fn register(
        &self,
        container: &ManifestContainer,
        copyright: &str,
        registration_signature: &[u8],
    ) -> Result<(TypedDigest, Receipt)> {
        AmpService::register(self, container, copyright, registration_signature, None)
    }
}

/// Blocking HTTP client. Mutating requests are signed with the client
/// credentials; read requests need none.
pub struct HttpClient {
    base: String,
    http: reqwest::blocking::Client,
    /// Chain + key presented on mutating routes (ClientAuth purpose).
    credentials: Option<TrustChain>,
}

impl HttpClient {
    pub fn new(base: &str) -> Self {
        HttpClient {
            base: base.trim_end_matches('/').to_owned(),
            http: reqwest::blocking::Client::new(),
            credentials: None,
        }
    }

    pub fn with_credentials(base: &str, credentials: TrustChain) -> Self {
        HttpClient {
            credentials: Some(credentials),
            ..HttpClient::new(base)
        }
    }

    fn transport(e: reqwest::Error) -> ServiceError {
        ServiceError::Transport(e.to_string())
    }

    fn fail(response: reqwest::blocking::Response) -> ServiceError {
        let status = response.status();
        let detail = response
            .json::<wire::ErrorResponse>()
            .map(|e| e.error)
            .unwrap_or_else(|_| "no detail".into());
        match status {
            StatusCode::UNAUTHORIZED => ServiceError::Unauthorized(detail),
            StatusCode::NOT_FOUND => ServiceError::NotFound(detail),
            _ => ServiceError::InvalidArgument(format!("{status}: {detail}")),
        }
    }

    fn get_json<T: serde::de::DeserializeOwned>(&self, path: &str) -> Result<T> {
        let response = self
            .http
            .get(format!("{}{path}", self.base))
            .send()
            .map_err(Self::transport)?;
        if !response.status().is_success() {
            return Err(Self::fail(response));
        }
        response.json().map_err(Self::transport)
    }

    fn post_signed<T: serde::de::DeserializeOwned>(
        &self,
        path: &str,
        body: &impl serde::Serialize,
    ) -> Result<T> {
        let credentials = self.credentials.as_ref().ok_or_else(|| {
            ServiceError::InvalidArgument("client credentials required for this call".into())
        })?;
        let body = serde_json::to_vec(body)
            .map_err(|e| ServiceError::InvalidArgument(e.to_string()))?;
        let signature = credentials.leaf_key.sign_raw(&body);
        let chain_pem = credentials.certificates.concat();
        let response = self
            .http
            .post(format!("{}{path}", self.base))
            .header(CHAIN_HEADER, B64.encode(chain_pem))
            .header(SIGNATURE_HEADER, B64.encode(signature))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .map_err(Self::transport)?;
        if !response.status().is_success() {
            return Err(Self::fail(response));
        }
        response.json().map_err(Self::transport)
    }

    fn query(&self, key: &str, values: &[Vec<u8>]) -> Result<Vec<TypedDigest>> {
        let qs = values
            .iter()
            .map(|v| format!("{key}={}", hex::encode(v)))
            .collect::<Vec<_>>()
            .join("&");
        let response: QueryResponse = self.get_json(&format!("/query?{qs}"))?;
        response
            .manifest_ids
            .iter()
            .map(|h| wire::manifest_id_from_hex(h))
            .collect()
    }

    pub fn revoke(
        &self,
        manifest_id: &TypedDigest,
        signature: &[u8],
        chain: &[String],
    ) -> Result<u64> {
        let request = RevocationRequest {
            manifest_id: wire::manifest_id_hex(manifest_id),
            evidence: RevocationEvidence {
                chain: chain.to_vec(),
                signature: B64.encode(signature),
            },
        };
        let response: RevocationResponse = self.post_signed("/revocations", &request)?;
        Ok(response.ledger_index)
    }
}

impl ManifestSource for HttpClient {
    fn by_object_digest(&self, digest: &[u8]) -> Result<Vec<TypedDigest>> {
        self.query("object_digest", std::slice::from_ref(&digest.to_vec()))
    }

    fn by_chunk_digests(&self, digests: &[Vec<u8>]) -> Result<Vec<TypedDigest>> {
        self.query("chunk_digest", digests)
    }

    fn by_media_id(&self, media_id: &[u8]) -> Result<Vec<TypedDigest>> {
        self.query("media_id", std::slice::from_ref(&media_id.to_vec()))
    }

    fn manifest(&self, id: &TypedDigest) -> Result<Option<(ManifestContainer, bool)>> {
        match self.get_json::<ManifestResponse>(&format!(
            "/manifests/{}",
            wire::manifest_id_hex(id)
        )) {
            Ok(r) => Ok(Some((wire::decode_container(&r.container)?, r.revoked))),
            Err(ServiceError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn receipt(&self, id: &TypedDigest) -> Result<Option<Receipt>> {
        match self
            .get_json::<ReceiptResponse>(&format!("/receipts/{}", wire::manifest_id_hex(id)))
        {
            Ok(r) => Ok(Some(wire::decode_receipt(&r.receipt)?)),
            Err(ServiceError::NotFound(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn service_public_key(&self) -> Result<Vec<u8>> {
        let response: ServiceKeyResponse = self.get_json("/service/key")?;
        wire::decode_b64(&response.public_key, "service key")
    }
}

impl Registrar for HttpClient {
    fn register(
        &self,
        container: &ManifestContainer,
        copyright: &str,
        registration_signature: &[u8],
    ) -> Result<(TypedDigest, Receipt)> {
        let request = RegisterRequest {
            container: wire::encode_container(container)?,
            copyright: copyright.to_owned(),
            registration_signature: Some(B64.encode(registration_signature)),
            receipt: None,
        };
        let response: RegisterResponse = self.post_signed("/manifests", &request)?;
        Ok((
            wire::manifest_id_from_hex(&response.manifest_id)?,
            wire::decode_receipt(&response.receipt)?,
        ))
    }
}
