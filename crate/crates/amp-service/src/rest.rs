//! REST surface over [`AmpService`]. Mutating routes demand a ClientAuth
//! certificate chain and a signature over the request body, carried in
//! headers; read routes are open.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;

use crate::service::AmpService;
use crate::wire::{
    self, ErrorResponse, ManifestResponse, QueryResponse, ReceiptResponse, RegisterRequest,
    RegisterResponse, RevocationRequest, RevocationResponse, ServiceKeyResponse, CHAIN_HEADER,
    SIGNATURE_HEADER,
};
use crate::ServiceError;

pub fn router(service: Arc<AmpService>) -> Router {
    Router::new()
        .route("/manifests", post(post_manifest))
        .route("/manifests/:id", get(get_manifest))
        .route("/query", get(get_query))
        .route("/receipts/:id", get(get_receipt))
        .route("/revocations", post(post_revocation))
        .route("/service/key", get(get_service_key))
        .with_state(service)
}

/// Serve until the task is dropped or the process exits.
pub async fn serve(service: Arc<AmpService>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(service)).await
}

fn error_response(status: StatusCode, err: impl std::fmt::Display) -> Response {
    (
        status,
        Json(ErrorResponse {
            error: err.to_string(),
        }),
    )
        .into_response()
}

fn reject(err: ServiceError) -> Response {
    let status = match &err {
        ServiceError::Unauthorized(_) => StatusCode::UNAUTHORIZED,
        ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
        ServiceError::InvalidArgument(_) | ServiceError::Core(_) => StatusCode::BAD_REQUEST,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    };
    error_response(status, err)
}

fn authenticate(service: &AmpService, headers: &HeaderMap, body: &[u8]) -> Result<(), Response> {
    let field = |name: &str| {
        headers
            .get(name)
            .and_then(|v| v.to_str().ok())
            .ok_or_else(|| {
                error_response(
                    StatusCode::UNAUTHORIZED,
                    format!("missing or unreadable {name} header"),
                )
            })
    };
    let chain_b64 = field(CHAIN_HEADER)?;
    let signature_b64 = field(SIGNATURE_HEADER)?;
    let decode = |text: &str, what: &str| {
        B64.decode(text)
            .map_err(|e| error_response(StatusCode::UNAUTHORIZED, format!("bad {what}: {e}")))
    };
    let chain_pem = String::from_utf8(decode(chain_b64, "chain header")?)
        .map_err(|e| error_response(StatusCode::UNAUTHORIZED, e))?;
    let chain = wire::split_pem_chain(&chain_pem);
    let signature = decode(signature_b64, "signature header")?;
    service
        .verify_client(body, &chain, &signature)
        .map_err(reject)
}

async fn post_manifest(
    State(service): State<Arc<AmpService>>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    if let Err(resp) = authenticate(&service, &headers, &body) {
        return resp;
    }
    let request: RegisterRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, e),
    };
    let run = || -> crate::Result<RegisterResponse> {
        let container = wire::decode_container(&request.container)?;
        let signature = request
            .registration_signature
            .as_deref()
            .map(|s| wire::decode_b64(s, "registration_signature"))
            .transpose()?
            .unwrap_or_default();
        let receipt = request
            .receipt
            .as_deref()
            .map(wire::decode_receipt)
            .transpose()?;
        let (manifest_id, receipt) =
            service.register(&container, &request.copyright, &signature, receipt)?;
        Ok(RegisterResponse {
            manifest_id: wire::manifest_id_hex(&manifest_id),
            receipt: wire::encode_receipt(&receipt)?,
        })
    };
    match run() {
        Ok(resp) => (StatusCode::OK, Json(resp)).into_response(),
        Err(e) => reject(e),
    }
}

async fn get_manifest(
    State(service): State<Arc<AmpService>>,
    Path(id): Path<String>,
) -> Response {
    let run = || -> crate::Result<ManifestResponse> {
        let id = wire::manifest_id_from_hex(&id)?;
        let (container, revoked) = service
            .manifest(&id)
            .ok_or_else(|| ServiceError::NotFound("unknown manifest".into()))?;
        Ok(ManifestResponse {
            container: wire::encode_container(&container)?,
            revoked,
        })
    };
    match run() {
        Ok(resp) => (StatusCode::OK, Json(resp)).into_response(),
        Err(e) => reject(e),
    }
}

async fn get_receipt(State(service): State<Arc<AmpService>>, Path(id): Path<String>) -> Response {
    let run = || -> crate::Result<ReceiptResponse> {
        let id = wire::manifest_id_from_hex(&id)?;
        let receipt = service
            .receipt(&id)
            .ok_or_else(|| ServiceError::NotFound("unknown manifest".into()))?;
        Ok(ReceiptResponse {
            receipt: wire::encode_receipt(&receipt)?,
        })
    };
    match run() {
        Ok(resp) => (StatusCode::OK, Json(resp)).into_response(),
        Err(e) => reject(e),
    }
}

async fn get_query(
    State(service): State<Arc<AmpService>>,
    Query(params): Query<Vec<(String, String)>>,
) -> Response {
    let run = || -> crate::Result<QueryResponse> {
        let mut by_key: HashMap<&str, Vec<Vec<u8>>> = HashMap::new();
        for (key, value) in &params {
            let bytes = hex::decode(value)
                .map_err(|e| ServiceError::InvalidArgument(format!("bad hex in {key}: {e}")))?;
            by_key.entry(key.as_str()).or_default().push(bytes);
        }
        let ids = if let Some(media_ids) = by_key.get("media_id") {
            media_ids
                .iter()
                .flat_map(|m| service.query_media_id(m))
                .collect()
        } else if let Some(objects) = by_key.get("object_digest") {
            objects
                .iter()
                .flat_map(|d| service.query_object_digest(d))
                .collect()
        } else if let Some(chunks) = by_key.get("chunk_digest") {
            service.query_chunk_digests(chunks)
        } else {
            return Err(ServiceError::InvalidArgument(
                "expected media_id, object_digest, or chunk_digest".into(),
            ));
        };
        Ok(QueryResponse {
            manifest_ids: ids.iter().map(wire::manifest_id_hex).collect(),
        })
    };
    match run() {
        Ok(resp) => (StatusCode::OK, Json(resp)).into_response(),
        Err(e) => reject(e),
    }
}

async fn post_revocation(
    State(service): State<Arc<AmpService>>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    if let Err(resp) = authenticate(&service, &headers, &body) {
        return resp;
    }
    let request: RevocationRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, e),
    };
    let run = || -> crate::Result<RevocationResponse> {
        let manifest_id = wire::manifest_id_from_hex(&request.manifest_id)?;
        let signature = wire::decode_b64(&request.evidence.signature, "evidence signature")?;
        let (ledger_index, receipt) =
            service.revoke(&manifest_id, &signature, &request.evidence.chain)?;
        Ok(RevocationResponse {
            ledger_index,
            receipt: wire::encode_receipt(&receipt)?,
        })
    };
    match run() {
        Ok(resp) => (StatusCode::OK, Json(resp)).into_response(),
        Err(e) => reject(e),
    }
}

async fn get_service_key(State(service): State<Arc<AmpService>>) -> Response {
    (
        StatusCode::OK,
        Json(ServiceKeyResponse {
            algorithm: "p256".into(),
            public_key: B64.encode(service.service_public_key()),
        }),
    )
        .into_response()
}
