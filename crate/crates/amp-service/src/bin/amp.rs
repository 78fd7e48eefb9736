//! `amp`: publish, verify, revoke, watermark, benchmark, and serve.
//!
//! Exit codes for `verify`: 0 authenticated, 2 unverified, 3 tampered,
//! 4 revoked. All other commands exit 0 on success and 1 on error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use amp_core::{compute_manifest_id, decode_canonical_cbor, encode_canonical_cbor, encode_canonical_json, ManifestContainer, Timestamp};
use amp_ledger::{benchmark_ingest, verify_receipt_offline, LedgerEntry};
use amp_pki::{sign_manifest, EkuPurpose, KeyHandle, TrustChain, TrustPolicy};
use amp_service::wire::{manifest_id_from_hex, split_pem_chain};
use amp_service::{
    playback_verify_flow, publish_flow, AmpService, HttpClient, PublishOptions, Registrar,
};
use amp_watermark::{
    build_payload, embed_pcm, extract_pcm, read_wav_mono16, write_wav_mono16, EmbedParams,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "amp", about = "Media provenance: manifests, ledger receipts, watermarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Credentials {
    /// PKCS#8 PEM private key of the signing leaf.
    #[arg(long)]
    key: PathBuf,
    /// PEM file with the certificate chain, root first, leaf last.
    #[arg(long)]
    chain: PathBuf,
}

impl Credentials {
    fn load(&self) -> anyhow::Result<TrustChain> {
        let key = KeyHandle::from_pkcs8_pem(&fs::read_to_string(&self.key)?)?;
        let certificates = split_pem_chain(&fs::read_to_string(&self.chain)?);
        if certificates.is_empty() {
            anyhow::bail!("no certificates in {:?}", self.chain);
        }
        Ok(TrustChain {
            certificates,
            leaf_key: key,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create, sign, and register a manifest over media files.
    Create {
        /// Media files covered by one manifest.
        media: Vec<PathBuf>,
        #[arg(long, default_value = "publisher")]
        publisher: String,
        #[arg(long, default_value = "untitled")]
        title: String,
        #[arg(long, default_value = "all rights reserved")]
        copyright: String,
        /// Chunk size in bytes for file-offset chunking.
        #[arg(long, default_value_t = amp_chunking::DEFAULT_CHUNK_SIZE)]
        chunk_size: u64,
        /// Merkle tree row to encode for fMP4 media (0 root, -1 leaves).
        #[arg(long, allow_hyphen_values = true)]
        encoded_row: Option<i64>,
        /// Manifest id (hex) of the origin work; marks this as transcoded.
        #[arg(long)]
        origin: Option<String>,
        /// MediaID override, hex.
        #[arg(long)]
        media_id: Option<String>,
        /// Watermark WAV inputs, pointing at this master-copy locator.
        #[arg(long)]
        watermark_locator: Option<String>,
        /// Service base URL, e.g. http://127.0.0.1:8700
        #[arg(long)]
        service: String,
        #[command(flatten)]
        credentials: Credentials,
    },
    /// Sign an existing manifest sidecar in place.
    Sign {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        credentials: Credentials,
    },
    /// Register a signed manifest with the service and save the receipt.
    Register {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        service: String,
        #[arg(long, default_value = "all rights reserved")]
        copyright: String,
        #[command(flatten)]
        credentials: Credentials,
    },
    /// Verify a media file against the service.
    Verify {
        media: PathBuf,
        #[arg(long)]
        service: String,
        /// PEM file with the trusted root certificate.
        #[arg(long)]
        root_ca: PathBuf,
    },
    /// Revoke a registered manifest.
    Revoke {
        /// Manifest id, hex.
        #[arg(long)]
        manifest_id: String,
        #[arg(long)]
        service: String,
        #[command(flatten)]
        credentials: Credentials,
    },
    /// Embed or extract the fragile audio watermark.
    #[command(subcommand)]
    Watermark(WatermarkCommand),
    /// Run the single-node ledger ingest benchmark.
    Bench {
        #[arg(long, default_value_t = 2)]
        clients: usize,
        #[arg(long, default_value_t = 5)]
        seconds: u64,
    },
    /// Run the REST service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8700")]
        listen: String,
        /// PEM file with the trusted root certificate.
        #[arg(long)]
        root_ca: PathBuf,
        /// PKCS#8 PEM private key the service endorses roots with; a fresh
        /// key is generated when omitted.
        #[arg(long)]
        key: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum WatermarkCommand {
    Embed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// MediaID, hex.
        #[arg(long)]
        media_id: String,
        #[arg(long)]
        locator: String,
        #[command(flatten)]
        credentials: Credentials,
    },
    Extract {
        #[arg(long)]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Create {
            media,
            publisher,
            title,
            copyright,
            chunk_size,
            encoded_row,
            origin,
            media_id,
            watermark_locator,
            service,
            credentials,
        } => {
            let chain = credentials.load()?;
            let options = PublishOptions {
                publisher,
                title,
                copyright,
                chunk_size,
                encoded_row,
                origin: origin.as_deref().map(manifest_id_from_hex).transpose()?,
                media_id: media_id.as_deref().map(hex::decode).transpose()?,
                watermark_locator,
            };
            let client = HttpClient::with_credentials(&service, chain.clone());
            let outcome = publish_flow(&media, &chain, &options, &client)?;
            println!(
                "registered {} -> {}",
                hex::encode(&outcome.manifest_id.value),
                outcome.manifest_path.display()
            );
            Ok(0)
        }
        Command::Sign {
            manifest,
            credentials,
        } => {
            let chain = credentials.load()?;
            let mut container: ManifestContainer =
                decode_canonical_cbor(&fs::read(&manifest)?)?;
            container.publisher_attestation =
                Some(sign_manifest(&container.core_manifest, &chain)?);
            fs::write(&manifest, encode_canonical_cbor(&container)?)?;
            if let Some(json_path) = manifest.to_str().map(|p| p.replace(".cbor", ".json")) {
                fs::write(json_path, encode_canonical_json(&container)?)?;
            }
            println!("signed {}", manifest.display());
            Ok(0)
        }
        Command::Register {
            manifest,
            service,
            copyright,
            credentials,
        } => {
            let chain = credentials.load()?;
            let container: ManifestContainer = decode_canonical_cbor(&fs::read(&manifest)?)?;
            let manifest_id = compute_manifest_id(&container.core_manifest)?;
            let signature = chain
                .leaf_key
                .sign_raw(&LedgerEntry::signed_message(&manifest_id, &copyright));
            let client = HttpClient::with_credentials(&service, chain);
            let (id, receipt) = client.register(&container, &copyright, &signature)?;
            let receipt_path = manifest.with_extension("receipt.cbor");
            fs::write(&receipt_path, encode_canonical_cbor(&receipt)?)?;
            println!(
                "registered {} receipt -> {}",
                hex::encode(&id.value),
                receipt_path.display()
            );
            Ok(0)
        }
        Command::Verify {
            media,
            service,
            root_ca,
        } => {
            let root = fs::read_to_string(&root_ca)?;
            let policy = TrustPolicy::new(&root, EkuPurpose::ManifestSigning, Timestamp::now());
            let client = HttpClient::new(&service);
            let report = playback_verify_flow(&media, &client, &policy);
            println!("{}", report.to_json());
            Ok(report.status.exit_code())
        }
        Command::Revoke {
            manifest_id,
            service,
            credentials,
        } => {
            let chain = credentials.load()?;
            let id = manifest_id_from_hex(&manifest_id)?;
            let signature = chain
                .leaf_key
                .sign_raw(&LedgerEntry::signed_message(&id, "revocation"));
            let client = HttpClient::with_credentials(&service, chain.clone());
            let index = client.revoke(&id, &signature, &chain.certificates)?;
            println!("revoked {manifest_id} at ledger index {index}");
            Ok(0)
        }
        Command::Watermark(WatermarkCommand::Embed {
            input,
            output,
            media_id,
            locator,
            credentials,
        }) => {
            let chain = credentials.load()?;
            let (rate, samples) = read_wav_mono16(&input)?;
            let (_payload, bits) = build_payload(&hex::decode(media_id)?, &locator, &chain)?;
            let marked = embed_pcm(&samples, &bits, &EmbedParams::default())?;
            write_wav_mono16(&output, rate, &marked)?;
            println!("embedded {} bits into {}", bits.len(), output.display());
            Ok(0)
        }
        Command::Watermark(WatermarkCommand::Extract { input }) => {
            let (_rate, samples) = read_wav_mono16(&input)?;
            match extract_pcm(&samples, &EmbedParams::default()) {
                Some(payload) => {
                    println!(
                        "{}",
                        serde_json::json!({
                            "media_id": hex::encode(&payload.media_id),
                            "master_copy_locator": payload.master_copy_locator,
                        })
                    );
                    Ok(0)
                }
                None => {
                    println!("no watermark detected");
                    Ok(2)
                }
            }
        }
        Command::Bench { clients, seconds } => {
            let run = benchmark_ingest(clients, Duration::from_secs(seconds))?;
            println!("{}", run.report.to_json());
            let verified = run
                .samples
                .iter()
                .all(|(container, receipt)| {
                    verify_receipt_offline(container, receipt, &run.service_public_key).is_valid()
                });
            println!("sampled receipts verify offline: {verified}");
            Ok(0)
        }
        Command::Serve {
            listen,
            root_ca,
            key,
        } => {
            let root = fs::read_to_string(&root_ca)?;
            let service_key = match key {
                Some(path) => KeyHandle::from_pkcs8_pem(&fs::read_to_string(path)?)?,
                None => KeyHandle::generate(),
            };
            let policy = TrustPolicy::new(&root, EkuPurpose::ManifestSigning, Timestamp::now());
            let service = Arc::new(AmpService::new(service_key, policy));
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&listen).await?;
                eprintln!("serving on {listen}");
                amp_service::rest::serve(service, listener).await
            })?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
