//! Receipt verification with no service connectivity: everything is
//! recomputed from the manifest, the receipt, and the service public key.

use amp_core::{compute_manifest_id, ManifestContainer};
use amp_pki::keys::verify_raw;

use crate::entry::entry_digest;
use crate::ledger::{Receipt, SignedTreeRoot};
use crate::tree::fold_path;

/// Outcome of an offline receipt check; anything but `Valid` carries the
/// first failed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiptCheck {
    Valid,
    /// The receipt's entry is not about this manifest.
    ManifestMismatch,
    /// The entry does not hash to the digest the receipt claims.
    EntryDigestMismatch,
    /// The inclusion path does not fold to the signed root.
    PathMismatch,
    /// The root signature does not verify under the service key.
    EndorsementFailure,
}

impl ReceiptCheck {
    pub fn is_valid(self) -> bool {
        self == ReceiptCheck::Valid
    }
}

pub fn verify_receipt_offline(
    manifest: &ManifestContainer,
    receipt: &Receipt,
    service_public_key: &[u8],
) -> ReceiptCheck {
    // Step 1: the manifest hashes to the id the entry records.
    match compute_manifest_id(&manifest.core_manifest) {
        Ok(id) if id == receipt.entry.manifest_id => {}
        _ => return ReceiptCheck::ManifestMismatch,
    }
    verify_receipt_structure(receipt, service_public_key)
}

/// The manifest-independent part of the check: entry digest, path fold,
/// and root endorsement.
pub fn verify_receipt_structure(receipt: &Receipt, service_public_key: &[u8]) -> ReceiptCheck {
    match entry_digest(&receipt.entry, &receipt.entry.manifest_id.algorithm) {
        Ok(d) if d == receipt.entry_digest => {}
        _ => return ReceiptCheck::EntryDigestMismatch,
    }
    let root = &receipt.signed_root;
    match fold_path(
        receipt.entry.index,
        root.tree_size,
        &receipt.entry_digest,
        &receipt.inclusion_path,
        &receipt.entry.manifest_id.algorithm,
    ) {
        Ok(folded) if folded == root.root_hash => {}
        _ => return ReceiptCheck::PathMismatch,
    }
    let message =
        SignedTreeRoot::signed_message(root.tree_size, &root.root_hash, root.signing_time);
    if verify_raw(service_public_key, &message, &root.service_signature).is_err() {
        return ReceiptCheck::EndorsementFailure;
    }
    ReceiptCheck::Valid
}
