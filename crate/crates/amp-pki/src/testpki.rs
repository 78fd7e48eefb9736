//! Generation of a self-contained test PKI: a self-signed root, a tree of
//! intermediate CAs, and leaf certificates carrying requested purposes.
//!
//! Nodes with children become CAs; childless nodes are signing leaves, so a
//! two-level hierarchy makes the organization certificate itself the leaf.

use std::collections::HashMap;

use rcgen::{
    BasicConstraints, CertificateParams, DistinguishedName, DnType, ExtendedKeyUsagePurpose,
    IsCa, KeyPair,
};

use crate::eku::EkuPurpose;
use crate::keys::KeyHandle;
use crate::{PkiError, Result};

#[derive(Debug, Clone)]
pub struct NodeSpec {
    /// Common name, unique across the whole hierarchy.
    pub name: String,
    /// Purposes placed in the certificate's extended-key-usage extension.
    /// CAs typically leave this empty; leaves need at least one.
    pub purposes: Vec<EkuPurpose>,
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    pub fn leaf(name: &str, purposes: &[EkuPurpose]) -> Self {
        NodeSpec {
            name: name.into(),
            purposes: purposes.to_vec(),
            children: Vec::new(),
        }
    }

    pub fn authority(name: &str, children: Vec<NodeSpec>) -> Self {
        NodeSpec {
            name: name.into(),
            purposes: Vec::new(),
            children,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PkiSpec {
    pub root_name: String,
    pub organizations: Vec<NodeSpec>,
}

/// A ready-to-use signing chain: certificates ordered root→leaf plus the
/// leaf's private key.
#[derive(Debug, Clone)]
pub struct TrustChain {
    pub certificates: Vec<String>,
    pub leaf_key: KeyHandle,
}

struct Issued {
    pem: String,
    key: KeyHandle,
    /// PEM path from the root down to and including this certificate.
    path: Vec<String>,
    is_ca: bool,
}

pub struct TestPki {
    nodes: HashMap<String, Issued>,
    root_name: String,
}

impl TestPki {
    pub fn root_pem(&self) -> &str {
        &self.nodes[&self.root_name].pem
    }

    pub fn certificate_pem(&self, name: &str) -> Option<&str> {
        self.nodes.get(name).map(|n| n.pem.as_str())
    }

    pub fn ca_count(&self) -> usize {
        self.nodes.values().filter(|n| n.is_ca).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.values().filter(|n| !n.is_ca).count()
    }

    /// Chain (root→named certificate) plus the private key for that name.
    pub fn chain_for(&self, name: &str) -> Result<TrustChain> {
        let node = self
            .nodes
            .get(name)
            .ok_or_else(|| PkiError::InvalidArgument(format!("unknown node `{name}`")))?;
        Ok(TrustChain {
            certificates: node.path.clone(),
            leaf_key: node.key.clone(),
        })
    }
}

fn rcgen_keypair(key: &KeyHandle) -> Result<KeyPair> {
    KeyPair::from_pkcs8_pem_and_sign_algo(&key.to_pkcs8_pem()?, &rcgen::PKCS_ECDSA_P256_SHA256)
        .map_err(|e| PkiError::Key(e.to_string()))
}

fn params_for(name: &str, is_ca: bool, purposes: &[EkuPurpose]) -> Result<CertificateParams> {
    let mut params = CertificateParams::new(Vec::<String>::new())
        .map_err(|e| PkiError::InvalidArgument(e.to_string()))?;
    let mut dn = DistinguishedName::new();
    dn.push(DnType::CommonName, name);
    params.distinguished_name = dn;
    if is_ca {
        params.is_ca = IsCa::Ca(BasicConstraints::Unconstrained);
    }
    params.extended_key_usages = purposes
        .iter()
        .map(|p| match p {
            EkuPurpose::ServerAuth => ExtendedKeyUsagePurpose::ServerAuth,
            EkuPurpose::ClientAuth => ExtendedKeyUsagePurpose::ClientAuth,
            EkuPurpose::TimeStamping => ExtendedKeyUsagePurpose::TimeStamping,
            EkuPurpose::ManifestSigning | EkuPurpose::LedgerRegistration => {
                ExtendedKeyUsagePurpose::Other(p.oid().to_vec())
            }
        })
        .collect();
    Ok(params)
}

fn issue_subtree(
    node: &NodeSpec,
    parent_path: &[String],
    issuer: &rcgen::Certificate,
    issuer_key: &KeyPair,
    out: &mut HashMap<String, Issued>,
) -> Result<()> {
    if out.contains_key(&node.name) {
        return Err(PkiError::InvalidArgument(format!(
            "duplicate node name `{}`",
            node.name
        )));
    }
    let is_ca = !node.children.is_empty();
    let key = KeyHandle::generate();
    let keypair = rcgen_keypair(&key)?;
    let cert = params_for(&node.name, is_ca, &node.purposes)?
        .signed_by(&keypair, issuer, issuer_key)
        .map_err(|e| PkiError::Key(e.to_string()))?;
    let mut path = parent_path.to_vec();
    path.push(cert.pem());
    out.insert(
        node.name.clone(),
        Issued {
            pem: cert.pem(),
            key,
            path: path.clone(),
            is_ca,
        },
    );
    for child in &node.children {
        issue_subtree(child, &path, &cert, &keypair, out)?;
    }
    Ok(())
}

pub fn generate_test_pki(spec: &PkiSpec) -> Result<TestPki> {
    if spec.organizations.is_empty() {
        return Err(PkiError::InvalidArgument(
            "hierarchy needs a root plus at least one organization".into(),
        ));
    }
    let root_key = KeyHandle::generate();
    let root_keypair = rcgen_keypair(&root_key)?;
    let root_cert = params_for(&spec.root_name, true, &[])?
        .self_signed(&root_keypair)
        .map_err(|e| PkiError::Key(e.to_string()))?;
    let root_path = vec![root_cert.pem()];

    let mut nodes = HashMap::new();
    nodes.insert(
        spec.root_name.clone(),
        Issued {
            pem: root_cert.pem(),
            key: root_key,
            path: root_path.clone(),
            is_ca: true,
        },
    );
    for org in &spec.organizations {
        if org.name == spec.root_name {
            return Err(PkiError::InvalidArgument(format!(
                "duplicate node name `{}`",
                org.name
            )));
        }
        issue_subtree(org, &root_path, &root_cert, &root_keypair, &mut nodes)?;
    }
    Ok(TestPki {
        nodes,
        root_name: spec.root_name.clone(),
    })
}
