//! The five extended-key-usage purposes recognized by the system.

/// ServerAuth, ClientAuth, and TimeStamping use their standard OIDs;
/// ManifestSigning and LedgerRegistration use two fixed private OIDs under
/// an example enterprise arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EkuPurpose {
    ServerAuth,
    ClientAuth,
    ManifestSigning,
    TimeStamping,
    LedgerRegistration,
}

pub const OID_SERVER_AUTH: &[u64] = &[1, 3, 6, 1, 5, 5, 7, 3, 1];
pub const OID_CLIENT_AUTH: &[u64] = &[1, 3, 6, 1, 5, 5, 7, 3, 2];
pub const OID_TIME_STAMPING: &[u64] = &[1, 3, 6, 1, 5, 5, 7, 3, 8];
pub const OID_MANIFEST_SIGNING: &[u64] = &[1, 3, 6, 1, 4, 1, 57055, 10, 1];
pub const OID_LEDGER_REGISTRATION: &[u64] = &[1, 3, 6, 1, 4, 1, 57055, 10, 2];

impl EkuPurpose {
    pub const ALL: [EkuPurpose; 5] = [
        EkuPurpose::ServerAuth,
        EkuPurpose::ClientAuth,
        EkuPurpose::ManifestSigning,
        EkuPurpose::TimeStamping,
        EkuPurpose::LedgerRegistration,
    ];

    pub fn oid(&self) -> &'static [u64] {
        match self {
            EkuPurpose::ServerAuth => OID_SERVER_AUTH,
            EkuPurpose::ClientAuth => OID_CLIENT_AUTH,
            EkuPurpose::ManifestSigning => OID_MANIFEST_SIGNING,
            EkuPurpose::TimeStamping => OID_TIME_STAMPING,
            EkuPurpose::LedgerRegistration => OID_LEDGER_REGISTRATION,
        }
    }

    pub fn oid_string(&self) -> String {
        self.oid()
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_purposes_have_distinct_oids() {
        let mut oids: Vec<String> = EkuPurpose::ALL.iter().map(|p| p.oid_string()).collect();
        oids.sort();
        oids.dedup();
        assert_eq!(oids.len(), 5);
    }
}
