//! Tiny programmatically generated fMP4 streams for tests and demos.
//! MDAT payloads are arbitrary bytes; no codec semantics are involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn raw_box(box_type: &[u8; 4], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 8);
    out.extend_from_slice(&((payload.len() + 8) as u32).to_be_bytes());
    out.extend_from_slice(box_type);
    out.extend_from_slice(payload);
    out
}

/// {MOOV [MOOF MDAT] x num_fragments} with pseudo-random payloads.
pub fn generate_fmp4(seed: u64, num_fragments: u32, mdat_size: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut mvhd_payload = vec![0u8; 100];
    rng.fill(&mut mvhd_payload[..]);
    out.extend(raw_box(b"moov", &raw_box(b"mvhd", &mvhd_payload)));

    for seq in 1..=num_fragments {
        let mut mfhd_payload = vec![0u8; 8];
        mfhd_payload[4..8].copy_from_slice(&seq.to_be_bytes());
        let mut tfhd_payload = vec![0u8; 12];
        rng.fill(&mut tfhd_payload[4..]);
        let traf = raw_box(b"traf", &raw_box(b"tfhd", &tfhd_payload));
        let mut moof_payload = raw_box(b"mfhd", &mfhd_payload);
        moof_payload.extend(traf);
        out.extend(raw_box(b"moof", &moof_payload));

        let mut mdat_payload = vec![0u8; mdat_size];
        rng.fill(&mut mdat_payload[..]);
        out.extend(raw_box(b"mdat", &mdat_payload));
    }
    out
}
