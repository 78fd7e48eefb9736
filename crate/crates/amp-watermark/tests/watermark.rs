//! End-to-end behavior of the fragile audio watermark: exact recovery on
//! clean audio, a measured false-positive rate on unwatermarked audio,
//! destruction under heavy editing, and a bounded energy footprint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use amp_pki::{generate_test_pki, EkuPurpose, NodeSpec, PkiSpec, TestPki, TrustChain};
use amp_watermark::spread::DETECTION_THRESHOLD;
use amp_watermark::{
    build_payload, embed_pcm, extract_pcm, multi_sine, read_wav_mono16, verify_payload,
    watermark_energy_ratio_db, write_wav_mono16, EmbedParams, WatermarkPayload,
};

const SAMPLE_RATE: u32 = 48_000;
const LOCATOR: &str = "https://media.example.test/masters/clip-0001";

fn signer() -> (TestPki, TrustChain) {
    let pki = generate_test_pki(&PkiSpec {
        root_name: "watermark root".into(),
        organizations: vec![NodeSpec::authority(
            "studio",
            vec![NodeSpec::leaf("studio signer", &[EkuPurpose::ManifestSigning])],
        )],
    })
    .expect("test pki");
    let chain = pki.chain_for("studio signer").expect("signer chain");
    (pki, chain)
}

fn carrier(samples: usize) -> Vec<i16> {
    multi_sine(SAMPLE_RATE, samples, &[220.0, 330.0, 495.0, 742.5])
}

fn marked_fixture() -> (TestPki, TrustChain, WatermarkPayload, Vec<i16>, Vec<i16>) {
    let (pki, chain) = signer();
    let (payload, bits) = build_payload(&[0xAB; 16], LOCATOR, &chain).expect("payload");
    assert!(
        bits.len() >= 1_000,
        "fixture payload spans {} bits; the recovery loop needs at least 1,000",
        bits.len()
    );
    let original = carrier(800_000);
    let marked = embed_pcm(&original, &bits, &EmbedParams::default()).expect("embed");
    (pki, chain, payload, original, marked)
}

#[test]
fn embedded_payload_is_recovered_bit_exactly() {
    let (_pki, chain, payload, _original, marked) = marked_fixture();
    let recovered = extract_pcm(&marked, &EmbedParams::default()).expect("watermark present");
    assert_eq!(recovered, payload);

    let leaf_pem = chain.certificates.last().unwrap().clone();
    let (media_id, locator) =
        verify_payload(&recovered, |loc: &str| (loc == LOCATOR).then(|| leaf_pem.clone()))
            .expect("signature intact");
    assert_eq!(media_id, vec![0xAB; 16]);
    assert_eq!(locator, LOCATOR);
}

#[test]
fn recovery_survives_noise_well_below_the_mark() {
    let (_pki, _chain, payload, _original, marked) = marked_fixture();
    let params = EmbedParams::default();
    let noise_amp = params.strength / 4.0
        * (marked.iter().map(|s| (*s as f64).powi(2)).sum::<f64>() / marked.len() as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noisy: Vec<i16> = marked
        .iter()
        .map(|s| {
            let v = *s as f64 + noise_amp * (rng.gen::<f64>() * 2.0 - 1.0);
            v.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
        })
        .collect();
    let recovered = extract_pcm(&noisy, &params).expect("mark survives light noise");
    assert_eq!(recovered, payload);
}

#[test]
fn false_positive_rate_is_below_one_percent() {
    // 1,000 unwatermarked signals, both tonal and noise-like. A detection
    // on any of them is a false positive; the budget is under 1%.
    let params = EmbedParams::default();
    let mut false_positives = 0usize;
    for trial in 0..1_000u64 {
        let signal = if trial % 2 == 0 {
            let f = 100.0 + (trial as f64) * 1.7;
            multi_sine(SAMPLE_RATE, 64_000, &[f, f * 1.5, f * 2.25])
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(trial);
            (0..64_000)
                .map(|_| (rng.gen::<f64>() * 16_000.0 - 8_000.0) as i16)
                .collect()
        };
        if extract_pcm(&signal, &params).is_some() {
            false_positives += 1;
        }
    }
    assert!(
        false_positives < 10,
        "{false_positives} false positives in 1,000 unwatermarked signals"
    );
}

#[test]
fn replacing_half_the_audio_destroys_the_mark() {
    // Heavy editing must erase the watermark or break its signature: a
    // verified payload surviving the edit would defeat the fragile design.
    let (_pki, chain, _payload, _original, marked) = marked_fixture();
    let leaf_pem = chain.certificates.last().unwrap().clone();
    let params = EmbedParams::default();
    let half = marked.len() / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let start = rng.gen_range(0..marked.len() - half);
        let mut edited = marked.clone();
        edited[start..start + half].fill(0);
        if let Some(recovered) = extract_pcm(&edited, &params) {
            assert!(
                verify_payload(&recovered, |loc: &str| (loc == LOCATOR)
                    .then(|| leaf_pem.clone()))
                .is_err(),
                "verified payload survived a 50% replacement starting at {start}"
            );
        }
    }
}

#[test]
fn watermark_energy_stays_below_minus_thirty_db() {
    let (_pki, _chain, _payload, original, marked) = marked_fixture();
    let ratio = watermark_energy_ratio_db(&original, &marked);
    assert!(
        ratio <= -30.0,
        "watermark energy ratio {ratio:.2} dB exceeds -30 dB"
    );
}

#[test]
fn detection_scores_sit_far_from_the_threshold_on_both_sides() {
    // The accept threshold should split cleanly: a fresh embedding scores
    // well above it, and no header sync even fires on clean audio.
    let (_pki, _chain, _payload, original, marked) = marked_fixture();
    let params = EmbedParams::default();
    assert!(extract_pcm(&marked, &params).is_some());
    assert!(extract_pcm(&original, &params).is_none());
    assert!(DETECTION_THRESHOLD >= 0.2 && DETECTION_THRESHOLD <= 0.5);
}

#[test]
fn wav_files_carry_the_mark_across_disk() {
    let (_pki, _chain, payload, _original, marked) = marked_fixture();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("marked.wav");
    write_wav_mono16(&path, SAMPLE_RATE, &marked).unwrap();
    let (rate, loaded) = read_wav_mono16(&path).unwrap();
    assert_eq!(rate, SAMPLE_RATE);
    assert_eq!(loaded, marked);
    let recovered = extract_pcm(&loaded, &EmbedParams::default()).expect("mark on disk");
    assert_eq!(recovered, payload);
}
