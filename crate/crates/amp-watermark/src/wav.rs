//! Minimal RIFF/WAVE I/O for 16-bit mono PCM.

use std::fs;
use std::path::Path;

use crate::{Result, WatermarkError};

/// Write samples as a 16-bit mono PCM WAV file.
pub fn write_wav_mono16(path: &Path, sample_rate: u32, samples: &[i16]) -> Result<()> {
    let data_len = samples.len() as u32 * 2;
    let byte_rate = sample_rate * 2;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read a 16-bit mono PCM WAV file, returning (sample_rate, samples).
/// Chunks other than `fmt ` and `data` are skipped.
pub fn read_wav_mono16(path: &Path) -> Result<(u32, Vec<i16>)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WatermarkError::BadWav("missing RIFF/WAVE header".into()));
    }
    let mut sample_rate = None;
    let mut data = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let len = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = pos + 8 + len;
        if body_end > bytes.len() {
            return Err(WatermarkError::BadWav("truncated chunk".into()));
        }
        let body = &bytes[pos + 8..body_end];
        match id {
            b"fmt " => {
                if len < 16 {
                    return Err(WatermarkError::BadWav("short fmt chunk".into()));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                if format != 1 || channels != 1 || bits != 16 {
                    return Err(WatermarkError::BadWav(format!(
                        "unsupported format {format}/{channels}ch/{bits}bit; need PCM mono 16-bit"
                    )));
                }
                sample_rate = Some(u32::from_le_bytes(body[4..8].try_into().unwrap()));
            }
            b"data" => {
                if len % 2 != 0 {
                    return Err(WatermarkError::BadWav("odd data length".into()));
                }
                data = Some(
                    body.chunks_exact(2)
                        .map(|c| i16::from_le_bytes([c[0], c[1]]))
                        .collect::<Vec<_>>(),
                );
            }
            _ => {}
        }
        // Chunk bodies are word-aligned with an implicit pad byte.
        pos = body_end + (len % 2);
    }
    match (sample_rate, data) {
        (Some(rate), Some(samples)) => Ok((rate, samples)),
        (None, _) => Err(WatermarkError::BadWav("missing fmt chunk".into())),
        (_, None) => Err(WatermarkError::BadWav("missing data chunk".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::multi_sine;

    #[test]
    fn round_trip_preserves_samples_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tone.wav");
        let samples = multi_sine(48_000, 10_000, &[220.0, 311.0]);
        write_wav_mono16(&path, 48_000, &samples).unwrap();
        let (rate, back) = read_wav_mono16(&path).unwrap();
        assert_eq!(rate, 48_000);
        assert_eq!(back, samples);
    }

    #[test]
    fn stereo_and_garbage_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        std::fs::write(&path, b"not a wav at all").unwrap();
        assert!(matches!(
            read_wav_mono16(&path),
            Err(WatermarkError::BadWav(_))
        ));

        // Re-write a valid file, then flip the channel count to 2.
        write_wav_mono16(&path, 44_100, &[0i16; 64]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[22] = 2;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_wav_mono16(&path),
            Err(WatermarkError::BadWav(_))
        ));
    }
}
