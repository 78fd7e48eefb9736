//! Deterministic audio fixtures for tests and the CLI demo path.

/// A low-frequency multi-sine carrier: the sum of a few tones well below
/// the chip rate, scaled to roughly half of full scale. Deterministic in
/// its arguments, so fixtures are reproducible across runs.
pub fn multi_sine(sample_rate: u32, samples: usize, tones_hz: &[f64]) -> Vec<i16> {
    let amplitude = 0.5 * i16::MAX as f64 / tones_hz.len().max(1) as f64;
    (0..samples)
        .map(|n| {
            let t = n as f64 / sample_rate as f64;
            let s: f64 = tones_hz
                .iter()
                .map(|f| amplitude * (2.0 * std::f64::consts::PI * f * t).sin())
                .sum();
            s.round().clamp(i16::MIN as f64, i16::MAX as f64) as i16
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_deterministic_and_bounded() {
        let a = multi_sine(48_000, 4_096, &[220.0, 330.0, 495.0]);
        let b = multi_sine(48_000, 4_096, &[220.0, 330.0, 495.0]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4_096);
        let peak = a.iter().map(|s| (*s as i32).abs()).max().unwrap();
        assert!(peak > 4_000 && peak < i16::MAX as i32);
    }
}
