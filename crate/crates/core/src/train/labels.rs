use crate::error::{Error, Result};
use crate::{CENTS_PER_CLASS, NUM_CLASSES, PITCH_ANCHOR_HZ};

/// Nearest 20-cent class above 62.5 Hz, clamped to `0..=191`.
pub fn quantize_pitch(f0_hz: f64) -> Result<usize> {
    if !(f0_hz > 0.0) || !f0_hz.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cannot quantize pitch {f0_hz} Hz; mask unvoiced frames instead"
        )));
    }
    let cents = 1200.0 * (f0_hz / PITCH_ANCHOR_HZ).log2();
    Ok((cents / CENTS_PER_CLASS).round().clamp(0.0, (NUM_CLASSES - 1) as f64) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::class_to_hz;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(quantize_pitch(62.5).unwrap(), 0);
        assert_eq!(quantize_pitch(125.0).unwrap(), 60);
        assert_eq!(quantize_pitch(63.0).unwrap(), 1);
        assert_eq!(quantize_pitch(10_000.0).unwrap(), 191);
        assert_eq!(quantize_pitch(20.0).unwrap(), 0);
        assert!(quantize_pitch(0.0).is_err());
        assert!(quantize_pitch(-1.0).is_err());
    }

    proptest! {
        #[test]
        fn within_ten_cents_inside_range(f in 62.5f64..567.0) {
            let c = quantize_pitch(f).unwrap();
            prop_assert!((1200.0 * (class_to_hz(c) / f).log2()).abs() <= 10.0 + 1e-9);
        }
    }
}
