use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::track::PitchTrack;
use crate::PITCH_ANCHOR_HZ;

/// Default RCA tolerance.
pub const RCA_THRESHOLD_CENTS: f64 = 50.0;

/// Pitch in cents above 62.5 Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CentValue(pub f64);

impl CentValue {
    pub fn cents(self) -> f64 {
        self.0
    }

    pub fn to_hz(self) -> f64 {
        cents_to_hz(self)
    }
}

pub fn hz_to_cents(f_hz: f64) -> Result<CentValue> {
    if !(f_hz > 0.0) || !f_hz.is_finite() {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {f_hz}")));
    }
    Ok(CentValue(1200.0 * (f_hz / PITCH_ANCHOR_HZ).log2()))
}

pub fn cents_to_hz(c: CentValue) -> f64 {
    PITCH_ANCHOR_HZ * (c.0 / 1200.0).exp2()
}

/// Hits and evaluated frames, for pooling RCA over many clips.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RcaCounts {
    pub hits: usize,
    pub voiced: usize,
}

impl RcaCounts {
    pub fn add(&mut self, other: RcaCounts) {
        self.hits += other.hits;
        self.voiced += other.voiced;
    }

    pub fn rca(&self) -> Result<f64> {
        if self.voiced == 0 {
            return Err(Error::NoVoicedFrames);
        }
        Ok(self.hits as f64 / self.voiced as f64)
    }
}

/// Counts the reference-voiced frames whose estimate is within the threshold.
/// An estimate without a positive frequency counts as a miss.
pub fn rca_counts(est: &PitchTrack, reference: &PitchTrack, threshold_cents: f64) -> Result<RcaCounts> {
    if est.len() != reference.len() {
        return Err(Error::dim("rca frame count", reference.len(), est.len()));
    }
    let mut counts = RcaCounts::default();
    for (e, r) in est.frames.iter().zip(&reference.frames) {
        if !r.voiced {
            continue;
        }
        let rc = hz_to_cents(r.f0_hz as f64)?;
        counts.voiced += 1;
        if e.f0_hz > 0.0 && (hz_to_cents(e.f0_hz as f64)?.0 - rc.0).abs() < threshold_cents {
            counts.hits += 1;
        }
    }
    Ok(counts)
}

/// Raw cent accuracy over the reference-voiced frames.
pub fn rca(est: &PitchTrack, reference: &PitchTrack, threshold_cents: f64) -> Result<f64> {
    rca_counts(est, reference, threshold_cents)?.rca()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::track::PitchFrame;
    use proptest::prelude::*;

    fn track(f0: &[f32]) -> PitchTrack {
        PitchTrack::new(f0.iter().map(|&f| PitchFrame::voiced(f)).collect())
    }

    fn shift(t: &PitchTrack, cents: f64) -> PitchTrack {
        let mut t = t.clone();
        for f in &mut t.frames {
            f.f0_hz = (f.f0_hz as f64 * (cents / 1200.0).exp2()) as f32;
        }
        t
    }

    #[test]
    fn cent_scale() {
        assert_eq!(hz_to_cents(62.5).unwrap().0, 0.0);
        assert!((hz_to_cents(125.0).unwrap().0 - 1200.0).abs() < 1e-9);
        assert!((hz_to_cents(250.0).unwrap().0 - 2400.0).abs() < 1e-9);
        assert!(hz_to_cents(0.0).is_err());
        assert!(hz_to_cents(-3.0).is_err());
    }

    #[test]
    fn rca_examples() {
        let r = track(&[100.0, 150.0, 200.0, 250.0]);
        assert_eq!(rca(&r, &r, 50.0).unwrap(), 1.0);
        assert_eq!(rca(&shift(&r, 100.0), &r, 50.0).unwrap(), 0.0);
        let mut half = r.clone();
        half.frames[1].f0_hz *= (100.0f64 / 1200.0).exp2() as f32;
        half.frames[3].f0_hz *= (-100.0f64 / 1200.0).exp2() as f32;
        assert_eq!(rca(&half, &r, 50.0).unwrap(), 0.5);
    }

    #[test]
    fn unvoiced_reference_frames_are_ignored() {
        let mut r = track(&[100.0, 100.0, 100.0]);
        r.frames[1] = PitchFrame::unvoiced();
        let e = track(&[100.0, 400.0, 100.0]);
        assert_eq!(rca_counts(&e, &r, 50.0).unwrap(), RcaCounts { hits: 2, voiced: 2 });
        let none = PitchTrack::new(vec![PitchFrame::unvoiced(); 3]);
        assert!(matches!(rca(&e, &none, 50.0), Err(Error::NoVoicedFrames)));
        assert!(rca(&track(&[100.0]), &r, 50.0).is_err());
    }

    proptest! {
        #[test]
        fn cents_round_trip(f in 1.0f64..20_000.0) {
            let back = cents_to_hz(hz_to_cents(f).unwrap());
            prop_assert!(((back - f) / f).abs() < 1e-9);
        }

        #[test]
        fn shift_invariance(
            pairs in proptest::collection::vec(
                (70.0f64..500.0, (-200.0f64..200.0).prop_filter("off threshold", |d| (d.abs() - 50.0).abs() > 0.01)),
                1..40,
            ),
            offset in -600.0f64..600.0,
        ) {
            let build = |off: f64| {
                let r: Vec<f32> = pairs.iter().map(|(f, _)| (f * (off / 1200.0).exp2()) as f32).collect();
                let e: Vec<f32> = pairs.iter().map(|(f, d)| (f * ((off + d) / 1200.0).exp2()) as f32).collect();
                rca_counts(&track(&e), &track(&r), 50.0).unwrap()
            };
            prop_assert_eq!(build(0.0), build(offset));
        }

        #[test]
        fn threshold_monotone(f0 in proptest::collection::vec((70.0f32..500.0, 70.0f32..500.0), 1..40)) {
            let e = track(&f0.iter().map(|p| p.0).collect::<Vec<_>>());
            let r = track(&f0.iter().map(|p| p.1).collect::<Vec<_>>());
            prop_assert!(rca(&e, &r, 50.0).unwrap() >= rca(&e, &r, 25.0).unwrap());
        }
    }
}
