use crate::{CENTS_PER_CLASS, NUM_CLASSES, PITCH_ANCHOR_HZ};

/// Centre frequency of pitch class `class`: `62.5 · 2^(20·class/1200)` Hz.
pub fn class_to_hz(class: usize) -> f64 {
    PITCH_ANCHOR_HZ * 2f64.powf(CENTS_PER_CLASS * class as f64 / 1200.0)
}

/// Highest representable pitch (class 191), about 567.75 Hz.
pub fn max_class_hz() -> f64 {
    class_to_hz(NUM_CLASSES - 1)
}

/// Probability distribution over pitch classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchClassDist {
    probs: Vec<f32>,
}

impl PitchClassDist {
    /// Softmax with max subtraction. Probabilities underflow to zero only
    /// for logits more than ~100 below the maximum.
    pub fn from_logits(logits: &[f32]) -> Self {
        let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max);
        let exps: Vec<f64> = logits.iter().map(|&l| ((l - max) as f64).exp()).collect();
        let sum: f64 = exps.iter().sum();
        PitchClassDist {
            probs: exps.iter().map(|&e| (e / sum) as f32).collect(),
        }
    }

    pub fn one_hot(class: usize, classes: usize) -> Self {
        let mut probs = vec![0.0; classes];
        probs[class] = 1.0;
        PitchClassDist { probs }
    }

    pub fn from_probs(probs: Vec<f32>) -> Self {
        PitchClassDist { probs }
    }

    pub fn probs(&self) -> &[f32] {
        &self.probs
    }

    /// Most likely class, ties toward the lower index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    /// `(f0 in Hz, confidence)` of the most likely class.
    pub fn decode(&self) -> (f64, f32) {
        let c = self.argmax();
        (class_to_hz(c), self.probs[c])
    }
}

/// See [`PitchClassDist::decode`].
pub fn pitch_decode(dist: &PitchClassDist) -> (f64, f32) {
    dist.decode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_examples() {
        assert_eq!(pitch_decode(&PitchClassDist::one_hot(0, 192)).0, 62.5);
        assert!((pitch_decode(&PitchClassDist::one_hot(60, 192)).0 - 125.0).abs() < 1e-9);
        let top = pitch_decode(&PitchClassDist::one_hot(191, 192)).0;
        assert!((top - 62.5 * 2f64.powf(3820.0 / 1200.0)).abs() < 1e-9);
        assert!((top - 567.75).abs() < 0.01);
    }

    #[test]
    fn ties_go_to_lower_class() {
        let d = PitchClassDist::from_logits(&[0.0; 192]);
        assert_eq!(d.argmax(), 0);
        assert!(d.probs().iter().all(|&p| (p - 1.0 / 192.0).abs() < 1e-7));
    }

    proptest! {
        #[test]
        fn softmax_is_a_distribution(logits in proptest::collection::vec(-80f32..80.0, 192)) {
            let d = PitchClassDist::from_logits(&logits);
            let sum: f64 = d.probs().iter().map(|&p| p as f64).sum();
            prop_assert!((sum - 1.0).abs() < 1e-5);
            prop_assert!(d.probs().iter().all(|&p| p >= 0.0));
        }
    }
}
