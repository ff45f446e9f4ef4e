//! Short-term linear prediction: autocorrelation method with Levinson-Durbin.
//!
//! The predictor is `x̂[n] = Σ a[i] x[n-1-i]`, so the residual is
//! `e[n] = x[n] - Σ a[i] x[n-1-i]`.

use std::f64::consts::PI;

use crate::audio::AudioClip;
use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 16;

/// Gaussian lag window width, in cycles per sample (32 Hz at 16 kHz).
const LAG_WINDOW_BW: f64 = 0.002;
/// White-noise correction applied to r[0] (-40 dB).
const NOISE_FLOOR: f64 = 1e-4;
/// r[0] below this is treated as silence.
const MIN_ENERGY: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    coeffs: Vec<f64>,
    reflection: Vec<f64>,
}

impl LpcModel {
    /// All-zero predictor: the residual equals the input.
    pub fn identity(order: usize) -> Self {
        LpcModel {
            coeffs: vec![0.0; order],
            reflection: vec![0.0; order],
        }
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        let order = coeffs.len();
        LpcModel {
            coeffs,
            reflection: vec![0.0; order],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn reflection(&self) -> &[f64] {
        &self.reflection
    }

    /// True when every reflection coefficient has magnitude below one.
    pub fn is_minimum_phase(&self) -> bool {
        self.reflection.iter().all(|k| k.abs() < 1.0)
    }

    /// Prediction residual of `x[start..]`, using `x[..start]` as filter history.
    pub fn residual_from(&self, x: &[f64], start: usize, out: &mut Vec<f64>) {
        out.clear();
        out.reserve(x.len() - start);
        let p = self.coeffs.len();
        for n in start..x.len() {
            let taps = p.min(n);
            let mut pred = 0.0;
            for i in 0..taps {
                pred += self.coeffs[i] * x[n - 1 - i];
            }
            out.push(x[n] - pred);
        }
    }
}

pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| {
            if k >= x.len() {
                0.0
            } else {
                x[k..].iter().zip(x).map(|(a, b)| a * b).sum()
            }
        })
        .collect()
}

/// Levinson-Durbin recursion on an autocorrelation sequence `r[0..=order]`.
///
/// Stops early (remaining coefficients zero) if the recursion would produce a
/// reflection coefficient of magnitude ≥ 1.
pub fn levinson_durbin(r: &[f64], order: usize) -> LpcModel {
    assert!(r.len() > order, "need order+1 autocorrelation values");
    let mut model = LpcModel::identity(order);
    if r[0] <= MIN_ENERGY {
        return model;
    }
    let mut err = r[0];
    let mut a = vec![0.0; order];
    let mut prev = vec![0.0; order];
    for i in 0..order {
        let mut acc = r[i + 1];
        for j in 0..i {
            acc -= a[j] * r[i - j];
        }
        let k = acc / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            break;
        }
        prev[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        a[i] = k;
        model.reflection[i] = k;
        err *= 1.0 - k * k;
        if err <= 0.0 {
            break;
        }
    }
    model.coeffs = a;
    model
}

/// LPC analysis of one context window.
///
/// The context is Hann-windowed, its autocorrelation multiplied by a Gaussian
/// lag window and r[0] raised by a -40 dB noise floor before the recursion.
/// Zero-energy input yields the identity predictor.
pub fn lpc_analyze(context: &[f64], order: usize) -> Result<LpcModel> {
    if order >= context.len() {
        return Err(Error::InvalidArgument(format!(
            "LPC order {order} must be smaller than the context length {}",
            context.len()
        )));
    }
    let n = context.len();
    let windowed: Vec<f64> = context
        .iter()
        .enumerate()
        .map(|(i, &x)| x * (0.5 - 0.5 * (2.0 * PI * (i as f64 + 0.5) / n as f64).cos()))
        .collect();
    let mut r = autocorrelation(&windowed, order);
    if r[0] <= MIN_ENERGY {
        return Ok(LpcModel::identity(order));
    }
    r[0] *= 1.0 + NOISE_FLOOR;
    for (k, v) in r.iter_mut().enumerate().skip(1) {
        let w = 2.0 * PI * LAG_WINDOW_BW * k as f64;
        *v *= (-0.5 * w * w).exp();
    }
    Ok(levinson_durbin(&r, order))
}

/// Filters a whole clip through the analysis filter with zero initial history.
pub fn lpc_residual(clip: &AudioClip, lpc: &LpcModel) -> AudioClip {
    let x: Vec<f64> = clip.samples().iter().map(|&s| s as f64).collect();
    let mut e = Vec::new();
    lpc.residual_from(&x, 0, &mut e);
    AudioClip::from_samples(e.into_iter().map(|v| v as f32).collect())
        .expect("residual of finite input is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn ar2(len: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.1).unwrap();
        let e: Vec<f64> = (0..len).map(|_| normal.sample(&mut rng)).collect();
        let mut x = vec![0.0; len];
        for n in 0..len {
            let x1 = if n >= 1 { x[n - 1] } else { 0.0 };
            let x2 = if n >= 2 { x[n - 2] } else { 0.0 };
            x[n] = 1.6 * x1 - 0.64 * x2 + e[n];
        }
        (x, e)
    }

    /// Direct least-squares fit of an order-2 predictor (covariance normal equations).
    fn least_squares_ar2(x: &[f64]) -> (f64, f64) {
        let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for n in 2..x.len() {
            let (u, v) = (x[n - 1], x[n - 2]);
            s11 += u * u;
            s12 += u * v;
            s22 += v * v;
            b1 += u * x[n];
            b2 += v * x[n];
        }
        let det = s11 * s22 - s12 * s12;
        ((b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det)
    }

    #[test]
    fn zero_signal_gives_identity() {
        let m = lpc_analyze(&[0.0; 320], DEFAULT_ORDER).unwrap();
        assert!(m.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(m.order(), 16);
    }

    #[test]
    fn order_must_fit_context() {
        assert!(lpc_analyze(&[1.0; 16], 16).is_err());
    }

    #[test]
    fn recovers_ar2_process() {
        let (x, _) = ar2(32_000, 7);
        let (ls1, ls2) = least_squares_ar2(&x);
        assert!((ls1 - 1.6).abs() < 0.02 && (ls2 + 0.64).abs() < 0.02);
        let m = lpc_analyze(&x, 2).unwrap();
        assert!((m.coeffs()[0] - ls1).abs() < 0.05, "{:?} vs {ls1}", m.coeffs());
        assert!((m.coeffs()[1] - ls2).abs() < 0.05, "{:?} vs {ls2}", m.coeffs());
        assert!((m.coeffs()[0] - 1.6).abs() < 0.05);
        assert!((m.coeffs()[1] + 0.64).abs() < 0.05);
        assert!(m.is_minimum_phase());
    }

    #[test]
    fn true_model_residual_matches_excitation_energy() {
        let (x, e) = ar2(16_000, 11);
        let model = LpcModel::from_coeffs(vec![1.6, -0.64]);
        let mut res = Vec::new();
        model.residual_from(&x, 0, &mut res);
        let er: f64 = res.iter().map(|v| v * v).sum();
        let ee: f64 = e.iter().map(|v| v * v).sum();
        assert!((er / ee - 1.0).abs() < 0.10);
    }

    #[test]
    fn white_noise_has_low_prediction_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut gains = Vec::new();
        for _ in 0..100 {
            let x: Vec<f64> = (0..320).map(|_| normal.sample(&mut rng)).collect();
            let m = lpc_analyze(&x, DEFAULT_ORDER).unwrap();
            assert!(m.is_minimum_phase());
            let mut res = Vec::new();
            m.residual_from(&x, 0, &mut res);
            let ex: f64 = x.iter().map(|v| v * v).sum();
            let er: f64 = res.iter().map(|v| v * v).sum();
            gains.push(10.0 * (ex / er).log10());
        }
        let mean = gains.iter().sum::<f64>() / gains.len() as f64;
        assert!(mean < 3.0, "mean prediction gain {mean} dB");
    }

    #[test]
    fn residual_examples() {
        let clip = AudioClip::from_samples(vec![0.3, -0.2, 0.5, 0.1]).unwrap();
        assert_eq!(lpc_residual(&clip, &LpcModel::identity(16)), clip);

        let imp = AudioClip::from_samples(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let e = lpc_residual(&imp, &LpcModel::from_coeffs(vec![0.5]));
        assert_eq!(e.samples(), &[1.0, -0.5, 0.0, 0.0]);
    }

    #[test]
    fn speech_like_frames_are_minimum_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (x, _) = ar2(320, rand::Rng::gen(&mut rng));
            let m = lpc_analyze(&x, DEFAULT_ORDER).unwrap();
            assert!(m.is_minimum_phase());
        }
    }
}
