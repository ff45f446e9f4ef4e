//! Rectangular-window STFT and instantaneous-frequency features.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{IF_BINS, IF_DIM, WINDOW_LEN};

pub const DELTA_FLOOR: f64 = 1e-12;
pub const LOG_FLOOR: f64 = 1e-9;

/// Non-negative frequency bins `0..=N/2` of one frame's DFT.
#[derive(Debug, Clone, PartialEq)]
pub struct StftFrame {
    bins: Vec<Complex64>,
}

impl StftFrame {
    pub fn zeros(window_len: usize) -> Self {
        StftFrame {
            bins: vec![Complex64::new(0.0, 0.0); window_len / 2 + 1],
        }
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }
}

/// Reusable FFT plan for one window length.
pub struct Stft {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Stft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stft").field("len", &self.buf.len()).finish()
    }
}

impl Stft {
    pub fn new(window_len: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(window_len);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Stft {
            fft,
            buf: vec![Complex64::new(0.0, 0.0); window_len],
            scratch,
        }
    }

    pub fn window_len(&self) -> usize {
        self.buf.len()
    }

    pub fn transform(&mut self, frame: &[f64]) -> StftFrame {
        assert_eq!(frame.len(), self.buf.len(), "frame length");
        for (b, &x) in self.buf.iter_mut().zip(frame) {
            *b = Complex64::new(x, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        StftFrame {
            bins: self.buf[..=frame.len() / 2].to_vec(),
        }
    }
}

/// One-off STFT of a 320-sample frame.
pub fn stft_frame(frame: &[f64]) -> StftFrame {
    Stft::new(frame.len()).transform(frame)
}

/// 90 values: `log_mag[0..30] ++ delta_re[0..30] ++ delta_im[0..30]`.
#[derive(Clone, PartialEq)]
pub struct IfFeatures {
    values: [f32; IF_DIM],
}

impl std::fmt::Debug for IfFeatures {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IfFeatures")
            .field("log_mag", &self.log_mag())
            .finish_non_exhaustive()
    }
}

impl IfFeatures {
    pub fn from_slice(values: &[f32]) -> Option<Self> {
        let values: [f32; IF_DIM] = values.try_into().ok()?;
        Some(IfFeatures { values })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn log_mag(&self) -> &[f32] {
        &self.values[..IF_BINS]
    }

    pub fn delta_re(&self) -> &[f32] {
        &self.values[IF_BINS..2 * IF_BINS]
    }

    pub fn delta_im(&self) -> &[f32] {
        &self.values[2 * IF_BINS..]
    }
}

/// Unit-normalized phase difference `δ = F_m · conj(F_{m-1})` plus the
/// log-magnitude of the current frame, for the first 30 bins.
pub fn if_features(cur: &StftFrame, prev: &StftFrame) -> IfFeatures {
    let mut values = [0.0f32; IF_DIM];
    for k in 0..IF_BINS {
        let f = cur.bins[k];
        let delta = f * prev.bins[k].conj();
        let mag = delta.norm();
        let (re, im) = if mag > DELTA_FLOOR {
            (delta.re / mag, delta.im / mag)
        } else {
            (0.0, 0.0)
        };
        values[k] = (f.norm() + LOG_FLOOR).ln() as f32;
        values[IF_BINS + k] = re as f32;
        values[2 * IF_BINS + k] = im as f32;
    }
    IfFeatures { values }
}

impl Default for Stft {
    fn default() -> Self {
        Stft::new(WINDOW_LEN)
    }
}
