//! Normalized short-time cross-correlation over integer lags.
//!
//! For a frame starting at `s` and lag `τ`:
//!
//! ```text
//! R[τ]   = Σ_{n<N} x[s+n] x[s+n-τ]
//! value  = 2 R[τ] / (E_cur + E_lag(τ) + 1e-9)
//! ```
//!
//! where `E_cur` and `E_lag(τ)` are the squared norms of the two length-N
//! sequences. By Cauchy-Schwarz every value lies in [-1, 1].

use crate::error::Result;
use crate::features::frame::FrameGrid;
use crate::{MAX_LAG, XCORR_DIM};

pub const ENERGY_FLOOR: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct XcorrFeatures {
    values: [f32; XCORR_DIM],
}

impl std::fmt::Debug for XcorrFeatures {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("XcorrFeatures")
            .field("tau0", &self.values[0])
            .finish_non_exhaustive()
    }
}

impl XcorrFeatures {
    pub fn zeros() -> Self {
        XcorrFeatures {
            values: [0.0; XCORR_DIM],
        }
    }

    pub fn from_slice(values: &[f32]) -> Option<Self> {
        let values: [f32; XCORR_DIM] = values.try_into().ok()?;
        Some(XcorrFeatures { values })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn at(&self, lag: usize) -> f32 {
        self.values[lag]
    }

    /// Best lag in `[min_lag, max_lag]`, ties toward the shorter lag.
    pub fn argmax_in(&self, min_lag: usize, max_lag: usize) -> usize {
        let mut best = min_lag;
        for lag in min_lag..=max_lag.min(MAX_LAG) {
            if self.values[lag] > self.values[best] {
                best = lag;
            }
        }
        best
    }
}

/// Cross-correlation of the frame at `buf[offset..offset+window]` against its
/// past. `buf` must hold at least `MAX_LAG` samples before `offset`.
pub fn xcorr_frame(buf: &[f64], offset: usize, window: usize) -> XcorrFeatures {
    assert!(offset >= MAX_LAG, "need {MAX_LAG} samples of history");
    assert!(buf.len() >= offset + window);
    let cur = &buf[offset..offset + window];
    let e_cur: f64 = cur.iter().map(|v| v * v).sum();
    let mut out = XcorrFeatures::zeros();
    let mut e_lag = e_cur;
    for tau in 0..=MAX_LAG {
        let start = offset - tau;
        if tau > 0 {
            // slide the lagged window one sample into the past
            let incoming = buf[start];
            let outgoing = buf[start + window];
            e_lag = (e_lag + incoming * incoming - outgoing * outgoing).max(0.0);
        }
        let lagged = &buf[start..start + window];
        let r = dot(cur, lagged);
        out.values[tau] = (2.0 * r / (e_cur + e_lag + ENERGY_FLOOR)) as f32;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Per-frame features of an already-computed residual signal. Samples before
/// the start of the signal are taken as zero.
pub fn xcorr_features(residual: &[f32], grid: &FrameGrid) -> Result<Vec<XcorrFeatures>> {
    let count = grid.frame_count(residual.len())?;
    let mut padded = vec![0.0f64; MAX_LAG];
    padded.extend(residual.iter().map(|&v| v as f64));
    Ok((0..count)
        .map(|m| xcorr_frame(&padded, MAX_LAG + grid.frame_start(m), grid.window_len))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct double loop over lags and samples, zero-padded past.
    fn brute_force(x: &[f64], start: usize, n: usize) -> Vec<f64> {
        let at = |i: isize| if i < 0 { 0.0 } else { x[i as usize] };
        (0..=MAX_LAG)
            .map(|tau| {
                let (mut r, mut e1, mut e2) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    let a = at((start + k) as isize);
                    let b = at(start as isize + k as isize - tau as isize);
                    r += a * b;
                    e1 += a * a;
                    e2 += b * b;
                }
                2.0 * r / (e1 + e2 + ENERGY_FLOOR)
            })
            .collect()
    }

    #[test]
    fn periodic_residual_peaks_at_period() {
        // pulse train, period 160
        let x: Vec<f32> = (0..1600).map(|i| if i % 160 == 0 { 1.0 } else { 0.0 }).collect();
        let feats = xcorr_features(&x, &FrameGrid::default()).unwrap();
        let f = &feats[4];
        let oracle = brute_force(&x.iter().map(|&v| v as f64).collect::<Vec<_>>(), 640, 320);
        let best = (32..=256).max_by(|&a, &b| oracle[a].total_cmp(&oracle[b]).then(b.cmp(&a))).unwrap();
        assert_eq!(best, 160);
        assert_eq!(f.argmax_in(32, 256), 160);
        assert!(f.at(160) >= 0.9);
    }

    #[test]
    fn lag_zero_is_unity_and_silence_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f32> = (0..640).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for f in xcorr_features(&x, &FrameGrid::default()).unwrap() {
            assert!((f.at(0) - 1.0).abs() < 1e-6);
            assert!(f.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        }
        let zeros = vec![0.0f32; 640];
        for f in xcorr_features(&zeros, &FrameGrid::default()).unwrap() {
            assert!(f.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn matches_brute_force_on_random_signals() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f32> = (0..16_000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xd: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let grid = FrameGrid::default();
        let feats = xcorr_features(&x, &grid).unwrap();
        for m in [0, 1, 2, 50, 98] {
            let oracle = brute_force(&xd, grid.frame_start(m), 320);
            for (tau, o) in oracle.iter().enumerate() {
                assert!((feats[m].at(tau) as f64 - o).abs() < 1e-6);
            }
        }
    }
}
