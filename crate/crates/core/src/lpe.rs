//! DSP baseline: LPC-residual correlation peak picking with causal
//! dynamic-programming smoothing.
//!
//! Each lag hypothesis `τ ∈ [32, 256]` carries a cumulative path score
//!
//! ```text
//! S_m(τ) = c_m(τ) + max_τ' [ S_{m-1}(τ') - λ |ln(τ / τ')| ]
//! c_m(τ) = xcorr_m(τ) · (1 - w · τ / 256)
//! ```
//!
//! and frame `m`'s decision is `argmax S_m` (no backtracking, so nothing
//! beyond the current frame is needed). The inner maximization is an L1
//! distance transform in `ln τ`, computed in two linear passes. The frame is
//! voiced when the raw correlation at the chosen lag exceeds the threshold.
//!
//! Only integer lags are considered, so the relative resolution degrades as
//! the pitch rises: see [`lag_quantization_error_cents`].

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, FeatureKind, XcorrFeatures};
use crate::track::{PitchFrame, PitchTrack};
use crate::{MAX_LAG, SAMPLE_RATE};

pub const MIN_LAG: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LpeConfig {
    pub min_lag: usize,
    pub max_lag: usize,
    /// λ, cost per unit of |ln lag ratio| between consecutive frames.
    pub transition_cost: f64,
    pub voicing_threshold: f64,
    /// Linear preference for shorter lags, against period-multiple errors.
    pub lag_weight: f64,
    /// A divisor `lag/k` replaces the chosen lag when its correlation is at
    /// least this fraction of the chosen one. Values above 1 disable the check.
    pub multiple_ratio: f64,
}

impl Default for LpeConfig {
    fn default() -> Self {
        LpeConfig {
            min_lag: MIN_LAG,
            max_lag: MAX_LAG,
            transition_cost: 0.1,
            voicing_threshold: 0.3,
            lag_weight: 0.2,
            multiple_ratio: 0.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagHypothesis {
    pub lag: usize,
    pub score: f64,
}

/// Per-lag path scores and the previous decision.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherState {
    scores: Vec<f64>,
    log_lags: Vec<f64>,
    prev_best: Option<usize>,
    min_lag: usize,
}

impl SmootherState {
    pub fn new(cfg: &LpeConfig) -> Self {
        let n = cfg.max_lag - cfg.min_lag + 1;
        SmootherState {
            scores: vec![0.0; n],
            log_lags: (cfg.min_lag..=cfg.max_lag).map(|l| (l as f64).ln()).collect(),
            prev_best: None,
            min_lag: cfg.min_lag,
        }
    }

    pub fn prev_best(&self) -> Option<usize> {
        self.prev_best
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpeDecision {
    pub best: LagHypothesis,
    /// Raw normalized correlation at the chosen lag.
    pub correlation: f64,
    pub voiced: bool,
}

impl LpeDecision {
    pub fn f0_hz(&self) -> f64 {
        SAMPLE_RATE as f64 / self.best.lag as f64
    }

    /// Track frame; confidence is the correlation clamped to [0, 1].
    pub fn frame(&self) -> PitchFrame {
        PitchFrame {
            f0_hz: self.f0_hz() as f32,
            confidence: self.correlation.clamp(0.0, 1.0) as f32,
            voiced: self.voiced,
        }
    }
}

pub fn lag_to_hz(lag: usize) -> Result<f64> {
    if lag == 0 {
        return Err(Error::InvalidArgument("lag must be at least 1 sample".into()));
    }
    Ok(SAMPLE_RATE as f64 / lag as f64)
}

/// Worst-case error in cents from rounding the period of `f0_hz` to an integer lag.
pub fn lag_quantization_error_cents(f0_hz: f64) -> f64 {
    let period = SAMPLE_RATE as f64 / f0_hz;
    1200.0 * ((period + 0.5) / period).log2()
}

/// One step of the causal smoother.
pub fn lpe_frame(xcorr: &XcorrFeatures, state: &mut SmootherState, cfg: &LpeConfig) -> LpeDecision {
    let n = state.scores.len();
    let lam = cfg.transition_cost;

    // best predecessor score for every lag (L1 distance transform in ln τ)
    let mut carried = state.scores.clone();
    for i in 1..n {
        let step = lam * (state.log_lags[i] - state.log_lags[i - 1]);
        carried[i] = carried[i].max(carried[i - 1] - step);
    }
    for i in (0..n - 1).rev() {
        let step = lam * (state.log_lags[i + 1] - state.log_lags[i]);
        carried[i] = carried[i].max(carried[i + 1] - step);
    }

    let mut best = 0;
    for i in 0..n {
        let lag = state.min_lag + i;
        let c = xcorr.at(lag) as f64 * (1.0 - cfg.lag_weight * lag as f64 / MAX_LAG as f64);
        carried[i] += c;
        if carried[i] > carried[best] {
            best = i;
        }
    }
    let top = carried[best];
    for s in carried.iter_mut() {
        *s -= top;
    }
    state.scores = carried;

    let lag = shortest_period(xcorr, state.min_lag + best, cfg);
    state.prev_best = Some(lag);
    let correlation = xcorr.at(lag) as f64;
    LpeDecision {
        best: LagHypothesis { lag, score: top },
        correlation,
        voiced: correlation > cfg.voicing_threshold,
    }
}

/// Looks for the shortest sub-multiple of `lag` that correlates nearly as well.
fn shortest_period(xcorr: &XcorrFeatures, lag: usize, cfg: &LpeConfig) -> usize {
    let peak = xcorr.at(lag) as f64;
    if peak <= 0.0 {
        return lag;
    }
    for k in (2..=lag / cfg.min_lag).rev() {
        let centre = (lag as f64 / k as f64).round() as usize;
        let lo = centre.saturating_sub(1).max(cfg.min_lag);
        let hi = (centre + 1).min(cfg.max_lag);
        let cand = xcorr.argmax_in(lo, hi);
        if xcorr.at(cand) as f64 >= cfg.multiple_ratio * peak {
            return cand;
        }
    }
    lag
}

/// Streaming baseline tracker over raw audio.
#[derive(Debug)]
pub struct LpeTracker {
    cfg: LpeConfig,
    extractor: FeatureExtractor,
    state: SmootherState,
}

impl LpeTracker {
    pub fn new(cfg: LpeConfig) -> Self {
        LpeTracker {
            extractor: FeatureExtractor::new(FeatureKind::Xcorr),
            state: SmootherState::new(&cfg),
            cfg,
        }
    }

    pub fn push(&mut self, samples: &[f32]) -> Vec<LpeDecision> {
        self.extractor
            .push(samples)
            .iter()
            .map(|f| lpe_frame(f.xcorr.as_ref().expect("xcorr extractor"), &mut self.state, &self.cfg))
            .collect()
    }

    pub fn track(cfg: LpeConfig, clip: &AudioClip) -> PitchTrack {
        let mut t = LpeTracker::new(cfg);
        PitchTrack::new(
            t.push(clip.samples())
                .iter()
                .map(LpeDecision::frame)
                .collect(),
        )
    }
}
