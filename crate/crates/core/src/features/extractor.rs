//! Streaming per-frame feature extraction.
//!
//! Frame `m` is emitted as soon as sample `m*H + N - 1` has been pushed and
//! never looks further ahead. For each frame the extractor
//!
//! 1. fits a 16th-order LPC model to the frame's own 320 samples,
//! 2. filters the frame plus its 256-sample past through that model,
//! 3. correlates the residual frame against its past (Xcorr), and
//! 4. takes the STFT of the raw frame and forms the IF features against the
//!    previous frame's STFT.
//!
//! Samples before the start of the stream are zeros; the first frame's IF
//! phase difference is taken against an all-zero spectrum.

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::features::lpc::{lpc_analyze, DEFAULT_ORDER};
use crate::features::stft::{if_features, IfFeatures, Stft, StftFrame};
use crate::features::xcorr::{xcorr_frame, XcorrFeatures};
use crate::{HOP, IF_DIM, MAX_LAG, WINDOW_LEN, XCORR_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Xcorr,
    If,
    Both,
}

impl FeatureKind {
    pub fn code(self) -> u32 {
        match self {
            FeatureKind::Xcorr => 1,
            FeatureKind::If => 2,
            FeatureKind::Both => 3,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            1 => Some(FeatureKind::Xcorr),
            2 => Some(FeatureKind::If),
            3 => Some(FeatureKind::Both),
            _ => None,
        }
    }

    pub fn dims(self) -> usize {
        match self {
            FeatureKind::Xcorr => XCORR_DIM,
            FeatureKind::If => IF_DIM,
            FeatureKind::Both => XCORR_DIM + IF_DIM,
        }
    }

    pub fn has_xcorr(self) -> bool {
        matches!(self, FeatureKind::Xcorr | FeatureKind::Both)
    }

    pub fn has_if(self) -> bool {
        matches!(self, FeatureKind::If | FeatureKind::Both)
    }

    pub fn covers(self, other: FeatureKind) -> bool {
        (!other.has_xcorr() || self.has_xcorr()) && (!other.has_if() || self.has_if())
    }
}

impl std::str::FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xcorr" => Ok(FeatureKind::Xcorr),
            "if" => Ok(FeatureKind::If),
            "both" => Ok(FeatureKind::Both),
            other => Err(Error::InvalidArgument(format!("unknown feature kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    pub xcorr: Option<XcorrFeatures>,
    pub if_feats: Option<IfFeatures>,
}

impl FeatureFrame {
    /// Flat values, Xcorr first when both are present.
    pub fn to_vec(&self) -> Vec<f32> {
        let mut v = Vec::with_capacity(XCORR_DIM + IF_DIM);
        if let Some(x) = &self.xcorr {
            v.extend_from_slice(x.values());
        }
        if let Some(f) = &self.if_feats {
            v.extend_from_slice(f.values());
        }
        v
    }

    pub fn kind(&self) -> Option<FeatureKind> {
        match (&self.xcorr, &self.if_feats) {
            (Some(_), Some(_)) => Some(FeatureKind::Both),
            (Some(_), None) => Some(FeatureKind::Xcorr),
            (None, Some(_)) => Some(FeatureKind::If),
            (None, None) => None,
        }
    }
}

/// Stateful extractor for one stream.
#[derive(Debug)]
pub struct FeatureExtractor {
    kind: FeatureKind,
    lpc_order: usize,
    /// Past samples (zero-padded before the stream start) followed by pending input.
    buf: Vec<f64>,
    /// Index in `buf` one past the last sample of the next frame.
    next_end: usize,
    stft: Stft,
    prev_spectrum: StftFrame,
    residual: Vec<f64>,
    frames_emitted: usize,
}

impl FeatureExtractor {
    pub fn new(kind: FeatureKind) -> Self {
        Self::with_lpc_order(kind, DEFAULT_ORDER)
    }

    pub fn with_lpc_order(kind: FeatureKind, lpc_order: usize) -> Self {
        let history = Self::history_len(lpc_order);
        FeatureExtractor {
            kind,
            lpc_order,
            buf: vec![0.0; history],
            next_end: history + WINDOW_LEN,
            stft: Stft::new(WINDOW_LEN),
            prev_spectrum: StftFrame::zeros(WINDOW_LEN),
            residual: Vec::with_capacity(MAX_LAG + WINDOW_LEN),
            frames_emitted: 0,
        }
    }

    fn history_len(order: usize) -> usize {
        MAX_LAG + order
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn frames_emitted(&self) -> usize {
        self.frames_emitted
    }

    /// Appends samples and returns every frame that became complete.
    pub fn push(&mut self, samples: &[f32]) -> Vec<FeatureFrame> {
        self.buf.extend(samples.iter().map(|&s| s as f64));
        let mut out = Vec::new();
        while self.buf.len() >= self.next_end {
            out.push(self.compute_frame());
            self.next_end += HOP;
            self.frames_emitted += 1;
        }
        self.compact();
        out
    }

    fn compute_frame(&mut self) -> FeatureFrame {
        let end = self.next_end;
        let start = end - WINDOW_LEN;
        let frame = &self.buf[start..end];

        let mut xcorr = None;
        if self.kind.has_xcorr() {
            let lpc = lpc_analyze(frame, self.lpc_order).expect("order below window length");
            let ctx_start = start - MAX_LAG - self.lpc_order;
            lpc.residual_from(&self.buf[ctx_start..end], self.lpc_order, &mut self.residual);
            xcorr = Some(xcorr_frame(&self.residual, MAX_LAG, WINDOW_LEN));
        }

        let mut if_feats = None;
        if self.kind.has_if() {
            let spectrum = self.stft.transform(&self.buf[start..end]);
            if_feats = Some(if_features(&spectrum, &self.prev_spectrum));
            self.prev_spectrum = spectrum;
        }

        FeatureFrame { xcorr, if_feats }
    }

    /// Drops samples no future frame can reach.
    fn compact(&mut self) {
        let keep_from = self.next_end - WINDOW_LEN - Self::history_len(self.lpc_order);
        if keep_from > 4 * WINDOW_LEN {
            self.buf.drain(..keep_from);
            self.next_end -= keep_from;
        }
    }

    /// Features of a whole clip, one entry per complete frame.
    pub fn process_clip(kind: FeatureKind, clip: &AudioClip) -> Vec<FeatureFrame> {
        FeatureExtractor::new(kind).push(clip.samples())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(n: usize, seed: u64) -> Vec<f32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect()
    }

    #[test]
    fn one_second_gives_99_frames() {
        let clip = AudioClip::from_samples(noise(16_000, 1)).unwrap();
        let frames = FeatureExtractor::process_clip(FeatureKind::Both, &clip);
        assert_eq!(frames.len(), 99);
        assert_eq!(frames[0].to_vec().len(), 347);
    }

    #[test]
    fn chunked_pushes_equal_one_shot() {
        let x = noise(5_000, 2);
        let whole = FeatureExtractor::new(FeatureKind::Both).push(&x);
        let mut ex = FeatureExtractor::new(FeatureKind::Both);
        let mut chunked = Vec::new();
        for c in x.chunks(37) {
            chunked.extend(ex.push(c));
        }
        assert_eq!(whole, chunked);
    }

    #[test]
    fn frame_emitted_exactly_at_window_end() {
        let x = noise(2_000, 3);
        let mut ex = FeatureExtractor::new(FeatureKind::Both);
        for (i, &s) in x.iter().enumerate() {
            let out = ex.push(&[s]);
            let is_frame_end = i + 1 >= WINDOW_LEN && (i + 1 - WINDOW_LEN) % HOP == 0;
            assert_eq!(out.len(), usize::from(is_frame_end), "sample {i}");
        }
    }

    #[test]
    fn one_hop_delay_shifts_frames() {
        let x = noise(4_000, 4);
        let mut delayed = vec![0.0f32; HOP];
        delayed.extend_from_slice(&x);
        let a = FeatureExtractor::new(FeatureKind::Both).push(&x);
        let b = FeatureExtractor::new(FeatureKind::Both).push(&delayed);
        assert_eq!(b.len(), a.len() + 1);
        for m in 0..a.len() {
            assert_eq!(a[m].xcorr, b[m + 1].xcorr, "xcorr frame {m}");
            if m > 0 {
                assert_eq!(a[m].if_feats, b[m + 1].if_feats, "if frame {m}");
            }
        }
    }

    #[test]
    fn first_frame_has_zero_phase_difference() {
        let f = &FeatureExtractor::new(FeatureKind::If).push(&noise(320, 5))[0];
        let i = f.if_feats.as_ref().unwrap();
        assert!(i.delta_re().iter().chain(i.delta_im()).all(|&v| v == 0.0));
    }
}
