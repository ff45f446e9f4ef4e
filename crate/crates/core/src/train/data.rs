//! Precomputed features, fixed-length windows and batch assembly.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::{rca_counts, RcaCounts, RCA_THRESHOLD_CENTS};
use crate::features::{FeatureExtractor, FeatureKind};
use crate::nn::PitchModel;
use crate::{IF_DIM, XCORR_DIM};
use crate::track::{PitchFrame, PitchTrack};
use crate::train::labels::quantize_pitch;
use crate::train::net::{Batch, Real};
use crate::train::synth::LabeledClip;

/// One clip's features and targets, flattened frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedClip {
    pub id: String,
    pub frames: usize,
    pub if_feats: Vec<f32>,
    pub xcorr: Vec<f32>,
    pub class: Vec<usize>,
    pub voiced: Vec<bool>,
    pub reference: PitchTrack,
}

impl PreparedClip {
    pub fn prepare(kind: FeatureKind, clip: &LabeledClip) -> Result<Self> {
        let feats = FeatureExtractor::process_clip(kind, &clip.audio);
        if feats.len() != clip.f0.len() || clip.voiced.len() != clip.f0.len() {
            return Err(Error::dim(format!("labels of {}", clip.id), feats.len(), clip.f0.len()));
        }
        let reference = clip.reference();
        let mut p = PreparedClip {
            id: clip.id.clone(),
            frames: feats.len(),
            if_feats: Vec::new(),
            xcorr: Vec::new(),
            class: Vec::with_capacity(feats.len()),
            voiced: clip.voiced.clone(),
            reference,
        };
        for (f, (&f0, &v)) in feats.iter().zip(clip.f0.iter().zip(&clip.voiced)) {
            if let Some(x) = &f.if_feats {
                p.if_feats.extend_from_slice(x.values());
            }
            if let Some(x) = &f.xcorr {
                p.xcorr.extend_from_slice(x.values());
            }
            p.class.push(if v { quantize_pitch(f0 as f64)? } else { 0 });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: FeatureKind,
    pub clips: Vec<PreparedClip>,
}

/// `(clip, start frame)` of one training sequence.
pub type Window = (usize, usize);

impl Dataset {
    /// Extracts features for every clip, in parallel.
    pub fn prepare(kind: FeatureKind, clips: &[LabeledClip]) -> Result<Self> {
        let clips = crate::par::par_map(clips.len(), |i| PreparedClip::prepare(kind, &clips[i]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { kind, clips })
    }

    pub fn frames(&self) -> usize {
        self.clips.iter().map(|c| c.frames).sum()
    }

    pub fn voiced_frames(&self) -> usize {
        self.clips.iter().map(|c| c.voiced.iter().filter(|&&v| v).count()).sum()
    }

    /// Non-overlapping windows of `seq_len` frames; clip tails are dropped.
    pub fn windows(&self, seq_len: usize) -> Vec<Window> {
        let mut out = Vec::new();
        for (ci, c) in self.clips.iter().enumerate() {
            out.extend((0..c.frames / seq_len.max(1)).map(|k| (ci, k * seq_len)));
        }
        out
    }

    /// Windows in a random order, split into batches of at most `batch` windows.
    pub fn epoch_plan(&self, seq_len: usize, batch: usize, rng: &mut impl Rng) -> Vec<Vec<Window>> {
        let mut w = self.windows(seq_len);
        w.shuffle(rng);
        w.chunks(batch.max(1)).map(<[Window]>::to_vec).collect()
    }

    /// Time-major batch: row `t * windows.len() + b`.
    pub fn batch<F: Real>(&self, windows: &[Window], seq_len: usize) -> Batch<F> {
        let b = windows.len();
        let rows = seq_len * b;
        let has_if = self.kind.has_if();
        let has_x = self.kind.has_xcorr();
        let mut if_x = has_if.then(|| Array2::<F>::zeros((rows, IF_DIM)));
        let mut xc = has_x.then(|| Array2::<F>::zeros((rows, XCORR_DIM)));
        let mut target = vec![0; rows];
        let mut weight = vec![F::zero(); rows];
        for (bi, &(ci, start)) in windows.iter().enumerate() {
            let c = &self.clips[ci];
            for t in 0..seq_len {
                let (row, fr) = (t * b + bi, start + t);
                if let Some(a) = if_x.as_mut() {
                    let src = &c.if_feats[fr * IF_DIM..(fr + 1) * IF_DIM];
                    a.row_mut(row).iter_mut().zip(src).for_each(|(d, &s)| *d = F::from_f32(s).unwrap());
                }
                if let Some(a) = xc.as_mut() {
                    let src = &c.xcorr[fr * XCORR_DIM..(fr + 1) * XCORR_DIM];
                    a.row_mut(row).iter_mut().zip(src).for_each(|(d, &s)| *d = F::from_f32(s).unwrap());
                }
                target[row] = c.class[fr];
                if c.voiced[fr] {
                    weight[row] = F::one();
                }
            }
        }
        Batch {
            t: seq_len,
            b,
            if_x,
            xcorr: xc,
            target,
            weight,
        }
    }

    /// Raw cent accuracy of a streaming model over whole clips, voicing
    /// ignored: every reference-voiced frame is scored on its argmax pitch.
    pub fn rca(&self, model: &PitchModel) -> Result<f64> {
        let per = crate::par::par_map(self.clips.len(), |i| -> Result<RcaCounts> {
            let c = &self.clips[i];
            let mut state = model.new_stream();
            let mut frames = Vec::with_capacity(c.frames);
            for fr in 0..c.frames {
                let if_in = (!c.if_feats.is_empty())
                    .then(|| &c.if_feats[fr * IF_DIM..(fr + 1) * IF_DIM]);
                let x_in = (!c.xcorr.is_empty()).then(|| &c.xcorr[fr * XCORR_DIM..(fr + 1) * XCORR_DIM]);
                let (f0, _) = model.step_raw(&mut state, if_in, x_in)?.decode();
                frames.push(PitchFrame::voiced(f0 as f32));
            }
            rca_counts(&PitchTrack::new(frames), &c.reference, RCA_THRESHOLD_CENTS)
        });
        let mut total = RcaCounts::default();
        for c in per {
            total.add(c?);
        }
        total.rca()
    }
}
