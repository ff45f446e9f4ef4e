//! Synthetic labelled speech-like corpus.
//!
//! Each clip alternates voiced segments with gaps of fricative-like noise or
//! near-silence. Voiced segments are a bandlimited sawtooth at a slowly
//! wandering f0 (mean-reverting random walk in log frequency) passed through
//! three formant resonators. Frame `m` is labelled with the exact f0 at the
//! window centre, sample `m·160 + 160`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::nn::max_class_hz;
use crate::track::{PitchFrame, PitchTrack};
use crate::train::augment::AugmentationRecord;
use crate::train::filter::{Biquad, OnePole};
use crate::{HOP, PITCH_ANCHOR_HZ, SAMPLE_RATE, WINDOW_LEN};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledClip {
    pub id: String,
    pub audio: AudioClip,
    /// Hz per frame, 0 where unvoiced.
    pub f0: Vec<f32>,
    pub voiced: Vec<bool>,
    /// `None` for clips kept unmodified.
    pub augmentation: Option<AugmentationRecord>,
}

impl LabeledClip {
    pub fn frame_count(&self) -> usize {
        self.f0.len()
    }

    pub fn voiced_count(&self) -> usize {
        self.voiced.iter().filter(|&&v| v).count()
    }

    pub fn reference(&self) -> PitchTrack {
        PitchTrack::new(
            self.f0
                .iter()
                .zip(&self.voiced)
                .map(|(&f, &v)| if v { PitchFrame::voiced(f) } else { PitchFrame::unvoiced() })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoiceProfile {
    /// Range of the f0 trajectories, Hz.
    pub f0_min: f64,
    pub f0_max: f64,
    /// Per-hop standard deviation of the log-f0 walk.
    pub walk_sigma: f64,
    /// Spread of segment centres around the clip's base pitch, in log units.
    pub centre_spread: f64,
    pub voiced_s: (f64, f64),
    pub gap_s: (f64, f64),
    /// Probability that a gap is fricative noise rather than silence.
    pub unvoiced_prob: f64,
    pub clip_frames: usize,
}

impl Default for VoiceProfile {
    fn default() -> Self {
        VoiceProfile {
            f0_min: 70.0,
            f0_max: 400.0,
            walk_sigma: 0.012,
            centre_spread: 0.2,
            voiced_s: (0.2, 1.0),
            gap_s: (0.1, 0.6),
            unvoiced_prob: 0.5,
            clip_frames: 600,
        }
    }
}

impl VoiceProfile {
    /// Steady pitch at `f0_hz` for the whole clip.
    pub fn constant(f0_hz: f64) -> Self {
        VoiceProfile {
            f0_min: f0_hz,
            f0_max: f0_hz,
            walk_sigma: 0.0,
            centre_spread: 0.0,
            ..VoiceProfile::default()
        }
    }

    pub fn clip_samples(&self) -> usize {
        (self.clip_frames - 1) * HOP + WINDOW_LEN
    }
}

fn gauss(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn polyblep(t: f64, dt: f64) -> f64 {
    if t < dt {
        let t = t / dt;
        2.0 * t - t * t - 1.0
    } else if t > 1.0 - dt {
        let t = (t - 1.0) / dt;
        t * t + 2.0 * t + 1.0
    } else {
        0.0
    }
}

/// One clip from its own random stream.
pub fn synth_clip(rng: &mut impl Rng, profile: &VoiceProfile, id: impl Into<String>) -> LabeledClip {
    let n = profile.clip_samples();
    let fs = SAMPLE_RATE as f64;
    let (lo, hi) = (profile.f0_min.ln(), profile.f0_max.ln());
    let base = if hi > lo { rng.gen_range(lo..=hi) } else { lo };

    let mut audio = vec![0.0f64; n];
    let mut f0_at = vec![0.0f64; n];
    for s in audio.iter_mut() {
        *s = 1e-4 * gauss(rng);
    }

    let mut pos = 0usize;
    let mut voiced_next = false;
    while pos < n {
        let range = if voiced_next { profile.voiced_s } else { profile.gap_s };
        let len = ((rng.gen_range(range.0..=range.1) * fs) as usize).max(HOP).min(n - pos);
        let seg = pos..pos + len;
        if voiced_next {
            voiced_segment(rng, profile, base, (lo, hi), &mut audio[seg.clone()], &mut f0_at[seg]);
        } else if rng.gen_bool(profile.unvoiced_prob) {
            fricative(rng, &mut audio[seg]);
        }
        pos += len;
        voiced_next = !voiced_next;
    }

    let frames = profile.clip_frames;
    let ceiling = max_class_hz();
    let mut f0 = Vec::with_capacity(frames);
    let mut voiced = Vec::with_capacity(frames);
    for m in 0..frames {
        let f = f0_at[m * HOP + WINDOW_LEN / 2];
        if f > 0.0 {
            f0.push(f.clamp(PITCH_ANCHOR_HZ, ceiling) as f32);
            voiced.push(true);
        } else {
            f0.push(0.0);
            voiced.push(false);
        }
    }
    LabeledClip {
        id: id.into(),
        audio: AudioClip::from_samples(audio.into_iter().map(|v| v as f32).collect()).expect("finite synthesis"),
        f0,
        voiced,
        augmentation: None,
    }
}

fn voiced_segment(
    rng: &mut impl Rng,
    p: &VoiceProfile,
    base: f64,
    (lo, hi): (f64, f64),
    out: &mut [f64],
    f0_out: &mut [f64],
) {
    let fs = SAMPLE_RATE as f64;
    let n = out.len();
    let centre = (base + p.centre_spread * gauss(rng)).clamp(lo, hi);

    // log-f0 control points every hop, linearly interpolated
    let controls = n / HOP + 2;
    let mut lf = Vec::with_capacity(controls);
    let mut cur = (centre + 0.5 * p.centre_spread * gauss(rng)).clamp(lo, hi);
    for _ in 0..controls {
        lf.push(cur);
        cur += p.walk_sigma * gauss(rng) + 0.05 * (centre - cur);
        cur = cur.clamp(lo, hi);
    }

    let formants = [
        (rng.gen_range(300.0..900.0), rng.gen_range(60.0..160.0)),
        (rng.gen_range(900.0..2_400.0), rng.gen_range(80.0..200.0)),
        (rng.gen_range(2_300.0..3_500.0), rng.gen_range(120.0..300.0)),
    ];
    let mut tract: Vec<Biquad> = formants.iter().map(|&(f, b)| Biquad::resonator(f, b)).collect();
    let mut tilt = OnePole::new(rng.gen_range(0.0..0.6));
    let level = rng.gen_range(0.03..0.2);
    let breath = rng.gen_range(0.0..0.05);

    let mut phase: f64 = rng.gen_range(0.0..1.0);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let k = i / HOP;
        let frac = (i % HOP) as f64 / HOP as f64;
        let f0 = (lf[k] + frac * (lf[k + 1] - lf[k])).exp();
        f0_out[i] = f0;
        let dt = f0 / fs;
        let saw = 2.0 * phase - 1.0 - polyblep(phase, dt);
        phase += dt;
        if phase >= 1.0 {
            phase -= 1.0;
        }
        let mut v = saw + breath * gauss(rng);
        for r in tract.iter_mut() {
            v = r.process(v);
        }
        y.push(tilt.process(v));
    }
    let ramp = (0.015 * fs) as usize;
    add_normalized(out, &y, level, ramp);
    // labels start where the onset ramp passes half amplitude
    let half = (ramp / 2).min(n / 2);
    f0_out[..half].iter_mut().for_each(|f| *f = 0.0);
    f0_out[n - half..].iter_mut().for_each(|f| *f = 0.0);
}

/// Adds `y` scaled to RMS `level`, with raised-cosine ramps at both ends.
fn add_normalized(out: &mut [f64], y: &[f64], level: f64, ramp: usize) {
    let n = y.len();
    let rms = (y.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms <= 0.0 {
        return;
    }
    let ramp = ramp.min(n / 2).max(1);
    for (i, (o, &v)) in out.iter_mut().zip(y).enumerate() {
        let edge = i.min(n - 1 - i);
        let env = if edge < ramp {
            0.5 - 0.5 * (std::f64::consts::PI * edge as f64 / ramp as f64).cos()
        } else {
            1.0
        };
        *o += level / rms * env * v;
    }
}

fn fricative(rng: &mut impl Rng, out: &mut [f64]) {
    let mut f = Biquad::resonator(rng.gen_range(2_000.0..6_000.0), rng.gen_range(500.0..2_000.0));
    let level = rng.gen_range(0.003..0.03);
    let y: Vec<f64> = (0..out.len()).map(|_| f.process(gauss(rng))).collect();
    add_normalized(out, &y, level, (0.01 * SAMPLE_RATE as f64) as usize);
}

/// About `minutes` of audio in clips of `profile.clip_frames` frames.
/// Clip `i` depends only on `seed` and `i`.
pub fn synth_corpus(seed: u64, minutes: f64, profile: &VoiceProfile) -> Vec<LabeledClip> {
    let per_clip = profile.clip_samples() as f64 / SAMPLE_RATE as f64;
    let count = ((minutes * 60.0) / per_clip).ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            synth_clip(&mut rng, profile, format!("clip{i:05}"))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    White,
    Pink,
    Brown,
    SpeechShaped,
    Modulated,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::White,
        NoiseKind::Pink,
        NoiseKind::Brown,
        NoiseKind::SpeechShaped,
        NoiseKind::Modulated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::White => "white",
            NoiseKind::Pink => "pink",
            NoiseKind::Brown => "brown",
            NoiseKind::SpeechShaped => "speech_shaped",
            NoiseKind::Modulated => "modulated",
        }
    }
}

/// A coloured noise recording normalized to RMS 0.1.
pub fn synth_noise(kind: NoiseKind, seconds: f64, rng: &mut impl Rng) -> AudioClip {
    let n = (seconds * SAMPLE_RATE as f64) as usize;
    let white: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
    let mut out: Vec<f64> = match kind {
        NoiseKind::White => white,
        NoiseKind::Pink => {
            // Kellet's economy filter
            let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
            white
                .iter()
                .map(|&w| {
                    b0 = 0.99765 * b0 + w * 0.0990460;
                    b1 = 0.96300 * b1 + w * 0.2965164;
                    b2 = 0.57000 * b2 + w * 1.0526913;
                    b0 + b1 + b2 + w * 0.1848
                })
                .collect()
        }
        NoiseKind::Brown => {
            let mut acc = 0.0;
            let mut dc = Biquad::new([1.0, -1.0, 0.0], [-0.995, 0.0]);
            white
                .iter()
                .map(|&w| {
                    acc = 0.998 * acc + w;
                    dc.process(acc)
                })
                .collect()
        }
        NoiseKind::SpeechShaped | NoiseKind::Modulated => {
            let mut lp = OnePole::new(0.85);
            let mut res = Biquad::resonator(500.0, 800.0);
            let rate = rng.gen_range(2.0..6.0);
            let phase0 = rng.gen_range(0.0..std::f64::consts::TAU);
            white
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    let y = res.process(lp.process(w));
                    if kind == NoiseKind::Modulated {
                        let t = i as f64 / SAMPLE_RATE as f64;
                        let m = 0.5 + 0.5 * (std::f64::consts::TAU * rate * t + phase0).sin();
                        y * (0.15 + m * m)
                    } else {
                        y
                    }
                })
                .collect()
        }
    };
    let rms = (out.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64).sqrt();
    if rms > 0.0 {
        out.iter_mut().for_each(|v| *v *= 0.1 / rms);
    }
    AudioClip::from_samples(out.into_iter().map(|v| v as f32).collect()).expect("finite noise")
}

/// One recording of every [`NoiseKind`], named by kind.
pub fn synth_noise_library(seed: u64, seconds: f64) -> Vec<(String, AudioClip)> {
    NoiseKind::ALL
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1_000 + i as u64);
            (k.name().to_string(), synth_noise(k, seconds, &mut rng))
        })
        .collect()
}
