//! Label-preserving level, filter and noise augmentation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::eval::{mix_at_snr, NoiseBank, NoiseFit, Snr};
use crate::train::filter::Biquad;
use crate::train::synth::LabeledClip;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    pub gain_db_range: (f64, f64),
    /// Half-width of the range of each biquad coefficient b1, b2, a1, a2.
    pub iir_coeff_range: f64,
    pub snr_db_choices: Vec<Snr>,
    pub clean_fraction: f64,
    pub max_filter_draws: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            gain_db_range: (-60.0, 10.0),
            iir_coeff_range: 0.375,
            snr_db_choices: vec![Snr::Clean, Snr::Db(20.0), Snr::Db(10.0), Snr::Db(5.0), Snr::Db(0.0)],
            clean_fraction: 0.2,
            max_filter_draws: 100,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.clean_fraction) {
            return Err(Error::InvalidArgument(format!("clean_fraction {} not in [0, 1]", self.clean_fraction)));
        }
        if self.gain_db_range.0 > self.gain_db_range.1 || self.snr_db_choices.is_empty() {
            return Err(Error::InvalidArgument("empty gain range or SNR choice set".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRef {
    pub name: String,
    pub offset: usize,
}

/// Everything needed to replay one augmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub gain_db: f64,
    /// `[b1, b2, a1, a2]` with `b0 = a0 = 1`.
    pub iir: [f64; 4],
    pub snr_db: Snr,
    pub noise: Option<NoiseRef>,
}

/// Draws an augmentation; `None` keeps the clip clean.
pub fn draw_augmentation(
    cfg: &AugmentConfig,
    noise: Option<&NoiseBank>,
    rng: &mut impl Rng,
) -> Result<Option<AugmentationRecord>> {
    cfg.validate()?;
    if rng.gen_bool(cfg.clean_fraction) {
        return Ok(None);
    }
    let (lo, hi) = cfg.gain_db_range;
    let gain_db = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    let r = cfg.iir_coeff_range;
    let mut iir = None;
    for _ in 0..cfg.max_filter_draws {
        let c = [(); 4].map(|_| if r > 0.0 { rng.gen_range(-r..=r) } else { 0.0 });
        if Biquad::new([1.0, c[0], c[1]], [c[2], c[3]]).is_stable() {
            iir = Some(c);
            break;
        }
    }
    let iir = iir.ok_or(Error::UnstableFilter(cfg.max_filter_draws))?;
    let snr_db = cfg.snr_db_choices[rng.gen_range(0..cfg.snr_db_choices.len())];
    let noise = match snr_db {
        Snr::Clean => None,
        Snr::Db(_) => {
            let bank = noise.ok_or_else(|| {
                Error::InvalidArgument("noise augmentation drawn but no noise library given".into())
            })?;
            let (name, clip) = &bank.clips[rng.gen_range(0..bank.clips.len())];
            Some(NoiseRef {
                name: name.clone(),
                offset: rng.gen_range(0..clip.len()),
            })
        }
    };
    Ok(Some(AugmentationRecord {
        gain_db,
        iir,
        snr_db,
        noise,
    }))
}

/// Gain, then the biquad, then noise at the recorded SNR.
pub fn apply_augmentation(audio: &AudioClip, rec: &AugmentationRecord, noise: Option<&NoiseBank>) -> Result<AudioClip> {
    let g = 10f64.powf(rec.gain_db / 20.0);
    let [b1, b2, a1, a2] = rec.iir;
    let mut f = Biquad::new([1.0, b1, b2], [a1, a2]);
    let shaped = AudioClip::from_samples(audio.samples().iter().map(|&s| f.process(g * s as f64) as f32).collect())?;
    match (&rec.noise, rec.snr_db) {
        (_, Snr::Clean) => Ok(shaped),
        (Some(n), snr) => {
            let bank = noise.ok_or_else(|| Error::InvalidArgument("record needs a noise library".into()))?;
            let seg = bank.excerpt(&n.name, n.offset, shaped.len())?;
            mix_at_snr(&shaped, &seg, snr, NoiseFit::Tile)
        }
        (None, _) => Err(Error::InvalidArgument("noisy augmentation record without a noise source".into())),
    }
}

/// Draws and applies an augmentation. Labels are carried over untouched.
pub fn augment(
    clip: &LabeledClip,
    cfg: &AugmentConfig,
    noise: Option<&NoiseBank>,
    rng: &mut impl Rng,
) -> Result<LabeledClip> {
    let rec = draw_augmentation(cfg, noise, rng)?;
    let audio = match &rec {
        Some(r) => apply_augmentation(&clip.audio, r, noise)?,
        None => clip.audio.clone(),
    };
    Ok(LabeledClip {
        id: clip.id.clone(),
        audio,
        f0: clip.f0.clone(),
        voiced: clip.voiced.clone(),
        augmentation: rec,
    })
}
