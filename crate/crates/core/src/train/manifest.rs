//! On-disk corpora: WAV + label CSV per clip, indexed by one JSON manifest.
//!
//! ```json
//! {
//!   "id": "train",
//!   "seed": 7,
//!   "profile": { "f0_min": 70.0, ... },
//!   "noise_dir": "noise",
//!   "clips": [
//!     { "id": "clip00000", "wav": "clips/clip00000.wav",
//!       "labels": "clips/clip00000.csv", "augmentation": null }
//!   ]
//! }
//! ```
//!
//! WAVs hold the clean signal. Augmentation records are replayed on load,
//! against the noise recordings in `noise_dir`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::audio::AudioClip;
use crate::error::{Error, Result};
use crate::eval::{CorpusSource, NoiseBank, ReferenceClip, ReferenceCorpus};
use crate::track::{labels_to_csv, PitchTrack};
use crate::train::augment::{apply_augmentation, AugmentationRecord};
use crate::train::synth::{LabeledClip, VoiceProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestClip {
    pub id: String,
    pub wav: PathBuf,
    pub labels: PathBuf,
    pub augmentation: Option<AugmentationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub id: String,
    pub seed: u64,
    pub profile: Option<VoiceProfile>,
    /// Relative to the manifest's directory.
    pub noise_dir: Option<PathBuf>,
    pub clips: Vec<ManifestClip>,
}

/// Whether [`CorpusManifest::load_clips`] replays augmentation records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replay {
    Augmented,
    Clean,
}

impl CorpusManifest {
    /// Writes `clips/<id>.wav`, `clips/<id>.csv` and `manifest.json` under
    /// `dir` and returns the manifest path. Each clip's `audio` is stored as
    /// is and its augmentation record alongside it, unapplied.
    pub fn write(
        dir: impl AsRef<Path>,
        id: &str,
        seed: u64,
        profile: Option<&VoiceProfile>,
        noise_dir: Option<PathBuf>,
        clips: &[LabeledClip],
    ) -> Result<PathBuf> {
        let dir = dir.as_ref();
        let clip_dir = dir.join("clips");
        std::fs::create_dir_all(&clip_dir).map_err(|e| Error::from(e).in_file(&clip_dir))?;
        let mut entries = Vec::with_capacity(clips.len());
        for c in clips {
            let wav = PathBuf::from("clips").join(format!("{}.wav", c.id));
            let labels = PathBuf::from("clips").join(format!("{}.csv", c.id));
            c.audio.write_wav(dir.join(&wav))?;
            let lp = dir.join(&labels);
            std::fs::write(&lp, labels_to_csv(&c.f0, &c.voiced)).map_err(|e| Error::from(e).in_file(&lp))?;
            entries.push(ManifestClip {
                id: c.id.clone(),
                wav,
                labels,
                augmentation: c.augmentation.clone(),
            });
        }
        let m = CorpusManifest {
            id: id.to_string(),
            seed,
            profile: profile.cloned(),
            noise_dir,
            clips: entries,
        };
        let path = dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&m).expect("manifest serializes");
        std::fs::write(&path, json + "\n").map_err(|e| Error::from(e).in_file(&path))?;
        Ok(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Noise recordings referenced by the augmentation records, if any.
    pub fn noise_bank(&self, root: &Path) -> Result<Option<NoiseBank>> {
        match &self.noise_dir {
            Some(d) => NoiseBank::load_dir(root.join(d)).map(Some),
            None => Ok(None),
        }
    }

    /// Reads every clip; `root` is the directory holding the manifest.
    pub fn load_clips(&self, root: &Path, replay: Replay) -> Result<Vec<LabeledClip>> {
        let noise = match replay {
            Replay::Augmented if self.clips.iter().any(|c| c.augmentation.is_some()) => self.noise_bank(root)?,
            _ => None,
        };
        let mut out = Vec::with_capacity(self.clips.len());
        for c in &self.clips {
            let audio = AudioClip::read_wav(root.join(&c.wav))?;
            let labels = PitchTrack::read_csv(root.join(&c.labels))?;
            if labels.len() != audio.frame_count() {
                return Err(Error::dim(format!("labels of {}", c.id), audio.frame_count(), labels.len()));
            }
            let audio = match (&c.augmentation, replay) {
                (Some(rec), Replay::Augmented) => apply_augmentation(&audio, rec, noise.as_ref())?,
                _ => audio,
            };
            out.push(LabeledClip {
                id: c.id.clone(),
                audio,
                f0: labels.frames.iter().map(|f| if f.voiced { f.f0_hz } else { 0.0 }).collect(),
                voiced: labels.frames.iter().map(|f| f.voiced).collect(),
                augmentation: c.augmentation.clone(),
            });
        }
        Ok(out)
    }

    /// Clean clips with their labels as references, for evaluation.
    pub fn reference_corpus(&self, root: &Path) -> Result<ReferenceCorpus> {
        Ok(reference_corpus(&self.id, &self.load_clips(root, Replay::Clean)?))
    }
}

pub fn reference_corpus(id: &str, clips: &[LabeledClip]) -> ReferenceCorpus {
    ReferenceCorpus {
        id: id.to_string(),
        source: CorpusSource::Synthetic,
        clips: clips
            .iter()
            .map(|c| ReferenceClip {
                id: c.id.clone(),
                audio: c.audio.clone(),
                reference: c.reference(),
                sex: None,
            })
            .collect(),
    }
}
