//! Corpus synthesis, augmentation and training.

pub mod augment;
pub mod filter;
pub mod labels;
pub mod synth;

pub use augment::{apply_augmentation, augment, draw_augmentation, AugmentConfig, AugmentationRecord, NoiseRef};
pub use labels::quantize_pitch;
pub use synth::{synth_clip, synth_corpus, synth_noise, synth_noise_library, LabeledClip, NoiseKind, VoiceProfile};
pub mod adam;
pub mod net;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use net::{Batch, Net, Real};
pub mod data;
pub mod trainer;

pub use data::{Dataset, PreparedClip, Window};
pub use trainer::{train, TrainConfig, TrainLog, TrainLogRow, TrainOutcome};
pub mod manifest;

pub use manifest::{reference_corpus, CorpusManifest, ManifestClip, Replay};
