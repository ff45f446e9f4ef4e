//! # pitchkit
//!
//! Hybrid pitch estimation for 16 kHz speech: cheap DSP features feeding
//! very small neural networks.
//!
//! Two feature families are computed per 10 ms frame (20 ms rectangular
//! window, 10 ms hop):
//!
//! * **Xcorr**: normalized cross-correlation of the LPC prediction residual
//!   over integer lags `0..=256` (257 values).
//! * **IF**: log-magnitude plus the unit-normalized phase difference between
//!   consecutive STFT frames for the first 30 bins (90 values).
//!
//! Three architectures consume them ([`nn::ArchKind`]): an IF model
//! (dense layers), an Xcorr model (causal 2-D convolutions over
//! time × lag) and a Joint model. All share a 64-unit GRU and a 192-way
//! softmax over 20-cent pitch classes anchored at 62.5 Hz.
//!
//! The crate also contains everything needed to train those models at desk
//! scale on a synthetic labelled corpus ([`train`]), a pure-DSP baseline
//! tracker ([`lpe`]) and the raw-cent-accuracy evaluation harness
//! ([`eval`]).
//!
//! ## Running the examples
//!
//! ```bash
//! cargo run --release --example model_complexity
//! cargo run --release --example train_if_model
//! ```
//!
//! The `pitchkit` binary wraps the same functionality as subcommands.

pub mod audio;
pub mod cli;
pub mod error;
pub mod eval;
pub mod features;
pub mod lpe;
mod par;
pub mod nn;
pub mod track;
pub mod train;

pub use audio::AudioClip;
pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureFrame, FeatureKind};
pub use nn::{ArchKind, ModelWeights, PitchClassDist, PitchModel};
pub use track::{PitchFrame, PitchTrack};

/// Sampling rate of every signal handled by the crate.
pub const SAMPLE_RATE: u32 = 16_000;
/// Analysis window length in samples (20 ms).
pub const WINDOW_LEN: usize = 320;
/// Hop between frames in samples (10 ms).
pub const HOP: usize = 160;
/// Largest cross-correlation lag.
pub const MAX_LAG: usize = 256;
/// Number of Xcorr feature values per frame.
pub const XCORR_DIM: usize = MAX_LAG + 1;
/// Number of STFT bins kept for the IF features.
pub const IF_BINS: usize = 30;
/// Number of IF feature values per frame.
pub const IF_DIM: usize = 3 * IF_BINS;
/// Number of pitch classes produced by the networks.
pub const NUM_CLASSES: usize = 192;
/// Frequency of pitch class 0, also the reference of the cent scale.
pub const PITCH_ANCHOR_HZ: f64 = 62.5;
/// Width of one pitch class.
pub const CENTS_PER_CLASS: f64 = 20.0;
/// Frames per second of audio.
pub const FRAME_RATE: f64 = SAMPLE_RATE as f64 / HOP as f64;
