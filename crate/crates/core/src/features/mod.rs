//! DSP feature extraction.
//!
//! [`FeatureExtractor`] is the streaming entry point. The free functions in
//! the submodules expose each stage on its own: framing, LPC analysis and
//! residual filtering, normalized cross-correlation, STFT and the
//! instantaneous-frequency features.

pub mod dump;
pub mod extractor;
pub mod frame;
pub mod lpc;
pub mod stft;
pub mod xcorr;

pub use dump::FeatureDump;
pub use extractor::{FeatureExtractor, FeatureFrame, FeatureKind};
pub use frame::{frame_signal, FrameGrid};
pub use lpc::{lpc_analyze, lpc_residual, LpcModel};
pub use stft::{if_features, stft_frame, IfFeatures, Stft, StftFrame};
pub use xcorr::{xcorr_features, XcorrFeatures};
