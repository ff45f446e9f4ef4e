//! Inference runtime for the three pitch networks.

pub mod arch;
pub mod dist;
pub mod flops;
pub mod layers;
pub mod model;
pub mod weights;

pub use arch::{count_params, ArchKind, ArchSpec, NetDims, TensorSpec};
pub use dist::{class_to_hz, max_class_hz, pitch_decode, PitchClassDist};
pub use flops::{complexity, estimate_flops, Complexity};
pub use model::{PitchModel, StreamState};
pub use weights::{ModelWeights, Tensor};
