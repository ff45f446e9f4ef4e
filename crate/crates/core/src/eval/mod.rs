//! Metrics, noisy-condition sweeps and reference-corpus handling.

pub mod corpus;
pub mod metrics;
pub mod mix;
pub mod sweep;

pub use corpus::{
    apply_cleanup, frame_energies, ingest_ptdb_layout, pitch_histogram, CleanupRules, CorpusSource, Ingested,
    PitchHistogram, PtdbLayout, ReferenceClip, ReferenceCorpus, Sex,
};
pub use metrics::{cents_to_hz, hz_to_cents, rca, rca_counts, CentValue, RcaCounts, RCA_THRESHOLD_CENTS};
pub use mix::{mix_at_snr, NoiseFit, Snr};
pub use sweep::{
    snr_sweep, EvalReport, EvalRow, LpeEstimator, NnEstimator, NoiseBank, PitchEstimator, SweepConfig,
    NN_VOICING_THRESHOLD,
};
