//! Analytic complexity accounting, in FLOPS per second of audio with one
//! multiply-add counted as two FLOPs and 100 frames per second.
//!
//! Per-frame multiply-adds:
//!
//! * dense `in → out`: `in·out`
//! * conv `ci → co` over 257 lags: `257·9·ci·co`
//! * GRU: `3·(in·64 + 64·64)`
//! * FFT of the 320-sample frame: `2.5·N·log2 N`
//! * cross-correlation over 257 lags: `257·N`

use serde::Serialize;

use crate::nn::arch::{ArchKind, ArchSpec, CONV_KERNEL};
use crate::{FRAME_RATE, IF_BINS, WINDOW_LEN, XCORR_DIM};

/// Reference complexity figures (GFLOPS) the estimates are compared against.
pub mod reference {
    pub const IF_FEATURES: f64 = 0.001;
    pub const XCORR_FEATURES: f64 = 0.008;
    pub const JOINT_FEATURES: f64 = 0.009;
    pub const IF_DNN: f64 = 0.009;
    pub const XCORR_DNN: f64 = 0.048;
    pub const JOINT_DNN: f64 = 0.050;
    pub const LPE_TOTAL: f64 = 0.010;
}

/// Multiply-adds per frame for the IF features: FFT plus, per kept bin, the
/// conjugate product (4), normalization (3) and magnitude (2).
pub fn if_feature_macs() -> f64 {
    let n = WINDOW_LEN as f64;
    2.5 * n * n.log2() + 9.0 * IF_BINS as f64
}

/// Multiply-adds per frame for the Xcorr correlation itself.
pub fn xcorr_feature_macs() -> f64 {
    (XCORR_DIM * WINDOW_LEN) as f64
}

/// LPC analysis and residual filtering that precede the correlation
/// (Hann window, 17 autocorrelation lags, 16-tap filter over 576 samples).
/// Reported separately, not folded into the feature total.
pub fn lpc_macs(order: usize) -> f64 {
    let n = WINDOW_LEN as f64;
    n + (order + 1) as f64 * n + (order * order) as f64 + (order * (WINDOW_LEN + XCORR_DIM - 1)) as f64
}

pub fn dnn_macs(spec: &ArchSpec) -> f64 {
    let d = &spec.dims;
    let mut macs = 0usize;
    if spec.kind.has_if_path() {
        macs += d.if_in * d.if_hidden + d.if_hidden * d.if_hidden;
    }
    if spec.kind.has_conv() {
        for (ci, co) in spec.conv_channels() {
            macs += d.xcorr_width * CONV_KERNEL * CONV_KERNEL * ci * co;
        }
    }
    if let Some(bn_in) = spec.bottleneck_in() {
        macs += bn_in * d.bottleneck;
    }
    let h = d.gru_hidden;
    macs += 3 * (spec.gru_input() * h + h * h);
    macs += h * d.classes;
    macs as f64
}

pub fn feature_macs(kind: ArchKind) -> f64 {
    match kind {
        ArchKind::If => if_feature_macs(),
        ArchKind::Xcorr => xcorr_feature_macs(),
        ArchKind::Joint => if_feature_macs() + xcorr_feature_macs(),
    }
}

fn macs_to_flops(macs: f64) -> f64 {
    2.0 * macs * FRAME_RATE
}

/// FLOPS per second of audio for the network, optionally including features.
pub fn estimate_flops(arch: ArchKind, include_features: bool) -> f64 {
    let dnn = macs_to_flops(dnn_macs(&ArchSpec::standard(arch)));
    if include_features {
        dnn + macs_to_flops(feature_macs(arch))
    } else {
        dnn
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Complexity {
    pub arch: ArchKind,
    pub features_gflops: f64,
    pub dnn_gflops: f64,
    pub total_gflops: f64,
    /// LPC front end of the Xcorr features, not included in the totals.
    pub lpc_gflops: f64,
    pub reference_features_gflops: f64,
    pub reference_dnn_gflops: f64,
}

pub fn complexity(arch: ArchKind) -> Complexity {
    let features = macs_to_flops(feature_macs(arch)) / 1e9;
    let dnn = estimate_flops(arch, false) / 1e9;
    let (rf, rd) = match arch {
        ArchKind::If => (reference::IF_FEATURES, reference::IF_DNN),
        ArchKind::Xcorr => (reference::XCORR_FEATURES, reference::XCORR_DNN),
        ArchKind::Joint => (reference::JOINT_FEATURES, reference::JOINT_DNN),
    };
    Complexity {
        arch,
        features_gflops: features,
        dnn_gflops: dnn,
        total_gflops: features + dnn,
        lpc_gflops: if arch.has_conv() {
            macs_to_flops(lpc_macs(crate::features::lpc::DEFAULT_ORDER)) / 1e9
        } else {
            0.0
        },
        reference_features_gflops: rf,
        reference_dnn_gflops: rd,
    }
}

impl std::fmt::Display for Complexity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "arch {}", self.arch)?;
        writeln!(
            f,
            "  features  {:.4} GFLOPS  (reference {:.3})",
            self.features_gflops, self.reference_features_gflops
        )?;
        writeln!(
            f,
            "  dnn       {:.4} GFLOPS  (reference {:.3})",
            self.dnn_gflops, self.reference_dnn_gflops
        )?;
        write!(
            f,
            "  total     {:.4} GFLOPS  (reference {:.3})",
            self.total_gflops,
            self.reference_features_gflops + self.reference_dnn_gflops
        )?;
        if self.lpc_gflops > 0.0 {
            write!(f, "\n  lpc front end (not in total) {:.4} GFLOPS", self.lpc_gflops)?;
        }
        if self.arch.has_conv() {
            write!(
                f,
                "\n  note: correlation over a 320-sample window costs {:.4} GFLOPS, {:.1}x the reference Xcorr feature figure",
                macs_to_flops(xcorr_feature_macs()) / 1e9,
                macs_to_flops(xcorr_feature_macs()) / 1e9 / reference::XCORR_FEATURES
            )?;
        }
        Ok(())
    }
}
