//! The three network layouts and their tensor tables.
//!
//! | arch  | path                                                              |
//! |-------|-------------------------------------------------------------------|
//! | IF    | dense 90→64, dense 64→64                                          |
//! | Xcorr | causal conv 1→8→8→1 over time × 257 lags, dense 257→64            |
//! | Joint | IF path ‖ conv stack, concat (64+257), dense 321→64               |
//!
//! followed in every case by a 64-unit GRU and a dense 64→192 softmax layer.
//! Intermediate layers use tanh.
//!
//! Two points of the layout are pinned by the trainable parameter totals
//! (IF 47424, Xcorr 54689, Joint 68769) rather than by the layer
//! description alone:
//!
//! * the GRU carries separate input and recurrent bias vectors
//!   (`3·(64·64 + 64·64) + 2·3·64 = 24960` parameters), and
//! * the IF path has two dense layers (`5824 + 4160`); with a single one
//!   neither the IF nor the Joint total can be reached.
//!
//! The last convolution produces a single channel (`8·9 + 1 = 73`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::{IF_DIM, NUM_CLASSES, XCORR_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    If,
    Xcorr,
    Joint,
}

impl ArchKind {
    pub const ALL: [ArchKind; 3] = [ArchKind::If, ArchKind::Xcorr, ArchKind::Joint];

    pub fn code(self) -> u32 {
        match self {
            ArchKind::If => 0,
            ArchKind::Xcorr => 1,
            ArchKind::Joint => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            ArchKind::If => "if",
            ArchKind::Xcorr => "xcorr",
            ArchKind::Joint => "joint",
        }
    }

    pub fn feature_kind(self) -> FeatureKind {
        match self {
            ArchKind::If => FeatureKind::If,
            ArchKind::Xcorr => FeatureKind::Xcorr,
            ArchKind::Joint => FeatureKind::Both,
        }
    }

    pub fn has_if_path(self) -> bool {
        matches!(self, ArchKind::If | ArchKind::Joint)
    }

    pub fn has_conv(self) -> bool {
        matches!(self, ArchKind::Xcorr | ArchKind::Joint)
    }
}

impl std::fmt::Display for ArchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ArchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "if" => Ok(ArchKind::If),
            "xcorr" => Ok(ArchKind::Xcorr),
            "joint" => Ok(ArchKind::Joint),
            other => Err(Error::InvalidArgument(format!(
                "unknown architecture {other:?} (expected if, xcorr or joint)"
            ))),
        }
    }
}

/// Layer widths. [`NetDims::STANDARD`] is the deployed configuration; smaller
/// values are used for gradient checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetDims {
    pub if_in: usize,
    pub if_hidden: usize,
    pub xcorr_width: usize,
    pub conv_channels: usize,
    pub bottleneck: usize,
    pub gru_hidden: usize,
    pub classes: usize,
}

impl NetDims {
    pub const STANDARD: NetDims = NetDims {
        if_in: IF_DIM,
        if_hidden: 64,
        xcorr_width: XCORR_DIM,
        conv_channels: 8,
        bottleneck: 64,
        gru_hidden: 64,
        classes: NUM_CLASSES,
    };
}

pub const CONV_KERNEL: usize = 3;
pub const CONV_LAYERS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: &'static str,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArchSpec {
    pub kind: ArchKind,
    pub dims: NetDims,
}

impl ArchSpec {
    pub fn standard(kind: ArchKind) -> Self {
        ArchSpec {
            kind,
            dims: NetDims::STANDARD,
        }
    }

    pub fn new(kind: ArchKind, dims: NetDims) -> Self {
        ArchSpec { kind, dims }
    }

    /// (in, out) channel pairs of the convolution stack.
    pub fn conv_channels(&self) -> [(usize, usize); CONV_LAYERS] {
        let c = self.dims.conv_channels;
        [(1, c), (c, c), (c, 1)]
    }

    /// Width of the bottleneck layer input, if the arch has one.
    pub fn bottleneck_in(&self) -> Option<usize> {
        match self.kind {
            ArchKind::If => None,
            ArchKind::Xcorr => Some(self.dims.xcorr_width),
            ArchKind::Joint => Some(self.dims.if_hidden + self.dims.xcorr_width),
        }
    }

    pub fn gru_input(&self) -> usize {
        match self.kind {
            ArchKind::If => self.dims.if_hidden,
            _ => self.dims.bottleneck,
        }
    }

    /// Tensor table in canonical (file) order.
    pub fn tensors(&self) -> Vec<TensorSpec> {
        let d = &self.dims;
        let t = |name, shape: &[usize]| TensorSpec {
            name,
            shape: shape.to_vec(),
        };
        let mut out = Vec::new();
        if self.kind.has_if_path() {
            out.push(t("if_dense1.weight", &[d.if_hidden, d.if_in]));
            out.push(t("if_dense1.bias", &[d.if_hidden]));
            out.push(t("if_dense2.weight", &[d.if_hidden, d.if_hidden]));
            out.push(t("if_dense2.bias", &[d.if_hidden]));
        }
        if self.kind.has_conv() {
            let names = [
                ("conv1.weight", "conv1.bias"),
                ("conv2.weight", "conv2.bias"),
                ("conv3.weight", "conv3.bias"),
            ];
            for ((w, b), (ci, co)) in names.into_iter().zip(self.conv_channels()) {
                out.push(t(w, &[co, ci, CONV_KERNEL, CONV_KERNEL]));
                out.push(t(b, &[co]));
            }
        }
        if let Some(bn_in) = self.bottleneck_in() {
            out.push(t("bottleneck.weight", &[d.bottleneck, bn_in]));
            out.push(t("bottleneck.bias", &[d.bottleneck]));
        }
        let h = d.gru_hidden;
        out.push(t("gru.weight_ih", &[3 * h, self.gru_input()]));
        out.push(t("gru.weight_hh", &[3 * h, h]));
        out.push(t("gru.bias_ih", &[3 * h]));
        out.push(t("gru.bias_hh", &[3 * h]));
        out.push(t("output.weight", &[d.classes, h]));
        out.push(t("output.bias", &[d.classes]));
        out
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(TensorSpec::len).sum()
    }
}

/// Trainable parameters of the deployed configuration of `arch`.
pub fn count_params(arch: ArchKind) -> usize {
    ArchSpec::standard(arch).param_count()
}
