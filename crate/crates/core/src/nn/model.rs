//! Streaming forward pass of a full network.

use crate::error::{Error, Result};
use crate::features::FeatureFrame;
use crate::nn::arch::{ArchKind, ArchSpec};
use crate::nn::dist::PitchClassDist;
use crate::nn::layers::{Activation, CausalConv2d, ConvHistory, Dense, Gru, GruState};
use crate::nn::weights::ModelWeights;

/// Immutable network, shareable across threads. Per-stream state lives in
/// [`StreamState`].
#[derive(Debug, Clone)]
pub struct PitchModel {
    spec: ArchSpec,
    if_path: Option<[Dense; 2]>,
    conv: Option<[CausalConv2d; 3]>,
    bottleneck: Option<Dense>,
    gru: Gru,
    output: Dense,
}

/// GRU hidden state and convolution history of one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamState {
    gru: GruState,
    conv: Vec<ConvHistory>,
    frames: usize,
}

impl StreamState {
    pub fn frames_processed(&self) -> usize {
        self.frames
    }

    pub fn gru(&self) -> &GruState {
        &self.gru
    }
}

fn dense(w: &ModelWeights, prefix: &str, act: Activation) -> Result<Dense> {
    Dense::new(
        w.data(&format!("{prefix}.weight"))?.to_vec(),
        w.data(&format!("{prefix}.bias"))?.to_vec(),
        act,
    )
}

fn check_finite(v: &[f32], layer: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(layer.to_string()))
    }
}

impl PitchModel {
    pub fn from_weights(w: &ModelWeights) -> Result<Self> {
        let spec = *w.spec();
        let if_path = if spec.kind.has_if_path() {
            Some([
                dense(w, "if_dense1", Activation::Tanh)?,
                dense(w, "if_dense2", Activation::Tanh)?,
            ])
        } else {
            None
        };
        let conv = if spec.kind.has_conv() {
            let width = spec.dims.xcorr_width;
            let ch = spec.conv_channels();
            let layer = |i: usize| {
                CausalConv2d::new(
                    w.data(&format!("conv{}.weight", i + 1))?.to_vec(),
                    w.data(&format!("conv{}.bias", i + 1))?.to_vec(),
                    ch[i].0,
                    width,
                    Activation::Tanh,
                )
            };
            Some([layer(0)?, layer(1)?, layer(2)?])
        } else {
            None
        };
        let bottleneck = match spec.kind {
            ArchKind::If => None,
            _ => Some(dense(w, "bottleneck", Activation::Tanh)?),
        };
        let gru = Gru::new(
            w.data("gru.weight_ih")?.to_vec(),
            w.data("gru.weight_hh")?.to_vec(),
            w.data("gru.bias_ih")?.to_vec(),
            w.data("gru.bias_hh")?.to_vec(),
        )?;
        let output = dense(w, "output", Activation::None)?;
        Ok(PitchModel {
            spec,
            if_path,
            conv,
            bottleneck,
            gru,
            output,
        })
    }

    pub fn spec(&self) -> &ArchSpec {
        &self.spec
    }

    pub fn arch(&self) -> ArchKind {
        self.spec.kind
    }

    pub fn new_stream(&self) -> StreamState {
        StreamState {
            gru: self.gru.state(),
            conv: self
                .conv
                .as_ref()
                .map(|c| c.iter().map(CausalConv2d::history).collect())
                .unwrap_or_default(),
            frames: 0,
        }
    }

    /// Processes one frame of raw feature vectors.
    pub fn step_raw(
        &self,
        state: &mut StreamState,
        if_in: Option<&[f32]>,
        xcorr_in: Option<&[f32]>,
    ) -> Result<PitchClassDist> {
        let d = &self.spec.dims;
        let mut if_out = Vec::new();
        if let Some([l1, l2]) = &self.if_path {
            let x = if_in.ok_or_else(|| Error::ArchMismatch {
                expected: format!("{} (needs IF features)", self.spec.kind),
                found: "frame without IF features".into(),
            })?;
            let mut h1 = vec![0.0; d.if_hidden];
            l1.forward(x, &mut h1)?;
            check_finite(&h1, "if_dense1")?;
            if_out = vec![0.0; d.if_hidden];
            l2.forward(&h1, &mut if_out)?;
            check_finite(&if_out, "if_dense2")?;
        }
        let mut conv_out = Vec::new();
        if let Some(layers) = &self.conv {
            let x = xcorr_in.ok_or_else(|| Error::ArchMismatch {
                expected: format!("{} (needs Xcorr features)", self.spec.kind),
                found: "frame without Xcorr features".into(),
            })?;
            let mut cur = x.to_vec();
            for (i, (layer, hist)) in layers.iter().zip(state.conv.iter_mut()).enumerate() {
                let mut next = vec![0.0; layer.out_channels() * d.xcorr_width];
                layer.forward_frame(hist, &cur, &mut next)?;
                check_finite(&next, ["conv1", "conv2", "conv3"][i])?;
                cur = next;
            }
            conv_out = cur;
        }
        let gru_in = match &self.bottleneck {
            Some(bn) => {
                let mut cat = if_out;
                cat.extend_from_slice(&conv_out);
                let mut y = vec![0.0; bn.out_dim()];
                bn.forward(&cat, &mut y)?;
                check_finite(&y, "bottleneck")?;
                y
            }
            None => if_out,
        };
        self.gru.step(&mut state.gru, &gru_in)?;
        check_finite(&state.gru.hidden, "gru")?;
        let mut logits = vec![0.0; self.output.out_dim()];
        self.output.forward(&state.gru.hidden, &mut logits)?;
        check_finite(&logits, "output")?;
        state.frames += 1;
        Ok(PitchClassDist::from_logits(&logits))
    }

    pub fn step(&self, state: &mut StreamState, frame: &FeatureFrame) -> Result<PitchClassDist> {
        self.step_raw(
            state,
            frame.if_feats.as_ref().map(|f| f.values()),
            frame.xcorr.as_ref().map(|x| x.values()),
        )
    }

    /// Runs a fresh stream over a frame sequence.
    pub fn run(&self, frames: &[FeatureFrame]) -> Result<Vec<PitchClassDist>> {
        let mut state = self.new_stream();
        frames.iter().map(|f| self.step(&mut state, f)).collect()
    }
}
