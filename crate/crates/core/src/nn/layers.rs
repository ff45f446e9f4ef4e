//! Single-precision inference layers. Every layer works on one frame at a
//! time; recurrent and convolutional state live in the caller's stream state.

use crate::error::{Error, Result};
use crate::nn::arch::CONV_KERNEL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    None,
}

impl Activation {
    #[inline]
    fn apply(self, v: f32) -> f32 {
        match self {
            Activation::Tanh => v.tanh(),
            Activation::None => v,
        }
    }
}

#[inline]
fn sigmoid(v: f32) -> f32 {
    1.0 / (1.0 + (-v).exp())
}

/// `y[o] = Σ_i w[o*n_in + i] x[i]`, with y pre-filled with the bias.
#[inline]
fn gemv_acc(w: &[f32], x: &[f32], y: &mut [f32]) {
    let n_in = x.len();
    for (o, y) in y.iter_mut().enumerate() {
        let row = &w[o * n_in..(o + 1) * n_in];
        let mut acc = 0.0f32;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        *y += acc;
    }
}

/// Fully-connected layer, `y = act(W x + b)` with W row-major `[out][in]`.
#[derive(Debug, Clone)]
pub struct Dense {
    weight: Vec<f32>,
    bias: Vec<f32>,
    in_dim: usize,
    activation: Activation,
}

impl Dense {
    pub fn new(weight: Vec<f32>, bias: Vec<f32>, activation: Activation) -> Result<Self> {
        let out_dim = bias.len();
        if out_dim == 0 || weight.len() % out_dim != 0 {
            return Err(Error::dim("dense weight", out_dim, weight.len()));
        }
        Ok(Dense {
            in_dim: weight.len() / out_dim,
            weight,
            bias,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.bias.len()
    }

    pub fn forward(&self, x: &[f32], y: &mut [f32]) -> Result<()> {
        if x.len() != self.in_dim {
            return Err(Error::dim("dense input", self.in_dim, x.len()));
        }
        if y.len() != self.out_dim() {
            return Err(Error::dim("dense output", self.out_dim(), y.len()));
        }
        y.copy_from_slice(&self.bias);
        gemv_acc(&self.weight, x, y);
        for v in y.iter_mut() {
            *v = self.activation.apply(*v);
        }
        Ok(())
    }
}

/// One-shot fully-connected evaluation; the output width is the bias length.
pub fn fc_forward(input: &[f32], weight: &[f32], bias: &[f32], activation: Activation) -> Result<Vec<f32>> {
    if weight.len() != input.len() * bias.len() {
        return Err(Error::dim("fc weight", input.len() * bias.len(), weight.len()));
    }
    let layer = Dense::new(weight.to_vec(), bias.to_vec(), activation)?;
    let mut y = vec![0.0; bias.len()];
    layer.forward(input, &mut y)?;
    Ok(y)
}

/// Causal 3×3 convolution over (time, lag).
///
/// Weight layout is `[out][in][kt][kl]`. Time tap `kt = 2` is the current
/// frame, `kt = 1` and `kt = 0` the two previous ones (zero before the
/// stream start). Lag tap `kl` reads lag `l + kl - 1`, zero outside
/// `[0, width)`, so the width is preserved.
#[derive(Debug, Clone)]
pub struct CausalConv2d {
    weight: Vec<f32>,
    bias: Vec<f32>,
    in_ch: usize,
    out_ch: usize,
    width: usize,
    activation: Activation,
}

/// The two most recent input frames of one convolution layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvHistory {
    /// `[frame m-2, frame m-1]`, each `in_ch × width`.
    frames: [Vec<f32>; 2],
}

impl ConvHistory {
    pub fn zeros(in_ch: usize, width: usize) -> Self {
        ConvHistory {
            frames: [vec![0.0; in_ch * width], vec![0.0; in_ch * width]],
        }
    }
}

impl CausalConv2d {
    pub fn new(
        weight: Vec<f32>,
        bias: Vec<f32>,
        in_ch: usize,
        width: usize,
        activation: Activation,
    ) -> Result<Self> {
        let out_ch = bias.len();
        let expected = out_ch * in_ch * CONV_KERNEL * CONV_KERNEL;
        if weight.len() != expected {
            return Err(Error::dim("conv weight", expected, weight.len()));
        }
        Ok(CausalConv2d {
            weight,
            bias,
            in_ch,
            out_ch,
            width,
            activation,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_ch
    }

    pub fn out_channels(&self) -> usize {
        self.out_ch
    }

    pub fn history(&self) -> ConvHistory {
        ConvHistory::zeros(self.in_ch, self.width)
    }

    pub fn forward_frame(&self, hist: &mut ConvHistory, input: &[f32], out: &mut [f32]) -> Result<()> {
        let w = self.width;
        if input.len() != self.in_ch * w {
            return Err(Error::dim("conv input", self.in_ch * w, input.len()));
        }
        if out.len() != self.out_ch * w {
            return Err(Error::dim("conv output", self.out_ch * w, out.len()));
        }
        let taps: [&[f32]; 3] = [&hist.frames[0], &hist.frames[1], input];
        for co in 0..self.out_ch {
            let y = &mut out[co * w..(co + 1) * w];
            y.fill(self.bias[co]);
            for ci in 0..self.in_ch {
                for (kt, frame) in taps.iter().enumerate() {
                    let x = &frame[ci * w..(ci + 1) * w];
                    let k = &self.weight[((co * self.in_ch + ci) * CONV_KERNEL + kt) * CONV_KERNEL..][..CONV_KERNEL];
                    // lag l-1
                    for (yl, xl) in y[1..].iter_mut().zip(&x[..w - 1]) {
                        *yl += k[0] * xl;
                    }
                    for (yl, xl) in y.iter_mut().zip(x) {
                        *yl += k[1] * xl;
                    }
                    // lag l+1
                    for (yl, xl) in y[..w - 1].iter_mut().zip(&x[1..]) {
                        *yl += k[2] * xl;
                    }
                }
            }
            for v in y.iter_mut() {
                *v = self.activation.apply(*v);
            }
        }
        let [older, newer] = &mut hist.frames;
        std::mem::swap(older, newer);
        newer.copy_from_slice(input);
        Ok(())
    }
}

/// Runs a convolution over a whole frame sequence from zero history.
pub fn conv2d_causal_forward(layer: &CausalConv2d, frames: &[Vec<f32>]) -> Result<Vec<Vec<f32>>> {
    let mut hist = layer.history();
    frames
        .iter()
        .map(|f| {
            let mut out = vec![0.0; layer.out_ch * layer.width];
            layer.forward_frame(&mut hist, f, &mut out)?;
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GruState {
    pub hidden: Vec<f32>,
}

impl GruState {
    pub fn zeros(hidden: usize) -> Self {
        GruState {
            hidden: vec![0.0; hidden],
        }
    }
}

/// Gated recurrent unit with separate input and recurrent biases.
///
/// Gate rows are ordered update `z`, reset `r`, candidate `n`:
///
/// ```text
/// z  = σ(W_z x + b_iz + U_z h + b_hz)
/// r  = σ(W_r x + b_ir + U_r h + b_hr)
/// n  = tanh(W_n x + b_in + r ⊙ (U_n h + b_hn))
/// h' = (1 - z) ⊙ h + z ⊙ n
/// ```
#[derive(Debug, Clone)]
pub struct Gru {
    w_ih: Vec<f32>,
    w_hh: Vec<f32>,
    b_ih: Vec<f32>,
    b_hh: Vec<f32>,
    input: usize,
    hidden: usize,
}

impl Gru {
    pub fn new(w_ih: Vec<f32>, w_hh: Vec<f32>, b_ih: Vec<f32>, b_hh: Vec<f32>) -> Result<Self> {
        if b_ih.len() % 3 != 0 || b_hh.len() != b_ih.len() {
            return Err(Error::dim("gru bias", b_ih.len(), b_hh.len()));
        }
        let hidden = b_ih.len() / 3;
        if w_hh.len() != 3 * hidden * hidden {
            return Err(Error::dim("gru recurrent weight", 3 * hidden * hidden, w_hh.len()));
        }
        if hidden == 0 || w_ih.len() % (3 * hidden) != 0 {
            return Err(Error::dim("gru input weight", 3 * hidden, w_ih.len()));
        }
        Ok(Gru {
            input: w_ih.len() / (3 * hidden),
            w_ih,
            w_hh,
            b_ih,
            b_hh,
            hidden,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden
    }

    pub fn state(&self) -> GruState {
        GruState::zeros(self.hidden)
    }

    pub fn step(&self, state: &mut GruState, x: &[f32]) -> Result<()> {
        if x.len() != self.input {
            return Err(Error::dim("gru input", self.input, x.len()));
        }
        if state.hidden.len() != self.hidden {
            return Err(Error::dim("gru state", self.hidden, state.hidden.len()));
        }
        let h = self.hidden;
        let mut gx = self.b_ih.clone();
        gemv_acc(&self.w_ih, x, &mut gx);
        let mut gh = self.b_hh.clone();
        gemv_acc(&self.w_hh, &state.hidden, &mut gh);
        for j in 0..h {
            let z = sigmoid(gx[j] + gh[j]);
            let r = sigmoid(gx[h + j] + gh[h + j]);
            let n = (gx[2 * h + j] + r * gh[2 * h + j]).tanh();
            state.hidden[j] = (1.0 - z) * state.hidden[j] + z * n;
        }
        Ok(())
    }
}

/// Functional form of [`Gru::step`]: returns the new state and its output.
pub fn gru_step(gru: &Gru, state: &GruState, input: &[f32]) -> Result<(GruState, Vec<f32>)> {
    let mut next = state.clone();
    gru.step(&mut next, input)?;
    let out = next.hidden.clone();
    Ok((next, out))
}
