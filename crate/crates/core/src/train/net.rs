//! Trainable copy of the networks: batched forward pass with cached
//! activations and exact backpropagation, generic over the float type so the
//! gradients can be checked in double precision.
//!
//! Batches are laid out time-major: row `t·B + b` holds frame `t` of
//! sequence `b`. Convolution history and GRU state start at zero for every
//! sequence.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::AddAssign;

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis, LinalgScalar, ScalarOperand};
use num_traits::{Float, FromPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::nn::arch::{ArchSpec, CONV_KERNEL};
use crate::nn::weights::{ModelWeights, Tensor};

pub trait Real:
    Float + LinalgScalar + ScalarOperand + FromPrimitive + Sum + AddAssign + Debug + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

fn c<F: Real>(v: f64) -> F {
    F::from_f64(v).unwrap()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseP<F> {
    /// `out × in`
    pub w: Array2<F>,
    pub b: Array1<F>,
}

impl<F: Real> DenseP<F> {
    fn zeros(out: usize, inp: usize) -> Self {
        DenseP {
            w: Array2::zeros((out, inp)),
            b: Array1::zeros(out),
        }
    }

    /// `x·Wᵀ + b`
    fn affine(&self, x: ArrayView2<F>) -> Array2<F> {
        let mut y = Array2::zeros((x.nrows(), self.w.nrows()));
        general_mat_mul(F::one(), &x, &self.w.t(), F::zero(), &mut y);
        y += &self.b;
        y
    }

    /// Accumulates the weight gradients and returns `dA·W`.
    fn backward(&self, x: ArrayView2<F>, da: &Array2<F>, grad: &mut DenseP<F>, need_dx: bool) -> Option<Array2<F>> {
        general_mat_mul(F::one(), &da.t(), &x, F::one(), &mut grad.w);
        grad.b += &da.sum_axis(Axis(0));
        need_dx.then(|| da.dot(&self.w))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvP<F> {
    /// `[co][ci][kt][kl]`
    pub w: Vec<F>,
    pub b: Vec<F>,
    pub ci: usize,
    pub co: usize,
}

impl<F: Real> ConvP<F> {
    fn zeros(ci: usize, co: usize) -> Self {
        ConvP {
            w: vec![F::zero(); co * ci * CONV_KERNEL * CONV_KERNEL],
            b: vec![F::zero(); co],
            ci,
            co,
        }
    }

    fn tap(&self, co: usize, ci: usize, kt: usize) -> &[F] {
        &self.w[((co * self.ci + ci) * CONV_KERNEL + kt) * CONV_KERNEL..][..CONV_KERNEL]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GruP<F> {
    /// `3h × in`, gate blocks z, r, n
    pub w_ih: Array2<F>,
    pub w_hh: Array2<F>,
    pub b_ih: Array1<F>,
    pub b_hh: Array1<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net<F> {
    pub spec: ArchSpec,
    pub if1: Option<DenseP<F>>,
    pub if2: Option<DenseP<F>>,
    pub conv: Vec<ConvP<F>>,
    pub bn: Option<DenseP<F>>,
    pub gru: GruP<F>,
    pub out: DenseP<F>,
}

/// One batch of `b` sequences of `t` frames.
#[derive(Debug, Clone)]
pub struct Batch<F> {
    pub t: usize,
    pub b: usize,
    pub if_x: Option<Array2<F>>,
    pub xcorr: Option<Array2<F>>,
    pub target: Vec<usize>,
    /// 1 for voiced frames, 0 otherwise.
    pub weight: Vec<F>,
}

impl<F: Real> Batch<F> {
    pub fn rows(&self) -> usize {
        self.t * self.b
    }

    pub fn voiced(&self) -> F {
        self.weight.iter().copied().sum()
    }
}

/// Activations kept from the forward pass.
#[derive(Debug, Clone)]
pub struct Cache<F> {
    if_h1: Option<Array2<F>>,
    if_h2: Option<Array2<F>>,
    /// post-activation output of each conv layer, `rows × (co·W)`
    conv: Vec<Array2<F>>,
    bn_in: Option<Array2<F>>,
    gru_in: Array2<F>,
    z: Array2<F>,
    r: Array2<F>,
    n: Array2<F>,
    /// recurrent part of the candidate pre-activation, `U_n h + b_hn`
    ghn: Array2<F>,
    h: Array2<F>,
    pub probs: Array2<F>,
}

fn tanh_inplace<F: Real>(a: &mut Array2<F>) {
    a.mapv_inplace(|v| v.tanh());
}

fn sigmoid<F: Real>(v: F) -> F {
    F::one() / (F::one() + (-v).exp())
}

impl<F: Real> Net<F> {
    pub fn zeros(spec: ArchSpec) -> Self {
        let d = spec.dims;
        let h = d.gru_hidden;
        Net {
            spec,
            if1: spec.kind.has_if_path().then(|| DenseP::zeros(d.if_hidden, d.if_in)),
            if2: spec.kind.has_if_path().then(|| DenseP::zeros(d.if_hidden, d.if_hidden)),
            conv: if spec.kind.has_conv() {
                spec.conv_channels().iter().map(|&(ci, co)| ConvP::zeros(ci, co)).collect()
            } else {
                Vec::new()
            },
            bn: spec.bottleneck_in().map(|i| DenseP::zeros(d.bottleneck, i)),
            gru: GruP {
                w_ih: Array2::zeros((3 * h, spec.gru_input())),
                w_hh: Array2::zeros((3 * h, h)),
                b_ih: Array1::zeros(3 * h),
                b_hh: Array1::zeros(3 * h),
            },
            out: DenseP::zeros(d.classes, h),
        }
    }

    /// Xavier-uniform dense and conv weights, `U(±1/√h)` GRU matrices,
    /// zero biases.
    pub fn init(spec: ArchSpec, rng: &mut impl Rng) -> Self {
        let mut net = Self::zeros(spec);
        let k2 = CONV_KERNEL * CONV_KERNEL;
        let mut fill = |v: &mut [F], bound: f64| {
            for x in v {
                *x = c(rng.gen_range(-bound..=bound));
            }
        };
        let xavier = |fan_in: usize, fan_out: usize| (6.0 / (fan_in + fan_out) as f64).sqrt();
        for d in [&mut net.if1, &mut net.if2, &mut net.bn].into_iter().flatten() {
            let (o, i) = d.w.dim();
            fill(d.w.as_slice_mut().unwrap(), xavier(i, o));
        }
        for l in &mut net.conv {
            fill(&mut l.w, xavier(l.ci * k2, l.co * k2));
        }
        let g = 1.0 / (spec.dims.gru_hidden as f64).sqrt();
        fill(net.gru.w_ih.as_slice_mut().unwrap(), g);
        fill(net.gru.w_hh.as_slice_mut().unwrap(), g);
        let (o, i) = net.out.w.dim();
        fill(net.out.w.as_slice_mut().unwrap(), xavier(i, o));
        net
    }

    /// Parameter slices in weight-file order.
    pub fn tensors(&self) -> Vec<&[F]> {
        let mut v: Vec<&[F]> = Vec::new();
        for d in [&self.if1, &self.if2].into_iter().flatten() {
            v.push(d.w.as_slice().unwrap());
            v.push(d.b.as_slice().unwrap());
        }
        for l in &self.conv {
            v.push(&l.w);
            v.push(&l.b);
        }
        if let Some(d) = &self.bn {
            v.push(d.w.as_slice().unwrap());
            v.push(d.b.as_slice().unwrap());
        }
        v.push(self.gru.w_ih.as_slice().unwrap());
        v.push(self.gru.w_hh.as_slice().unwrap());
        v.push(self.gru.b_ih.as_slice().unwrap());
        v.push(self.gru.b_hh.as_slice().unwrap());
        v.push(self.out.w.as_slice().unwrap());
        v.push(self.out.b.as_slice().unwrap());
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [F]> {
        let mut v: Vec<&mut [F]> = Vec::new();
        for d in [&mut self.if1, &mut self.if2].into_iter().flatten() {
            v.push(d.w.as_slice_mut().unwrap());
            v.push(d.b.as_slice_mut().unwrap());
        }
        for l in &mut self.conv {
            v.push(&mut l.w);
            v.push(&mut l.b);
        }
        if let Some(d) = &mut self.bn {
            v.push(d.w.as_slice_mut().unwrap());
            v.push(d.b.as_slice_mut().unwrap());
        }
        v.push(self.gru.w_ih.as_slice_mut().unwrap());
        v.push(self.gru.w_hh.as_slice_mut().unwrap());
        v.push(self.gru.b_ih.as_slice_mut().unwrap());
        v.push(self.gru.b_hh.as_slice_mut().unwrap());
        v.push(self.out.w.as_slice_mut().unwrap());
        v.push(self.out.b.as_slice_mut().unwrap());
        v
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn to_weights(&self) -> ModelWeights {
        let tensors = self
            .spec
            .tensors()
            .into_iter()
            .zip(self.tensors())
            .map(|(spec, data)| Tensor {
                name: spec.name.to_string(),
                shape: spec.shape,
                data: data.iter().map(|v| v.to_f32().unwrap()).collect(),
            })
            .collect();
        ModelWeights::from_tensors(self.spec, tensors).expect("layout matches spec")
    }

    pub fn from_weights(w: &ModelWeights) -> Self {
        let mut net = Self::zeros(*w.spec());
        for (dst, src) in net.tensors_mut().into_iter().zip(w.tensors()) {
            for (d, s) in dst.iter_mut().zip(&src.data) {
                *d = c(*s as f64);
            }
        }
        net
    }

    fn conv_forward(&self, layer: &ConvP<F>, x: &Array2<F>, t_len: usize, b_len: usize) -> Array2<F> {
        let w = self.spec.dims.xcorr_width;
        let mut y = Array2::zeros((x.nrows(), layer.co * w));
        for t in 0..t_len {
            for b in 0..b_len {
                let mut yrow = y.row_mut(t * b_len + b);
                let yr = yrow.as_slice_mut().unwrap();
                for co in 0..layer.co {
                    yr[co * w..(co + 1) * w].fill(layer.b[co]);
                }
                for kt in 0..CONV_KERNEL {
                    // kt = 2 is the current frame
                    let Some(src_t) = (t + kt).checked_sub(CONV_KERNEL - 1) else { continue };
                    let xrow = x.row(src_t * b_len + b);
                    let xr = xrow.as_slice().unwrap();
                    for ci in 0..layer.ci {
                        let xs = &xr[ci * w..(ci + 1) * w];
                        for co in 0..layer.co {
                            let k = layer.tap(co, ci, kt);
                            let ys = &mut yr[co * w..(co + 1) * w];
                            axpy(&mut ys[1..], k[0], &xs[..w - 1]);
                            axpy(ys, k[1], xs);
                            axpy(&mut ys[..w - 1], k[2], &xs[1..]);
                        }
                    }
                }
            }
        }
        tanh_inplace(&mut y);
        y
    }

    /// Accumulates kernel gradients; returns the input gradient when asked.
    fn conv_backward(
        &self,
        layer: &ConvP<F>,
        x: &Array2<F>,
        da: &Array2<F>,
        grad: &mut ConvP<F>,
        (t_len, b_len): (usize, usize),
        need_dx: bool,
    ) -> Option<Array2<F>> {
        let w = self.spec.dims.xcorr_width;
        let mut dx = need_dx.then(|| Array2::zeros(x.dim()));
        for t in 0..t_len {
            for b in 0..b_len {
                let darow = da.row(t * b_len + b);
                let dar = darow.as_slice().unwrap();
                for co in 0..layer.co {
                    grad.b[co] += dar[co * w..(co + 1) * w].iter().copied().sum();
                }
                for kt in 0..CONV_KERNEL {
                    let Some(src_t) = (t + kt).checked_sub(CONV_KERNEL - 1) else { continue };
                    let r = src_t * b_len + b;
                    let xrow = x.row(r);
                    let xr = xrow.as_slice().unwrap();
                    for ci in 0..layer.ci {
                        let xs = &xr[ci * w..(ci + 1) * w];
                        for co in 0..layer.co {
                            let d = &dar[co * w..(co + 1) * w];
                            let gi = ((co * layer.ci + ci) * CONV_KERNEL + kt) * CONV_KERNEL;
                            grad.w[gi] += dot(&d[1..], &xs[..w - 1]);
                            grad.w[gi + 1] += dot(d, xs);
                            grad.w[gi + 2] += dot(&d[..w - 1], &xs[1..]);
                        }
                    }
                    if let Some(dx) = dx.as_mut() {
                        let mut dxrow = dx.row_mut(r);
                        let dxr = dxrow.as_slice_mut().unwrap();
                        for ci in 0..layer.ci {
                            let dxs = &mut dxr[ci * w..(ci + 1) * w];
                            for co in 0..layer.co {
                                let k = layer.tap(co, ci, kt);
                                let d = &dar[co * w..(co + 1) * w];
                                axpy(&mut dxs[..w - 1], k[0], &d[1..]);
                                axpy(dxs, k[1], d);
                                axpy(&mut dxs[1..], k[2], &d[..w - 1]);
                            }
                        }
                    }
                }
            }
        }
        dx
    }

    /// Forward pass; returns the voiced-normalized loss and the cache.
    pub fn forward(&self, batch: &Batch<F>) -> Result<(F, Cache<F>)> {
        let rows = batch.rows();
        if batch.target.len() != rows || batch.weight.len() != rows {
            return Err(Error::dim("batch labels", rows, batch.target.len().min(batch.weight.len())));
        }
        let (mut if_h1, mut if_h2) = (None, None);
        if let (Some(l1), Some(l2)) = (&self.if1, &self.if2) {
            let x = batch
                .if_x
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("batch has no IF features".into()))?;
            let mut h1 = l1.affine(x.view());
            tanh_inplace(&mut h1);
            let mut h2 = l2.affine(h1.view());
            tanh_inplace(&mut h2);
            if_h1 = Some(h1);
            if_h2 = Some(h2);
        }
        let mut conv = Vec::new();
        if !self.conv.is_empty() {
            let mut cur = batch
                .xcorr
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("batch has no Xcorr features".into()))?
                .clone();
            for layer in &self.conv {
                cur = self.conv_forward(layer, &cur, batch.t, batch.b);
                conv.push(cur.clone());
            }
        }
        let (bn_in, gru_in) = match &self.bn {
            Some(bn) => {
                let cat = match (&if_h2, conv.last()) {
                    (Some(a), Some(b)) => ndarray::concatenate(Axis(1), &[a.view(), b.view()]).unwrap(),
                    (None, Some(b)) => b.clone(),
                    _ => unreachable!("bottleneck without conv input"),
                };
                let mut y = bn.affine(cat.view());
                tanh_inplace(&mut y);
                (Some(cat), y)
            }
            None => (None, if_h2.clone().unwrap()),
        };

        let h = self.spec.dims.gru_hidden;
        let b = batch.b;
        let mut gx = Array2::zeros((rows, 3 * h));
        general_mat_mul(F::one(), &gru_in, &self.gru.w_ih.t(), F::zero(), &mut gx);
        gx += &self.gru.b_ih;
        let mut z = Array2::zeros((rows, h));
        let mut r = Array2::zeros((rows, h));
        let mut n = Array2::zeros((rows, h));
        let mut ghn = Array2::zeros((rows, h));
        let mut hs = Array2::<F>::zeros((rows, h));
        let mut prev = Array2::<F>::zeros((b, h));
        let mut gh = Array2::<F>::zeros((b, 3 * h));
        for t in 0..batch.t {
            general_mat_mul(F::one(), &prev, &self.gru.w_hh.t(), F::zero(), &mut gh);
            gh += &self.gru.b_hh;
            for bi in 0..b {
                let row = t * b + bi;
                for j in 0..h {
                    let zz = sigmoid(gx[[row, j]] + gh[[bi, j]]);
                    let rr = sigmoid(gx[[row, h + j]] + gh[[bi, h + j]]);
                    let hn = gh[[bi, 2 * h + j]];
                    let nn = (gx[[row, 2 * h + j]] + rr * hn).tanh();
                    let hp = prev[[bi, j]];
                    z[[row, j]] = zz;
                    r[[row, j]] = rr;
                    n[[row, j]] = nn;
                    ghn[[row, j]] = hn;
                    hs[[row, j]] = (F::one() - zz) * hp + zz * nn;
                }
            }
            prev.assign(&hs.slice(s![t * b..(t + 1) * b, ..]));
        }

        let mut probs = self.out.affine(hs.view());
        let mut loss = F::zero();
        let floor: F = c(1e-12);
        for (i, mut row) in probs.axis_iter_mut(Axis(0)).enumerate() {
            let max = row.iter().copied().fold(F::neg_infinity(), F::max);
            row.mapv_inplace(|v| (v - max).exp());
            let sum: F = row.sum();
            row.mapv_inplace(|v| v / sum);
            if batch.weight[i] != F::zero() {
                loss += -batch.weight[i] * row[batch.target[i]].max(floor).ln();
            }
        }
        let nv = batch.voiced();
        let loss = if nv > F::zero() { loss / nv } else { F::zero() };
        if !loss.is_finite() {
            return Err(Error::NonFinite("loss".into()));
        }
        Ok((
            loss,
            Cache {
                if_h1,
                if_h2,
                conv,
                bn_in,
                gru_in,
                z,
                r,
                n,
                ghn,
                h: hs,
                probs,
            },
        ))
    }

    /// Exact gradient of the batch loss with respect to every parameter.
    pub fn backward(&self, batch: &Batch<F>, cache: &Cache<F>) -> Result<Net<F>> {
        let mut g = Net::zeros(self.spec);
        let nv = batch.voiced();
        if nv == F::zero() {
            return Ok(g);
        }
        let rows = batch.rows();
        let (b, h) = (batch.b, self.spec.dims.gru_hidden);

        // softmax + weighted cross-entropy
        let mut dlogits = cache.probs.clone();
        for (i, mut row) in dlogits.axis_iter_mut(Axis(0)).enumerate() {
            let w = batch.weight[i] / nv;
            if w == F::zero() {
                row.fill(F::zero());
            } else {
                row[batch.target[i]] = row[batch.target[i]] - F::one();
                row.mapv_inplace(|v| v * w);
            }
        }
        let dh_all = self.out.backward(cache.h.view(), &dlogits, &mut g.out, true).unwrap();

        // GRU through time
        let mut dgx = Array2::<F>::zeros((rows, 3 * h));
        let mut dgh = Array2::<F>::zeros((b, 3 * h));
        let mut dh_next = Array2::<F>::zeros((b, h));
        let zero_prev = Array2::<F>::zeros((b, h));
        for t in (0..batch.t).rev() {
            let prev = if t == 0 {
                zero_prev.view()
            } else {
                cache.h.slice(s![(t - 1) * b..t * b, ..])
            };
            let mut dprev = Array2::<F>::zeros((b, h));
            for bi in 0..b {
                let row = t * b + bi;
                for j in 0..h {
                    let dh = dh_all[[row, j]] + dh_next[[bi, j]];
                    let (zz, rr, nn, hn) = (cache.z[[row, j]], cache.r[[row, j]], cache.n[[row, j]], cache.ghn[[row, j]]);
                    let hp = prev[[bi, j]];
                    let dz = dh * (nn - hp);
                    let dn = dh * zz;
                    dprev[[bi, j]] = dh * (F::one() - zz);
                    let dan = dn * (F::one() - nn * nn);
                    let dr = dan * hn;
                    let daz = dz * zz * (F::one() - zz);
                    let dar = dr * rr * (F::one() - rr);
                    dgx[[row, j]] = daz;
                    dgx[[row, h + j]] = dar;
                    dgx[[row, 2 * h + j]] = dan;
                    dgh[[bi, j]] = daz;
                    dgh[[bi, h + j]] = dar;
                    dgh[[bi, 2 * h + j]] = dan * rr;
                }
            }
            general_mat_mul(F::one(), &dgh.t(), &prev, F::one(), &mut g.gru.w_hh);
            g.gru.b_hh += &dgh.sum_axis(Axis(0));
            general_mat_mul(F::one(), &dgh, &self.gru.w_hh, F::one(), &mut dprev);
            dh_next = dprev;
        }
        general_mat_mul(F::one(), &dgx.t(), &cache.gru_in, F::one(), &mut g.gru.w_ih);
        g.gru.b_ih += &dgx.sum_axis(Axis(0));
        let dgru_in = dgx.dot(&self.gru.w_ih);

        // bottleneck, then split back into the IF and conv paths
        let (mut d_if2, mut d_conv) = (None, None);
        match &self.bn {
            Some(bn) => {
                let mut da = dgru_in;
                da.zip_mut_with(&cache.gru_in, |d, &y| *d = *d * (F::one() - y * y));
                let dcat = bn
                    .backward(cache.bn_in.as_ref().unwrap().view(), &da, g.bn.as_mut().unwrap(), true)
                    .unwrap();
                let split = if self.if1.is_some() { self.spec.dims.if_hidden } else { 0 };
                if split > 0 {
                    d_if2 = Some(dcat.slice(s![.., ..split]).to_owned());
                }
                d_conv = Some(dcat.slice(s![.., split..]).to_owned());
            }
            None => d_if2 = Some(dgru_in),
        }

        if let (Some(l1), Some(l2), Some(mut da2)) = (&self.if1, &self.if2, d_if2) {
            let h1 = cache.if_h1.as_ref().unwrap();
            let h2 = cache.if_h2.as_ref().unwrap();
            da2.zip_mut_with(h2, |d, &y| *d = *d * (F::one() - y * y));
            let mut da1 = l2.backward(h1.view(), &da2, g.if2.as_mut().unwrap(), true).unwrap();
            da1.zip_mut_with(h1, |d, &y| *d = *d * (F::one() - y * y));
            l1.backward(batch.if_x.as_ref().unwrap().view(), &da1, g.if1.as_mut().unwrap(), false);
        }

        if let Some(mut dy) = d_conv {
            let xcorr = batch.xcorr.as_ref().unwrap();
            for i in (0..self.conv.len()).rev() {
                dy.zip_mut_with(&cache.conv[i], |d, &y| *d = *d * (F::one() - y * y));
                let input = if i == 0 { xcorr } else { &cache.conv[i - 1] };
                match self.conv_backward(&self.conv[i], input, &dy, &mut g.conv[i], (batch.t, b), i > 0) {
                    Some(dx) => dy = dx,
                    None => break,
                }
            }
        }

        for (spec, t) in self.spec.tensors().iter().zip(g.tensors()) {
            if t.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("gradient of {}", spec.name)));
            }
        }
        Ok(g)
    }

    /// Output distributions for every row, without the loss bookkeeping.
    pub fn predict(&self, batch: &Batch<F>) -> Result<Array2<F>> {
        Ok(self.forward(batch)?.1.probs)
    }
}

#[inline]
fn axpy<F: Real>(y: &mut [F], a: F, x: &[F]) {
    for (yv, &xv) in y.iter_mut().zip(x) {
        *yv += a * xv;
    }
}

#[inline]
fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    let mut acc = [F::zero(); 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        for k in 0..4 {
            acc[k] += a[4 * i + k] * b[4 * i + k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Finite-difference check helpers, shared with the acceptance suite.
pub mod gradcheck {
    use super::*;
    use crate::nn::arch::{ArchKind, NetDims};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub const TINY: NetDims = NetDims {
        if_in: 6,
        if_hidden: 5,
        xcorr_width: 7,
        conv_channels: 3,
        bottleneck: 5,
        gru_hidden: 4,
        classes: 6,
    };

    /// A random double-precision model and batch with mixed voicing.
    pub fn random_problem(kind: ArchKind, seed: u64, t: usize, b: usize) -> (Net<f64>, Batch<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = ArchSpec::new(kind, TINY);
        let mut net = Net::<f64>::init(spec, &mut rng);
        for p in net.tensors_mut() {
            for v in p.iter_mut() {
                *v += rng.gen_range(-0.3..0.3);
            }
        }
        let rows = t * b;
        let mut mat = |cols: usize| Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-1.0..1.0));
        let if_x = kind.has_if_path().then(|| mat(TINY.if_in));
        let xcorr = kind.has_conv().then(|| mat(TINY.xcorr_width));
        let target = (0..rows).map(|_| rng.gen_range(0..TINY.classes)).collect();
        let weight = (0..rows).map(|i| if i % 3 == 1 { 0.0 } else { 1.0 }).collect();
        (net, Batch { t, b, if_x, xcorr, target, weight })
    }

    /// Largest relative error between analytic and central-difference
    /// gradients over `samples` parameters (every tensor at least once).
    pub fn max_relative_error(net: &Net<f64>, batch: &Batch<f64>, samples: usize, seed: u64) -> (f64, String) {
        let (_, cache) = net.forward(batch).unwrap();
        let grad = net.backward(batch, &cache).unwrap();
        let names: Vec<&str> = net.spec.tensors().iter().map(|t| t.name).collect();
        let sizes: Vec<usize> = net.tensors().iter().map(|t| t.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks: Vec<(usize, usize)> = (0..sizes.len()).map(|ti| (ti, rng.gen_range(0..sizes[ti]))).collect();
        while picks.len() < samples {
            let ti = rng.gen_range(0..sizes.len());
            picks.push((ti, rng.gen_range(0..sizes[ti])));
        }
        let eps = 1e-5;
        let mut worst = (0.0, String::new());
        for (ti, idx) in picks {
            let mut probe = net.clone();
            let orig = probe.tensors()[ti][idx];
            probe.tensors_mut()[ti][idx] = orig + eps;
            let up = probe.forward(batch).unwrap().0;
            probe.tensors_mut()[ti][idx] = orig - eps;
            let down = probe.forward(batch).unwrap().0;
            let numeric = (up - down) / (2.0 * eps);
            let analytic = grad.tensors()[ti][idx];
            // gradients below 1e-6 are compared on that absolute scale
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            if rel > worst.0 {
                worst = (rel, format!("{}[{idx}]: analytic {analytic:e}, numeric {numeric:e}", names[ti]));
            }
        }
        worst
    }
}
