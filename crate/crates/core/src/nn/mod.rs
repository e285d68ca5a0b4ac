//! A small fully-connected network with hand-written backpropagation,
//! exposed to the optimizers as a mini-batched [`crate::Objective`].
//!
//! Parameters are flattened layer by layer: each layer's weight matrix
//! (`in_dim × out_dim`, row-major) followed by its bias vector.

mod data;
mod objective;

pub use data::{make_desk_dataset, Dataset, DeskKind, Task, BLOB_SEPARATION};
pub use objective::BatchedLoss;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::vector::{check_dims, ParamVector};

/// Probabilities fed to binary cross-entropy are clamped to `[ε, 1 − ε]`.
pub const BCE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Sigmoid,
    Softmax,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self { in_dim, out_dim, activation }
    }

    pub fn param_count(&self) -> usize {
        self.in_dim * self.out_dim + self.out_dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Softmax output, integer class targets.
    CrossEntropy,
    /// Sigmoid output, targets in `[0, 1]`; averaged over every output unit.
    BinaryCrossEntropy,
}

/// ReLU hidden layers and a softmax head, e.g. `[256, 384, 10]`.
pub fn classifier_layers(sizes: &[usize]) -> Result<Vec<LayerSpec>> {
    if sizes.len() < 2 {
        return Err(Error::invalid("a classifier needs at least input and output sizes"));
    }
    let last = sizes.len() - 2;
    Ok(sizes
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let act = if i == last { Activation::Softmax } else { Activation::Relu };
            LayerSpec::new(w[0], w[1], act)
        })
        .collect())
}

/// Encoder `encoder[0] → … → code` and its mirror image as decoder.
///
/// Sigmoids sit between hidden layers, the code layer is linear, and the
/// reconstruction goes through a sigmoid so binary cross-entropy is defined.
pub fn autoencoder_layers(encoder: &[usize]) -> Result<Vec<LayerSpec>> {
    if encoder.len() < 2 {
        return Err(Error::invalid("an encoder needs at least input and code sizes"));
    }
    let mut layers = Vec::new();
    let enc_last = encoder.len() - 2;
    for (i, w) in encoder.windows(2).enumerate() {
        let act = if i == enc_last { Activation::Identity } else { Activation::Sigmoid };
        layers.push(LayerSpec::new(w[0], w[1], act));
    }
    let decoder: Vec<usize> = encoder.iter().rev().copied().collect();
    for w in decoder.windows(2) {
        layers.push(LayerSpec::new(w[0], w[1], Activation::Sigmoid));
    }
    Ok(layers)
}

/// Checks the layer chain and its pairing with the loss.
pub fn validate_layers(layers: &[LayerSpec], loss: LossKind) -> Result<()> {
    let last = layers.last().ok_or_else(|| Error::invalid("network has no layers"))?;
    for (i, l) in layers.iter().enumerate() {
        if l.in_dim == 0 || l.out_dim == 0 {
            return Err(Error::invalid(format!("layer {i} has a zero dimension")));
        }
        if l.activation == Activation::Softmax && i + 1 != layers.len() {
            return Err(Error::invalid(format!("softmax is only allowed on the last layer, found on layer {i}")));
        }
    }
    for (i, w) in layers.windows(2).enumerate() {
        if w[0].out_dim != w[1].in_dim {
            return Err(Error::invalid(format!(
                "layer {i} outputs {} values but layer {} expects {}",
                w[0].out_dim,
                i + 1,
                w[1].in_dim
            )));
        }
    }
    let expected = match loss {
        LossKind::CrossEntropy => Activation::Softmax,
        LossKind::BinaryCrossEntropy => Activation::Sigmoid,
    };
    if last.activation != expected {
        return Err(Error::invalid(format!("{loss:?} needs a {expected:?} output layer")));
    }
    Ok(())
}

pub fn param_count(layers: &[LayerSpec]) -> usize {
    layers.iter().map(LayerSpec::param_count).sum()
}

/// Glorot/Xavier uniform weights, `U[−b, b]` with `b = √(6/(fan_in + fan_out))`,
/// and zero biases.
pub fn glorot_init(layers: &[LayerSpec], rng: &mut Rng) -> Result<ParamVector> {
    let mut params = Vec::with_capacity(param_count(layers));
    for l in layers {
        let bound = (6.0 / (l.in_dim + l.out_dim) as f64).sqrt();
        params.extend((0..l.in_dim * l.out_dim).map(|_| rng.uniform(-bound, bound)));
        params.extend(std::iter::repeat_n(0.0, l.out_dim));
    }
    ParamVector::new(params)
}

/// Targets for one batch.
#[derive(Debug, Clone, Copy)]
pub enum BatchTargets<'a> {
    Labels(&'a [usize]),
    Dense(&'a [f64]),
}

/// A batch of `rows` samples stored row-major.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    pub inputs: &'a [f64],
    pub targets: BatchTargets<'a>,
    pub rows: usize,
}

/// Activations of every layer for one batch; `activations[0]` is the input.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub activations: Vec<Vec<f64>>,
    pub pre_activations: Vec<Vec<f64>>,
    pub rows: usize,
}

impl ForwardPass {
    pub fn outputs(&self) -> &[f64] {
        self.activations.last().expect("at least the input")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<LayerSpec>,
    params: ParamVector,
    loss_kind: LossKind,
    weight_decay: f64,
}

impl Network {
    pub fn new(layers: Vec<LayerSpec>, loss_kind: LossKind, weight_decay: f64, params: ParamVector) -> Result<Self> {
        validate_layers(&layers, loss_kind)?;
        check_dims(param_count(&layers), params.dim())?;
        if !(weight_decay >= 0.0 && weight_decay.is_finite()) {
            return Err(Error::invalid(format!("weight decay must be >= 0, got {weight_decay}")));
        }
        Ok(Self { layers, params, loss_kind, weight_decay })
    }

    /// A network with Glorot-initialized parameters.
    pub fn init(layers: Vec<LayerSpec>, loss_kind: LossKind, weight_decay: f64, rng: &mut Rng) -> Result<Self> {
        validate_layers(&layers, loss_kind)?;
        let params = glorot_init(&layers, rng)?;
        Self::new(layers, loss_kind, weight_decay, params)
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn set_params(&mut self, params: ParamVector) -> Result<()> {
        check_dims(self.params.dim(), params.dim())?;
        self.params = params;
        Ok(())
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss_kind
    }

    pub fn weight_decay(&self) -> f64 {
        self.weight_decay
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    /// 1.0 at every weight entry and 0.0 at every bias entry.
    pub fn weight_mask(&self) -> Vec<f64> {
        let mut mask = Vec::with_capacity(self.params.dim());
        for l in &self.layers {
            mask.extend(std::iter::repeat_n(1.0, l.in_dim * l.out_dim));
            mask.extend(std::iter::repeat_n(0.0, l.out_dim));
        }
        mask
    }

    pub fn forward(&self, inputs: &[f64], rows: usize) -> Result<ForwardPass> {
        self.forward_at(self.params.as_slice(), inputs, rows)
    }

    pub fn forward_at(&self, params: &[f64], inputs: &[f64], rows: usize) -> Result<ForwardPass> {
        check_dims(self.params.dim(), params.len())?;
        check_dims(rows * self.input_dim(), inputs.len())?;
        let mut activations = vec![inputs.to_vec()];
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut offset = 0;
        for layer in &self.layers {
            let (w, b) = layer_params(params, offset, layer);
            offset += layer.param_count();
            let x = activations.last().expect("input");
            let mut z = Vec::with_capacity(rows * layer.out_dim);
            for _ in 0..rows {
                z.extend_from_slice(b);
            }
            // z += x · w
            gemm(rows, layer.in_dim, layer.out_dim, x, false, w, false, &mut z, 1.0);
            let a = activate(layer.activation, &z, layer.out_dim);
            pre_activations.push(z);
            activations.push(a);
        }
        Ok(ForwardPass { activations, pre_activations, rows })
    }

    pub fn loss(&self, batch: &Batch<'_>) -> Result<f64> {
        self.loss_at(self.params.as_slice(), batch)
    }

    pub fn loss_and_grad(&self, batch: &Batch<'_>) -> Result<(f64, ParamVector)> {
        self.loss_and_grad_at(self.params.as_slice(), batch)
    }

    /// Mean batch loss plus `(weight_decay / 2)·‖W‖²` at `params`.
    pub fn loss_at(&self, params: &[f64], batch: &Batch<'_>) -> Result<f64> {
        if batch.rows == 0 {
            return Err(Error::invalid("empty batch"));
        }
        let pass = self.forward_at(params, batch.inputs, batch.rows)?;
        let (data_loss, _) = self.output_loss(&pass, batch, false)?;
        let loss = data_loss + self.decay_penalty(params);
        finite(loss, 0)
    }

    pub fn loss_and_grad_at(&self, params: &[f64], batch: &Batch<'_>) -> Result<(f64, ParamVector)> {
        if batch.rows == 0 {
            return Err(Error::invalid("empty batch"));
        }
        let pass = self.forward_at(params, batch.inputs, batch.rows)?;
        let (data_loss, mut delta) = self.output_loss(&pass, batch, true)?;
        let loss = finite(data_loss + self.decay_penalty(params), 0)?;

        let rows = batch.rows;
        let mut grad = vec![0.0; params.len()];
        let offsets: Vec<usize> = self
            .layers
            .iter()
            .scan(0, |acc, l| {
                let o = *acc;
                *acc += l.param_count();
                Some(o)
            })
            .collect();

        for (li, layer) in self.layers.iter().enumerate().rev() {
            let offset = offsets[li];
            let (w, _) = layer_params(params, offset, layer);
            let n_w = layer.in_dim * layer.out_dim;
            let x = &pass.activations[li];
            {
                let (gw, gb) = grad[offset..offset + layer.param_count()].split_at_mut(n_w);
                // gw = xᵀ · delta
                gemm(layer.in_dim, rows, layer.out_dim, x, true, &delta, false, gw, 0.0);
                for (g, wi) in gw.iter_mut().zip(w) {
                    *g += self.weight_decay * wi;
                }
                for row in delta.chunks_exact(layer.out_dim) {
                    for (g, d) in gb.iter_mut().zip(row) {
                        *g += d;
                    }
                }
            }
            if li > 0 {
                let mut upstream = vec![0.0; rows * layer.in_dim];
                // upstream = delta · wᵀ
                gemm(rows, layer.out_dim, layer.in_dim, &delta, false, w, true, &mut upstream, 0.0);
                let prev = &self.layers[li - 1];
                activation_backward(
                    prev.activation,
                    &pass.pre_activations[li - 1],
                    &pass.activations[li],
                    &mut upstream,
                )?;
                delta = upstream;
            }
        }
        let grad = ParamVector::from_raw(grad);
        if let Some((index, value)) = grad.first_non_finite() {
            return Err(Error::NonFinite { index, value });
        }
        Ok((loss, grad))
    }

    fn decay_penalty(&self, params: &[f64]) -> f64 {
        if self.weight_decay == 0.0 {
            return 0.0;
        }
        let mut sq = 0.0;
        let mut offset = 0;
        for l in &self.layers {
            let (w, _) = layer_params(params, offset, l);
            sq += w.iter().map(|v| v * v).sum::<f64>();
            offset += l.param_count();
        }
        0.5 * self.weight_decay * sq
    }

    /// Mean data loss and, if asked, its gradient w.r.t. the last layer's
    /// pre-activations (softmax/sigmoid folded in).
    fn output_loss(&self, pass: &ForwardPass, batch: &Batch<'_>, want_delta: bool) -> Result<(f64, Vec<f64>)> {
        let rows = pass.rows;
        let width = self.output_dim();
        let logits = pass.pre_activations.last().expect("at least one layer");
        let probs = pass.outputs();
        let mut delta = if want_delta { vec![0.0; rows * width] } else { Vec::new() };
        let mut total = 0.0;
        match (self.loss_kind, batch.targets) {
            (LossKind::CrossEntropy, BatchTargets::Labels(labels)) => {
                check_dims(rows, labels.len())?;
                for (r, &y) in labels.iter().enumerate() {
                    if y >= width {
                        return Err(Error::invalid(format!("label {y} out of range for {width} classes")));
                    }
                    let z = &logits[r * width..(r + 1) * width];
                    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                    total += lse - z[y];
                    if want_delta {
                        let d = &mut delta[r * width..(r + 1) * width];
                        d.copy_from_slice(&probs[r * width..(r + 1) * width]);
                        d[y] -= 1.0;
                    }
                }
                let scale = 1.0 / rows as f64;
                delta.iter_mut().for_each(|d| *d *= scale);
                Ok((total * scale, delta))
            }
            (LossKind::BinaryCrossEntropy, BatchTargets::Dense(targets)) => {
                check_dims(rows * width, targets.len())?;
                for (i, (&p_raw, &y)) in probs.iter().zip(targets).enumerate() {
                    let p = p_raw.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
                    total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
                    if want_delta && p == p_raw {
                        delta[i] = p - y;
                    }
                }
                let scale = 1.0 / (rows * width) as f64;
                delta.iter_mut().for_each(|d| *d *= scale);
                Ok((total * scale, delta))
            }
            (kind, _) => Err(Error::invalid(format!("{kind:?} got targets of the wrong kind"))),
        }
    }
}

fn finite(v: f64, index: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { index, value: v })
    }
}

fn layer_params<'a>(params: &'a [f64], offset: usize, layer: &LayerSpec) -> (&'a [f64], &'a [f64]) {
    let n_w = layer.in_dim * layer.out_dim;
    let block = &params[offset..offset + n_w + layer.out_dim];
    block.split_at(n_w)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn activate(act: Activation, z: &[f64], width: usize) -> Vec<f64> {
    match act {
        Activation::Relu => z.iter().map(|&v| v.max(0.0)).collect(),
        Activation::Sigmoid => z.iter().map(|&v| sigmoid(v)).collect(),
        Activation::Identity => z.to_vec(),
        Activation::Softmax => {
            let mut out = Vec::with_capacity(z.len());
            for row in z.chunks_exact(width) {
                let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let start = out.len();
                out.extend(row.iter().map(|v| (v - max).exp()));
                let sum: f64 = out[start..].iter().sum();
                out[start..].iter_mut().for_each(|v| *v /= sum);
            }
            out
        }
    }
}

/// Multiplies `upstream` (dL/da) in place by da/dz.
fn activation_backward(act: Activation, z: &[f64], a: &[f64], upstream: &mut [f64]) -> Result<()> {
    match act {
        Activation::Relu => {
            for (u, &zi) in upstream.iter_mut().zip(z) {
                if zi <= 0.0 {
                    *u = 0.0;
                }
            }
        }
        Activation::Sigmoid => {
            for (u, &ai) in upstream.iter_mut().zip(a) {
                *u *= ai * (1.0 - ai);
            }
        }
        Activation::Identity => {}
        Activation::Softmax => return Err(Error::invalid("softmax on a hidden layer")),
    }
    Ok(())
}

/// `c = op(a) · op(b) + beta·c` for row-major matrices, with `op(a)` of shape
/// `m × k` and `op(b)` of shape `k × n`.
#[allow(clippy::too_many_arguments)]
fn gemm(m: usize, k: usize, n: usize, a: &[f64], a_t: bool, b: &[f64], b_t: bool, c: &mut [f64], beta: f64) {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    assert_eq!(c.len(), m * n);
    let (rsa, csa) = if a_t { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if b_t { (1, k as isize) } else { (n as isize, 1) };
    // SAFETY: the asserts above guarantee every index the kernel touches is in bounds.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}
