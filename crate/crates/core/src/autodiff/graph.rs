//! Tape of tensor operations with a single reverse sweep.
//!
//! Nodes are appended in evaluation order, so the node vector is already a
//! topological order and `backward` walks it from the end. Parameters enter
//! the graph as leaves that remember their [`ParamId`]; `backward` adds the
//! leaf gradients into the owning [`Parameters`] store.
//!
//! Ops accept an optional leading batch axis: `conv2d` takes `[C,H,W]` or
//! `[B,C,H,W]`, `linear` and `quantum_layer` take `[n]` or `[B,n]`.

use std::sync::Arc;

use super::tensor::{ParamId, Parameters, Tensor};
use super::AutodiffError;
use crate::quantum::SamplerQnn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

#[derive(Debug)]
enum Op {
    Leaf { param: Option<ParamId> },
    Conv2d { input: NodeId, weight: NodeId, bias: NodeId, batch: usize, c_in: usize, h: usize, w: usize, k: usize },
    Relu { input: NodeId },
    Linear { input: NodeId, weight: NodeId, bias: NodeId, batch: usize },
    Reshape { input: NodeId },
    Quantum { input: NodeId, weights: NodeId, qnn: Arc<SamplerQnn>, batch: usize },
    Gather { input: NodeId, indices: Vec<usize> },
    Mse { pred: NodeId, target: Vec<f64> },
}

#[derive(Debug)]
struct Node {
    shape: Vec<usize>,
    value: Vec<f64>,
    needs_grad: bool,
    op: Op,
}

#[derive(Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
}

fn shape_err(msg: String) -> AutodiffError {
    AutodiffError::Shape(msg)
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &[f64] {
        &self.nodes[id.0].value
    }

    pub fn shape(&self, id: NodeId) -> &[usize] {
        &self.nodes[id.0].shape
    }

    fn push(&mut self, shape: Vec<usize>, value: Vec<f64>, needs_grad: bool, op: Op) -> NodeId {
        debug_assert_eq!(shape.iter().product::<usize>(), value.len());
        self.nodes.push(Node { shape, value, needs_grad, op });
        NodeId(self.nodes.len() - 1)
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    /// Constant input; no gradient flows into it.
    pub fn constant(&mut self, tensor: &Tensor) -> NodeId {
        self.push(tensor.shape().to_vec(), tensor.values().to_vec(), false, Op::Leaf { param: None })
    }

    /// Leaf bound to a parameter tensor. Gradients reach the tensor only if it
    /// is marked `requires_grad`.
    pub fn param(&mut self, params: &Parameters, id: ParamId) -> NodeId {
        let t = params.get(id);
        self.push(t.shape().to_vec(), t.values().to_vec(), t.requires_grad(), Op::Leaf { param: Some(id) })
    }

    /// Stride-1, unpadded cross-correlation plus per-channel bias.
    pub fn conv2d(&mut self, input: NodeId, weight: NodeId, bias: NodeId) -> Result<NodeId, AutodiffError> {
        let (ishape, wshape, bshape) =
            (self.node(input).shape.clone(), self.node(weight).shape.clone(), self.node(bias).shape.clone());
        let (batch, c_in, h, w, batched) = match ishape.as_slice() {
            &[c, h, w] => (1, c, h, w, false),
            &[b, c, h, w] => (b, c, h, w, true),
            s => return Err(shape_err(format!("conv2d input must be [C,H,W] or [B,C,H,W], got {s:?}"))),
        };
        let (c_out, k) = match wshape.as_slice() {
            &[o, c, k1, k2] if c == c_in && k1 == k2 => (o, k1),
            s => return Err(shape_err(format!("conv2d weight {s:?} incompatible with {c_in} input channels"))),
        };
        if bshape != [c_out] {
            return Err(shape_err(format!("conv2d bias {bshape:?}, expected [{c_out}]")));
        }
        if k == 0 || k > h || k > w {
            return Err(shape_err(format!("conv2d kernel {k} does not fit a {h}x{w} input")));
        }
        let (oh, ow) = (h - k + 1, w - k + 1);
        let x = &self.node(input).value;
        let wt = &self.node(weight).value;
        let b = &self.node(bias).value;
        let geom = ConvGeom { c_in, h, w, k };
        let q = geom.patch_len();
        let mut out = vec![0.0; batch * c_out * oh * ow];
        let mut patches = vec![0.0; oh * ow * q];
        for n in 0..batch {
            geom.im2col(&x[n * c_in * h * w..(n + 1) * c_in * h * w], &mut patches);
            for o in 0..c_out {
                let wo = &wt[o * q..(o + 1) * q];
                let ob = &mut out[(n * c_out + o) * oh * ow..(n * c_out + o + 1) * oh * ow];
                for (p, v) in ob.iter_mut().enumerate() {
                    *v = b[o] + dot(wo, &patches[p * q..(p + 1) * q]);
                }
            }
        }
        let shape = if batched { vec![batch, c_out, oh, ow] } else { vec![c_out, oh, ow] };
        let needs = self.node(input).needs_grad || self.node(weight).needs_grad || self.node(bias).needs_grad;
        Ok(self.push(shape, out, needs, Op::Conv2d { input, weight, bias, batch, c_in, h, w, k }))
    }

    pub fn relu(&mut self, input: NodeId) -> NodeId {
        let n = self.node(input);
        let out = n.value.iter().map(|&v| v.max(0.0)).collect();
        let (shape, needs) = (n.shape.clone(), n.needs_grad);
        self.push(shape, out, needs, Op::Relu { input })
    }

    /// `W x + b` for `x` of shape `[n]` or `[B,n]` and `W` of shape `[m,n]`.
    pub fn linear(&mut self, input: NodeId, weight: NodeId, bias: NodeId) -> Result<NodeId, AutodiffError> {
        let ishape = self.node(input).shape.clone();
        let (batch, n_in, batched) = match ishape.as_slice() {
            &[n] => (1, n, false),
            &[b, n] => (b, n, true),
            s => return Err(shape_err(format!("linear input must be [n] or [B,n], got {s:?}"))),
        };
        let m = match self.node(weight).shape.as_slice() {
            &[m, n] if n == n_in => m,
            s => return Err(shape_err(format!("linear weight {s:?} incompatible with input width {n_in}"))),
        };
        if self.node(bias).shape != [m] {
            return Err(shape_err(format!("linear bias {:?}, expected [{m}]", self.node(bias).shape)));
        }
        let x = &self.node(input).value;
        let wt = &self.node(weight).value;
        let b = &self.node(bias).value;
        let mut out = Vec::with_capacity(batch * m);
        for r in 0..batch {
            let xr = &x[r * n_in..(r + 1) * n_in];
            for o in 0..m {
                let wr = &wt[o * n_in..(o + 1) * n_in];
                out.push(b[o] + wr.iter().zip(xr).map(|(a, b)| a * b).sum::<f64>());
            }
        }
        let shape = if batched { vec![batch, m] } else { vec![m] };
        let needs = self.node(input).needs_grad || self.node(weight).needs_grad || self.node(bias).needs_grad;
        Ok(self.push(shape, out, needs, Op::Linear { input, weight, bias, batch }))
    }

    /// Collapses every axis into one, preserving row-major order.
    pub fn flatten(&mut self, input: NodeId) -> NodeId {
        let len = self.node(input).value.len();
        self.reshape_unchecked(input, vec![len])
    }

    /// Keeps the leading batch axis and collapses the rest.
    pub fn flatten_batch(&mut self, input: NodeId) -> Result<NodeId, AutodiffError> {
        let shape = &self.node(input).shape;
        if shape.is_empty() {
            return Err(shape_err("flatten_batch needs at least one axis".into()));
        }
        let b = shape[0];
        let rest = shape[1..].iter().product();
        Ok(self.reshape_unchecked(input, vec![b, rest]))
    }

    pub fn reshape(&mut self, input: NodeId, shape: Vec<usize>) -> Result<NodeId, AutodiffError> {
        if shape.iter().product::<usize>() != self.node(input).value.len() {
            return Err(shape_err(format!("cannot reshape {:?} to {shape:?}", self.node(input).shape)));
        }
        Ok(self.reshape_unchecked(input, shape))
    }

    fn reshape_unchecked(&mut self, input: NodeId, shape: Vec<usize>) -> NodeId {
        let n = self.node(input);
        let (value, needs) = (n.value.clone(), n.needs_grad);
        self.push(shape, value, needs, Op::Reshape { input })
    }

    /// Sampler-QNN layer: each input row feeds the circuit's input slots and
    /// `weights` its weight slots; output rows are measurement distributions.
    pub fn quantum_layer(
        &mut self,
        input: NodeId,
        weights: NodeId,
        qnn: Arc<SamplerQnn>,
    ) -> Result<NodeId, AutodiffError> {
        let ishape = self.node(input).shape.clone();
        let (batch, n_in, batched) = match ishape.as_slice() {
            &[n] => (1, n, false),
            &[b, n] => (b, n, true),
            s => return Err(shape_err(format!("quantum layer input must be [n] or [B,n], got {s:?}"))),
        };
        if n_in != qnn.n_inputs() {
            return Err(AutodiffError::Quantum(crate::quantum::QuantumError::Arity {
                what: "inputs",
                expected: qnn.n_inputs(),
                got: n_in,
            }));
        }
        let wv = &self.node(weights).value;
        let x = &self.node(input).value;
        let n_out = qnn.n_outputs();
        let mut out = Vec::with_capacity(batch * n_out);
        for r in 0..batch {
            out.extend(qnn.forward(&x[r * n_in..(r + 1) * n_in], wv)?);
        }
        let shape = if batched { vec![batch, n_out] } else { vec![n_out] };
        let needs = self.node(input).needs_grad || self.node(weights).needs_grad;
        Ok(self.push(shape, out, needs, Op::Quantum { input, weights, qnn, batch }))
    }

    /// Picks `input[r, indices[r]]` from a `[B,K]` node, giving `[B]`.
    pub fn gather(&mut self, input: NodeId, indices: &[usize]) -> Result<NodeId, AutodiffError> {
        let (b, k) = match self.node(input).shape.as_slice() {
            &[b, k] => (b, k),
            s => return Err(shape_err(format!("gather expects [B,K], got {s:?}"))),
        };
        if indices.len() != b || indices.iter().any(|&i| i >= k) {
            return Err(shape_err(format!("gather indices {indices:?} invalid for [{b},{k}]")));
        }
        let v = &self.node(input).value;
        let out = indices.iter().enumerate().map(|(r, &i)| v[r * k + i]).collect();
        let needs = self.node(input).needs_grad;
        Ok(self.push(vec![b], out, needs, Op::Gather { input, indices: indices.to_vec() }))
    }

    /// Mean squared error against a constant target of the same length.
    pub fn mse_loss(&mut self, pred: NodeId, target: &[f64]) -> Result<NodeId, AutodiffError> {
        let p = &self.node(pred).value;
        if p.len() != target.len() || p.is_empty() {
            return Err(shape_err(format!("mse_loss: prediction has {} values, target {}", p.len(), target.len())));
        }
        let loss = p.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / p.len() as f64;
        let needs = self.node(pred).needs_grad;
        Ok(self.push(vec![], vec![loss], needs, Op::Mse { pred, target: target.to_vec() }))
    }

    /// Reverse sweep from a scalar `loss`; parameter-leaf gradients are added
    /// into `params`. Gradients accumulate across calls until zeroed.
    pub fn backward(&self, loss: NodeId, params: &mut Parameters) -> Result<(), AutodiffError> {
        let root = self.node(loss);
        if root.value.len() != 1 {
            return Err(AutodiffError::Contract(format!(
                "backward needs a scalar root, got shape {:?}",
                root.shape
            )));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        grads[loss.0] = Some(vec![1.0]);
        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            if !node.needs_grad {
                continue;
            }
            self.backward_node(node, &g, &mut grads, params);
        }
        Ok(())
    }

    fn backward_node(&self, node: &Node, g: &[f64], grads: &mut [Option<Vec<f64>>], params: &mut Parameters) {
        let mut acc = |id: NodeId, delta: Vec<f64>| match &mut grads[id.0] {
            Some(existing) => existing.iter_mut().zip(&delta).for_each(|(e, d)| *e += d),
            slot @ None => *slot = Some(delta),
        };
        match &node.op {
            Op::Leaf { param } => {
                if let Some(id) = param {
                    let t = params.get_mut(*id);
                    if t.requires_grad() {
                        t.accumulate_grad(g);
                    }
                }
            }
            &Op::Conv2d { input, weight, bias, batch, c_in, h, w, k } => {
                let c_out = self.node(bias).value.len();
                let (oh, ow) = (h - k + 1, w - k + 1);
                let x = &self.node(input).value;
                let wt = &self.node(weight).value;
                if self.node(bias).needs_grad {
                    let mut gb = vec![0.0; c_out];
                    for n in 0..batch {
                        for (o, gbo) in gb.iter_mut().enumerate() {
                            let base = (n * c_out + o) * oh * ow;
                            *gbo += g[base..base + oh * ow].iter().sum::<f64>();
                        }
                    }
                    acc(bias, gb);
                }
                let geom = ConvGeom { c_in, h, w, k };
                let q = geom.patch_len();
                let (need_w, need_x) = (self.node(weight).needs_grad, self.node(input).needs_grad);
                let mut gw = vec![0.0; if need_w { wt.len() } else { 0 }];
                let mut gx = vec![0.0; if need_x { x.len() } else { 0 }];
                let mut patches = vec![0.0; oh * ow * q];
                let mut gpatches = vec![0.0; oh * ow * q];
                for n in 0..batch {
                    if need_w {
                        geom.im2col(&x[n * c_in * h * w..(n + 1) * c_in * h * w], &mut patches);
                    }
                    gpatches.iter_mut().for_each(|v| *v = 0.0);
                    for o in 0..c_out {
                        let go = &g[(n * c_out + o) * oh * ow..(n * c_out + o + 1) * oh * ow];
                        let wo = &wt[o * q..(o + 1) * q];
                        for (p, &gv) in go.iter().enumerate() {
                            if gv == 0.0 {
                                continue;
                            }
                            if need_w {
                                axpy(gv, &patches[p * q..(p + 1) * q], &mut gw[o * q..(o + 1) * q]);
                            }
                            if need_x {
                                axpy(gv, wo, &mut gpatches[p * q..(p + 1) * q]);
                            }
                        }
                    }
                    if need_x {
                        geom.col2im(&gpatches, &mut gx[n * c_in * h * w..(n + 1) * c_in * h * w]);
                    }
                }
                if need_w {
                    acc(weight, gw);
                }
                if need_x {
                    acc(input, gx);
                }
            }
            &Op::Relu { input } => {
                let x = &self.node(input).value;
                let gx = x.iter().zip(g).map(|(&xv, &gv)| if xv > 0.0 { gv } else { 0.0 }).collect();
                acc(input, gx);
            }
            &Op::Linear { input, weight, bias, batch } => {
                let m = self.node(bias).value.len();
                let x = &self.node(input).value;
                let n_in = x.len() / batch;
                let wt = &self.node(weight).value;
                if self.node(bias).needs_grad {
                    let mut gb = vec![0.0; m];
                    for r in 0..batch {
                        gb.iter_mut().zip(&g[r * m..(r + 1) * m]).for_each(|(a, b)| *a += b);
                    }
                    acc(bias, gb);
                }
                if self.node(weight).needs_grad {
                    let mut gw = vec![0.0; wt.len()];
                    for r in 0..batch {
                        let xr = &x[r * n_in..(r + 1) * n_in];
                        for o in 0..m {
                            let go = g[r * m + o];
                            gw[o * n_in..(o + 1) * n_in].iter_mut().zip(xr).for_each(|(a, xv)| *a += go * xv);
                        }
                    }
                    acc(weight, gw);
                }
                if self.node(input).needs_grad {
                    let mut gx = vec![0.0; x.len()];
                    for r in 0..batch {
                        let gxr = &mut gx[r * n_in..(r + 1) * n_in];
                        for o in 0..m {
                            let go = g[r * m + o];
                            gxr.iter_mut().zip(&wt[o * n_in..(o + 1) * n_in]).for_each(|(a, wv)| *a += go * wv);
                        }
                    }
                    acc(input, gx);
                }
            }
            &Op::Reshape { input } => acc(input, g.to_vec()),
            Op::Quantum { input, weights, qnn, batch } => {
                let (input, weights, batch) = (*input, *weights, *batch);
                let x = &self.node(input).value;
                let wv = &self.node(weights).value;
                let n_in = qnn.n_inputs();
                let n_out = qnn.n_outputs();
                let mut gx = vec![0.0; x.len()];
                let mut gw = vec![0.0; wv.len()];
                for r in 0..batch {
                    let (jx, jw) = qnn.jacobians(&x[r * n_in..(r + 1) * n_in], wv).expect("validated in forward");
                    let gr = &g[r * n_out..(r + 1) * n_out];
                    gx[r * n_in..(r + 1) * n_in].copy_from_slice(&jx.vjp(gr));
                    gw.iter_mut().zip(jw.vjp(gr)).for_each(|(a, b)| *a += b);
                }
                if self.node(input).needs_grad {
                    acc(input, gx);
                }
                if self.node(weights).needs_grad {
                    acc(weights, gw);
                }
            }
            Op::Gather { input, indices } => {
                let k = self.node(*input).shape[1];
                let mut gx = vec![0.0; self.node(*input).value.len()];
                for (r, &i) in indices.iter().enumerate() {
                    gx[r * k + i] += g[r];
                }
                acc(*input, gx);
            }
            Op::Mse { pred, target } => {
                let p = &self.node(*pred).value;
                let scale = 2.0 * g[0] / p.len() as f64;
                let gp = p.iter().zip(target).map(|(a, b)| scale * (a - b)).collect();
                acc(*pred, gp);
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yv, xv)| *yv += alpha * xv);
}

/// Unpadded stride-1 convolution geometry for one sample.
struct ConvGeom {
    c_in: usize,
    h: usize,
    w: usize,
    k: usize,
}

impl ConvGeom {
    /// Length of one receptive-field patch, ordered `(c, ki, kj)` like the
    /// weight tensor's trailing axes.
    fn patch_len(&self) -> usize {
        self.c_in * self.k * self.k
    }

    fn out_hw(&self) -> (usize, usize) {
        (self.h - self.k + 1, self.w - self.k + 1)
    }

    /// Rows of `patches` are output positions, columns patch entries.
    fn im2col(&self, x: &[f64], patches: &mut [f64]) {
        let (oh, ow) = self.out_hw();
        let (k, q) = (self.k, self.patch_len());
        for i in 0..oh {
            for j in 0..ow {
                let row = &mut patches[(i * ow + j) * q..(i * ow + j + 1) * q];
                for c in 0..self.c_in {
                    for ki in 0..k {
                        let src = c * self.h * self.w + (i + ki) * self.w + j;
                        row[(c * k + ki) * k..(c * k + ki + 1) * k].copy_from_slice(&x[src..src + k]);
                    }
                }
            }
        }
    }

    /// Scatter-adds patch gradients back onto the input grid.
    fn col2im(&self, patches: &[f64], gx: &mut [f64]) {
        let (oh, ow) = self.out_hw();
        let (k, q) = (self.k, self.patch_len());
        for i in 0..oh {
            for j in 0..ow {
                let row = &patches[(i * ow + j) * q..(i * ow + j + 1) * q];
                for c in 0..self.c_in {
                    for ki in 0..k {
                        let dst = c * self.h * self.w + (i + ki) * self.w + j;
                        axpy(1.0, &row[(c * k + ki) * k..(c * k + ki + 1) * k], &mut gx[dst..dst + k]);
                    }
                }
            }
        }
    }
}

/// Stateless helpers mirroring the graph methods, for callers that only need
/// a forward value on plain tensors.
pub mod eval {
    use super::*;

    pub fn conv2d(input: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<Tensor, AutodiffError> {
        let mut g = Graph::new();
        let (i, w, b) = (g.constant(input), g.constant(weight), g.constant(bias));
        let out = g.conv2d(i, w, b)?;
        Tensor::new(g.shape(out).to_vec(), g.value(out).to_vec())
    }

    pub fn linear(input: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<Tensor, AutodiffError> {
        let mut g = Graph::new();
        let (i, w, b) = (g.constant(input), g.constant(weight), g.constant(bias));
        let out = g.linear(i, w, b)?;
        Tensor::new(g.shape(out).to_vec(), g.value(out).to_vec())
    }

    pub fn relu(input: &Tensor) -> Tensor {
        let values = input.values().iter().map(|v| v.max(0.0)).collect();
        Tensor::new(input.shape().to_vec(), values).expect("same shape")
    }

    pub fn flatten(input: &Tensor) -> Tensor {
        Tensor::new(vec![input.len()], input.values().to_vec()).expect("same length")
    }
}
