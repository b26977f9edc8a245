//! Q-network architectures for the maze agent.
//!
//! Both variants share a two-layer convolutional trunk
//! (`1 -> 16 -> 32` channels, kernel 2 for `N <= 4` and 3 for `N >= 5`) and
//! differ in the head:
//!
//! * `ClassicalCnn`: `Linear(F, 32) + ReLU, Linear(32, 8) + ReLU, Linear(8, 4)`
//! * `HybridQnn`: `Linear(F, 2)`, a two-qubit sampler QNN (2 inputs, 4
//!   weights, 4 probabilities out), then `Linear(4, 4)`
//!
//! where `F = 32 * (N - 2k + 2)^2` is the flattened trunk width.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::autodiff::{Graph, NodeId, ParamId, Parameters, Tensor};
use crate::env::{observe_at, Cell, Maze, Observation};
use crate::quantum::SamplerQnn;

/// Repetitions of the Z feature map inside the hybrid network's quantum layer.
pub const FEATURE_MAP_REPS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    ClassicalCnn,
    HybridQnn,
}

impl Architecture {
    pub fn id(self) -> &'static str {
        match self {
            Architecture::ClassicalCnn => "classical",
            Architecture::HybridQnn => "hybrid",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Architecture::ClassicalCnn => "Classical CNN",
            Architecture::HybridQnn => "Hybrid QNN",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" | "classical_cnn" | "cnn" => Some(Architecture::ClassicalCnn),
            "hybrid" | "hybrid_qnn" | "qnn" => Some(Architecture::HybridQnn),
            _ => None,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Default convolution kernel for a maze side length.
pub fn default_kernel(maze_size: usize) -> Result<usize, AgentError> {
    match maze_size {
        0..=2 => Err(AgentError::Config(format!("no architecture for maze size {maze_size}"))),
        3 | 4 => Ok(2),
        _ => Ok(3),
    }
}

#[derive(Debug, Clone)]
enum Layer {
    Conv { weight: ParamId, bias: ParamId },
    Relu,
    Flatten,
    Linear { weight: ParamId, bias: ParamId },
    Quantum { weights: ParamId, qnn: Arc<SamplerQnn> },
}

impl Layer {
    fn kind(&self) -> &'static str {
        match self {
            Layer::Conv { .. } => "Conv2d",
            Layer::Relu => "ReLU",
            Layer::Flatten => "Flatten",
            Layer::Linear { .. } => "Linear",
            Layer::Quantum { .. } => "SamplerQNN",
        }
    }
}

/// One row of the architecture summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSummary {
    pub name: String,
    /// Per-sample output shape (batch axis omitted).
    pub output_shape: Vec<usize>,
    pub params: usize,
}

#[derive(Debug, Clone)]
pub struct QNetwork {
    architecture: Architecture,
    maze_size: usize,
    kernel: usize,
    layers: Vec<Layer>,
    params: Parameters,
}

struct Init<'a> {
    params: Parameters,
    rng: &'a mut ChaCha8Rng,
    counter: usize,
}

impl Init<'_> {
    fn uniform(&mut self, name: &str, shape: Vec<usize>, bound: f64) -> ParamId {
        let n: usize = shape.iter().product();
        let values = (0..n).map(|_| self.rng.gen_range(-bound..bound)).collect();
        self.params.add(name, Tensor::new(shape, values).expect("shape matches").with_grad())
    }

    fn conv(&mut self, c_in: usize, c_out: usize, k: usize) -> Layer {
        self.counter += 1;
        let bound = 1.0 / ((c_in * k * k) as f64).sqrt();
        let weight = self.uniform(&format!("conv{}.weight", self.counter), vec![c_out, c_in, k, k], bound);
        let bias = self.uniform(&format!("conv{}.bias", self.counter), vec![c_out], bound);
        Layer::Conv { weight, bias }
    }

    fn linear(&mut self, n_in: usize, n_out: usize) -> Layer {
        self.counter += 1;
        let bound = 1.0 / (n_in as f64).sqrt();
        let weight = self.uniform(&format!("linear{}.weight", self.counter), vec![n_out, n_in], bound);
        let bias = self.uniform(&format!("linear{}.bias", self.counter), vec![n_out], bound);
        Layer::Linear { weight, bias }
    }

    fn quantum(&mut self, qnn: SamplerQnn) -> Layer {
        self.counter += 1;
        let values = (0..qnn.n_weights()).map(|_| self.rng.gen_range(0.0..TAU)).collect();
        let weights = self.params.add(
            format!("qnn{}.weights", self.counter),
            Tensor::new(vec![qnn.n_weights()], values).expect("shape matches").with_grad(),
        );
        Layer::Quantum { weights, qnn: Arc::new(qnn) }
    }
}

impl QNetwork {
    /// Builds a freshly initialised network. Weights of convolutional and
    /// dense layers are uniform in `±1/sqrt(fan_in)`; quantum weights are
    /// uniform in `[0, 2π)`.
    pub fn build(architecture: Architecture, maze_size: usize, seed: u64) -> Result<Self, AgentError> {
        Self::build_with_kernel(architecture, maze_size, default_kernel(maze_size)?, seed)
    }

    /// Same as [`build`](Self::build) with an explicit trunk kernel size.
    pub fn build_with_kernel(
        architecture: Architecture,
        maze_size: usize,
        kernel: usize,
        seed: u64,
    ) -> Result<Self, AgentError> {
        if kernel == 0 || maze_size + 2 < 2 * kernel + 1 {
            return Err(AgentError::Config(format!(
                "kernel {kernel} leaves no spatial extent on a {maze_size}x{maze_size} maze"
            )));
        }
        let side = maze_size + 2 - 2 * kernel;
        let flat = 32 * side * side;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut init = Init { params: Parameters::new(), rng: &mut rng, counter: 0 };
        let mut layers =
            vec![init.conv(1, 16, kernel), Layer::Relu, init.conv(16, 32, kernel), Layer::Relu, Layer::Flatten];
        match architecture {
            Architecture::ClassicalCnn => {
                layers.push(init.linear(flat, 32));
                layers.push(Layer::Relu);
                layers.push(init.linear(32, 8));
                layers.push(Layer::Relu);
                layers.push(init.linear(8, 4));
            }
            Architecture::HybridQnn => {
                let qnn = SamplerQnn::maze_layer(FEATURE_MAP_REPS)?;
                layers.push(init.linear(flat, qnn.n_inputs()));
                let n_out = qnn.n_outputs();
                layers.push(init.quantum(qnn));
                layers.push(init.linear(n_out, 4));
            }
        }
        let params = init.params;
        Ok(Self { architecture, maze_size, kernel, layers, params })
    }

    pub fn architecture(&self) -> Architecture {
        self.architecture
    }

    pub fn maze_size(&self) -> usize {
        self.maze_size
    }

    pub fn kernel(&self) -> usize {
        self.kernel
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Parameters {
        &mut self.params
    }

    pub fn param_count(&self) -> usize {
        self.params.count()
    }

    /// Parameter counts of the layers that own parameters, in order.
    pub fn layer_param_counts(&self) -> Vec<usize> {
        self.summary().into_iter().filter(|l| l.params > 0).map(|l| l.params).collect()
    }

    /// Stops gradient accumulation into every parameter (target networks).
    pub fn freeze(&mut self) {
        for t in self.params.tensors_mut() {
            t.set_requires_grad(false);
            t.clear_grad();
        }
    }

    /// Copies parameter values from `other`, which must share the architecture.
    pub fn load_from(&mut self, other: &QNetwork) -> Result<(), AgentError> {
        if self.architecture != other.architecture || self.maze_size != other.maze_size || self.kernel != other.kernel {
            return Err(AgentError::Config("cannot copy between different architectures".into()));
        }
        self.params.copy_values_from(&other.params)?;
        Ok(())
    }

    /// Whether `other` has the same architecture, size and kernel.
    pub fn same_layout(&self, other: &QNetwork) -> bool {
        self.architecture == other.architecture && self.maze_size == other.maze_size && self.kernel == other.kernel
    }

    /// Records the forward pass of a `[B,1,N,N]` batch on `graph`; returns the
    /// `[B,4]` Q-value node and the node after every layer.
    pub fn forward_traced(&self, graph: &mut Graph, input: NodeId) -> Result<(NodeId, Vec<NodeId>), AgentError> {
        let mut x = input;
        let mut trace = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            x = match layer {
                Layer::Conv { weight, bias } => {
                    let (w, b) = (graph.param(&self.params, *weight), graph.param(&self.params, *bias));
                    graph.conv2d(x, w, b)?
                }
                Layer::Relu => graph.relu(x),
                Layer::Flatten => graph.flatten_batch(x)?,
                Layer::Linear { weight, bias } => {
                    let (w, b) = (graph.param(&self.params, *weight), graph.param(&self.params, *bias));
                    graph.linear(x, w, b)?
                }
                Layer::Quantum { weights, qnn } => {
                    let w = graph.param(&self.params, *weights);
                    graph.quantum_layer(x, w, Arc::clone(qnn))?
                }
            };
            trace.push(x);
        }
        Ok((x, trace))
    }

    pub fn forward(&self, graph: &mut Graph, input: NodeId) -> Result<NodeId, AgentError> {
        Ok(self.forward_traced(graph, input)?.0)
    }

    /// Packs observations into a `[B,1,N,N]` tensor.
    pub fn batch_tensor(&self, observations: &[&Observation]) -> Result<Tensor, AgentError> {
        let n = self.maze_size;
        if let Some(o) = observations.iter().find(|o| o.size() != n) {
            return Err(AgentError::Config(format!("observation of size {} fed to a {n}x{n} network", o.size())));
        }
        let mut values = Vec::with_capacity(observations.len() * n * n);
        for o in observations {
            values.extend_from_slice(o.values());
        }
        Ok(Tensor::new(vec![observations.len(), 1, n, n], values)?)
    }

    /// Q-values for a batch of observations, no gradient tracking.
    pub fn q_values_batch(&self, observations: &[&Observation]) -> Result<Vec<[f64; 4]>, AgentError> {
        let mut graph = Graph::new();
        let input = graph.constant(&self.batch_tensor(observations)?);
        let out = self.forward(&mut graph, input)?;
        Ok(graph.value(out).chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect())
    }

    pub fn q_values(&self, observation: &Observation) -> Result<[f64; 4], AgentError> {
        Ok(self.q_values_batch(&[observation])?[0])
    }

    /// Q-values with the agent placed on `cell`.
    pub fn q_values_at(&self, maze: &Maze, cell: Cell) -> Result<[f64; 4], AgentError> {
        self.q_values(&observe_at(maze, cell))
    }

    /// Layer table (name, per-sample output shape, parameter count). Layers are
    /// numbered in order, with the flatten step folded into the layer after it.
    pub fn summary(&self) -> Vec<LayerSummary> {
        let n = self.maze_size;
        let mut graph = Graph::new();
        let input = graph.constant(&Tensor::zeros(vec![1, 1, n, n]));
        let (_, trace) = self.forward_traced(&mut graph, input).expect("built architecture is consistent");
        let mut rows = Vec::new();
        for (layer, node) in self.layers.iter().zip(trace) {
            if matches!(layer, Layer::Flatten) {
                continue;
            }
            let params = match layer {
                Layer::Conv { weight, bias } | Layer::Linear { weight, bias } => {
                    self.params.get(*weight).len() + self.params.get(*bias).len()
                }
                Layer::Quantum { weights, .. } => self.params.get(*weights).len(),
                _ => 0,
            };
            rows.push(LayerSummary {
                name: format!("{}-{}", layer.kind(), rows.len() + 1),
                output_shape: graph.shape(node)[1..].to_vec(),
                params,
            });
        }
        rows
    }

    /// Text rendering of [`summary`](Self::summary) with a total line.
    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<16} {:<20} {:>8}\n", "Layer (type)", "Output Shape", "Param #");
        for row in self.summary() {
            let shape =
                std::iter::once("-1".to_string()).chain(row.output_shape.iter().map(usize::to_string)).collect::<Vec<_>>();
            out.push_str(&format!("{:<16} {:<20} {:>8}\n", row.name, format!("[{}]", shape.join(", ")), row.params));
        }
        out.push_str(&format!("Total params: {}\n", self.param_count()));
        out
    }
}

pub fn build_hybrid_qnn(maze_size: usize, seed: u64) -> Result<QNetwork, AgentError> {
    QNetwork::build(Architecture::HybridQnn, maze_size, seed)
}

pub fn build_classical_cnn(maze_size: usize, seed: u64) -> Result<QNetwork, AgentError> {
    QNetwork::build(Architecture::ClassicalCnn, maze_size, seed)
}
