//! Single-hidden-layer perceptrons: representation, forward and backward
//! passes, and a finite-difference gradient checker.
//!
//! Topology is fixed by design at one hidden layer (inputs -> hidden ->
//! outputs) with a linear output layer; only the hidden activation varies.
//! The classical threshold `T` of the single-neuron model is folded into a
//! learned additive bias (`b = -T`).

pub mod activation;
pub mod loss;

pub use activation::{log_sigmoid, sigmoid, softplus, ActivationKind};
pub use loss::{bce_loss, huber_loss, huber_loss_with_delta, LossKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("{0}")]
    Domain(String),
}

/// A single-hidden-layer feedforward network.
///
/// `w1` is `n_hidden x n_in`, `w2` is `n_out x n_hidden`; biases match their
/// layer's output width. The output activation is identity for every network
/// in this crate (classifiers emit logits; probabilities are produced by the
/// loss/inference layer).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronNet {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
    pub hidden_activation: ActivationKind,
    pub output_activation: ActivationKind,
}

impl PerceptronNet {
    /// All-zero parameters; useful as a shell to fill in and in tests.
    pub fn zeros(n_in: usize, n_hidden: usize, n_out: usize, hidden: ActivationKind) -> Self {
        Self {
            n_in,
            n_hidden,
            n_out,
            w1: Matrix::zeros(n_hidden, n_in),
            b1: vec![0.0; n_hidden],
            w2: Matrix::zeros(n_out, n_hidden),
            b2: vec![0.0; n_out],
            hidden_activation: hidden,
            output_activation: ActivationKind::Identity,
        }
    }

    /// A network that ignores its input and always emits `constant`
    /// (zero weights, output bias = constant). Used to pin component
    /// predictions in tests and worked examples.
    pub fn constant(n_in: usize, constant: f64) -> Self {
        let mut net = Self::zeros(n_in, 1, 1, ActivationKind::Identity);
        net.b2[0] = constant;
        net
    }

    pub fn parameter_count(&self) -> usize {
        self.n_hidden * self.n_in + self.n_hidden + self.n_out * self.n_hidden + self.n_out
    }

    pub fn is_finite(&self) -> bool {
        self.w1.is_finite()
            && self.w2.is_finite()
            && self.b1.iter().all(|v| v.is_finite())
            && self.b2.iter().all(|v| v.is_finite())
    }

    /// Shape-consistency check used when loading models from disk.
    pub fn shapes_consistent(&self) -> bool {
        self.w1.rows() == self.n_hidden
            && self.w1.cols() == self.n_in
            && self.b1.len() == self.n_hidden
            && self.w2.rows() == self.n_out
            && self.w2.cols() == self.n_hidden
            && self.b2.len() == self.n_out
    }
}

/// Intermediates captured by [`forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Vec<f64>,
    pub hidden_pre: Vec<f64>,
    pub hidden_post: Vec<f64>,
    pub output: Vec<f64>,
}

/// Parameter-shaped gradient (or moment) accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub d_w1: Matrix,
    pub d_b1: Vec<f64>,
    pub d_w2: Matrix,
    pub d_b2: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &PerceptronNet) -> Self {
        Self {
            d_w1: Matrix::zeros(net.n_hidden, net.n_in),
            d_b1: vec![0.0; net.n_hidden],
            d_w2: Matrix::zeros(net.n_out, net.n_hidden),
            d_b2: vec![0.0; net.n_out],
        }
    }

    pub fn accumulate(&mut self, other: &Gradients) {
        for (a, b) in self.d_w1.iter_mut().zip(other.d_w1.iter()) {
            *a += b;
        }
        for (a, b) in self.d_b1.iter_mut().zip(&other.d_b1) {
            *a += b;
        }
        for (a, b) in self.d_w2.iter_mut().zip(other.d_w2.iter()) {
            *a += b;
        }
        for (a, b) in self.d_b2.iter_mut().zip(&other.d_b2) {
            *a += b;
        }
    }
}

/// Hidden-layer sizing rule: the ceiling of the average of the input and
/// output layer widths.
pub fn hidden_size(n_in: usize, n_out: usize) -> Result<usize, NnError> {
    if n_in == 0 || n_out == 0 {
        return Err(NnError::Domain(format!(
            "hidden_size requires positive layer widths, got ({n_in}, {n_out})"
        )));
    }
    Ok((n_in + n_out).div_ceil(2))
}

/// Forward pass. Returns the output vector along with the cache the backward
/// pass needs.
pub fn forward(net: &PerceptronNet, input: &[f64]) -> Result<(Vec<f64>, ForwardCache), NnError> {
    if input.len() != net.n_in {
        return Err(NnError::Shape {
            context: "forward input",
            expected: net.n_in,
            actual: input.len(),
        });
    }
    let mut hidden_pre = net.w1.matvec(input);
    for (h, b) in hidden_pre.iter_mut().zip(&net.b1) {
        *h += b;
    }
    let hidden_post: Vec<f64> = hidden_pre
        .iter()
        .map(|&z| net.hidden_activation.value(z))
        .collect();
    let mut output = net.w2.matvec(&hidden_post);
    for (o, b) in output.iter_mut().zip(&net.b2) {
        *o += b;
    }
    // Output activation is identity by construction; apply anyway so the
    // cache is honest if that ever changes.
    for o in output.iter_mut() {
        *o = net.output_activation.value(*o);
    }
    let cache = ForwardCache {
        input: input.to_vec(),
        hidden_pre,
        hidden_post: hidden_post.clone(),
        output: output.clone(),
    };
    Ok((output, cache))
}

/// Exact chain-rule gradients of a scalar loss with respect to every
/// parameter, given `d loss / d output`.
pub fn backward(
    net: &PerceptronNet,
    cache: &ForwardCache,
    dloss_doutput: &[f64],
) -> Result<Gradients, NnError> {
    if dloss_doutput.len() != net.n_out {
        return Err(NnError::Shape {
            context: "backward upstream gradient",
            expected: net.n_out,
            actual: dloss_doutput.len(),
        });
    }
    if cache.input.len() != net.n_in || cache.hidden_pre.len() != net.n_hidden {
        return Err(NnError::Shape {
            context: "backward cache",
            expected: net.n_in,
            actual: cache.input.len(),
        });
    }

    let mut grads = Gradients::zeros_like(net);

    // Linear output layer: delta_out = upstream gradient.
    grads
        .d_w2
        .add_outer_scaled(dloss_doutput, &cache.hidden_post, 1.0);
    grads.d_b2.copy_from_slice(dloss_doutput);

    // Push through W2, then through the hidden activation at the cached
    // pre-activations.
    let d_hidden_post = net.w2.matvec_transpose(dloss_doutput);
    let d_hidden_pre: Vec<f64> = d_hidden_post
        .iter()
        .zip(&cache.hidden_pre)
        .map(|(&g, &z)| g * net.hidden_activation.derivative(z))
        .collect();

    grads
        .d_w1
        .add_outer_scaled(&d_hidden_pre, &cache.input, 1.0);
    grads.d_b1.copy_from_slice(&d_hidden_pre);

    Ok(grads)
}

/// Central-difference gradient verification.
///
/// Perturbs every parameter by ±h, evaluates the loss, and compares against
/// the analytic gradients from [`backward`]. Returns the maximum relative
/// error `|analytic - numeric| / max(|analytic|, |numeric|, 1e-8)`.
pub fn gradient_check(
    net: &PerceptronNet,
    loss: LossKind,
    input: &[f64],
    target: &[f64],
    h: f64,
) -> Result<f64, NnError> {
    if !(0.0 < h && h <= 1e-3) {
        return Err(NnError::Domain(format!(
            "step h must be in (0, 1e-3], got {h}"
        )));
    }

    let loss_at = |candidate: &PerceptronNet| -> Result<f64, NnError> {
        let (out, _) = forward(candidate, input)?;
        Ok(loss.evaluate(&out, target)?.0)
    };

    let (out, cache) = forward(net, input)?;
    let (_, dloss) = loss.evaluate(&out, target)?;
    let analytic = backward(net, &cache, &dloss)?;

    let mut max_rel = 0.0f64;
    let mut check = |analytic_g: f64, numeric_g: f64| {
        let denom = analytic_g.abs().max(numeric_g.abs()).max(1e-8);
        max_rel = max_rel.max((analytic_g - numeric_g).abs() / denom);
    };

    let mut probe = net.clone();

    for r in 0..net.n_hidden {
        for c in 0..net.n_in {
            let orig = net.w1.get(r, c);
            probe.w1.set(r, c, orig + h);
            let up = loss_at(&probe)?;
            probe.w1.set(r, c, orig - h);
            let dn = loss_at(&probe)?;
            probe.w1.set(r, c, orig);
            check(analytic.d_w1.get(r, c), (up - dn) / (2.0 * h));
        }
    }
    for i in 0..net.n_hidden {
        let orig = net.b1[i];
        probe.b1[i] = orig + h;
        let up = loss_at(&probe)?;
        probe.b1[i] = orig - h;
        let dn = loss_at(&probe)?;
        probe.b1[i] = orig;
        check(analytic.d_b1[i], (up - dn) / (2.0 * h));
    }
    for r in 0..net.n_out {
        for c in 0..net.n_hidden {
            let orig = net.w2.get(r, c);
            probe.w2.set(r, c, orig + h);
            let up = loss_at(&probe)?;
            probe.w2.set(r, c, orig - h);
            let dn = loss_at(&probe)?;
            probe.w2.set(r, c, orig);
            check(analytic.d_w2.get(r, c), (up - dn) / (2.0 * h));
        }
    }
    for i in 0..net.n_out {
        let orig = net.b2[i];
        probe.b2[i] = orig + h;
        let up = loss_at(&probe)?;
        probe.b2[i] = orig - h;
        let dn = loss_at(&probe)?;
        probe.b2[i] = orig;
        check(analytic.d_b2[i], (up - dn) / (2.0 * h));
    }

    Ok(max_rel)
}
