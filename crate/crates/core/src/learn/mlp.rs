//! Fully connected network with logistic activations on every layer,
//! trained by mini-batch SGD on binary cross-entropy.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

pub const MLP_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![64, 64, 32, 32, 16],
            learning_rate: 0.01,
            batch_size: 32,
            epochs: 50,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.len() != 5 || self.hidden.contains(&0) {
            return Err(Error::Config(format!(
                "mlp.hidden must list 5 positive layer sizes, got {:?}",
                self.hidden
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "mlp.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::Config("mlp.batch_size and mlp.epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `n_out x n_in`.
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub schema: u32,
    pub layers: Vec<Layer>,
    /// Mean training loss after each epoch.
    #[serde(default)]
    pub loss_history: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Cross-entropy of a logistic output with pre-activation `z`, computed
/// without forming `log(sigmoid(z))`.
fn bce_from_logit(z: f64, y: bool) -> f64 {
    let t = if y { 1.0 } else { 0.0 };
    z.max(0.0) - z * t + (-z.abs()).exp().ln_1p()
}

impl MlpModel {
    /// Xavier-uniform weights scaled by 4 for logistic units, zero biases.
    pub fn new(sizes: &[usize], seed: u64) -> Result<MlpModel> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidInput(format!("invalid layer sizes {sizes:?}")));
        }
        let mut rng = seed::rng(seed);
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (n_in, n_out) = (w[0], w[1]);
                let limit = 4.0 * (6.0 / (n_in + n_out) as f64).sqrt();
                let data = (0..n_in * n_out).map(|_| rng.gen_range(-limit..limit)).collect();
                Layer {
                    weights: Matrix::from_vec(n_out, n_in, data).expect("sized"),
                    biases: vec![0.0; n_out],
                }
            })
            .collect();
        Ok(MlpModel {
            schema: MLP_SCHEMA,
            layers,
            loss_history: Vec::new(),
        })
    }

    /// All-zero parameters: every input maps to 0.5.
    pub fn zeros(sizes: &[usize]) -> Result<MlpModel> {
        let mut m = MlpModel::new(sizes, 0)?;
        m.set_params(&vec![0.0; m.n_params()])?;
        Ok(m)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].weights.n_cols()];
        s.extend(self.layers.iter().map(|l| l.biases.len()));
        s
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].weights.n_cols()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.biases.len()).sum()
    }

    /// Parameters flattened layer by layer: weights row-major, then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::InvalidInput(format!(
                "{} parameters for a network with {}",
                params.len(),
                self.n_params()
            )));
        }
        let mut at = 0;
        for l in &mut self.layers {
            let (n_out, n_in) = (l.weights.n_rows(), l.weights.n_cols());
            l.weights = Matrix::from_vec(n_out, n_in, params[at..at + n_out * n_in].to_vec())?;
            at += n_out * n_in;
            l.biases.copy_from_slice(&params[at..at + n_out]);
            at += n_out;
        }
        Ok(())
    }

    /// Activations of every layer, input first; the last entry holds the
    /// output pre-activation instead of its sigmoid.
    fn forward(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![input.to_vec()];
        for (i, l) in self.layers.iter().enumerate() {
            let prev = acts.last().expect("input");
            let z: Vec<f64> = (0..l.biases.len())
                .map(|o| l.biases[o] + l.weights.row(o).iter().zip(prev).map(|(w, a)| w * a).sum::<f64>())
                .collect();
            let last = i + 1 == self.layers.len();
            acts.push(if last { z } else { z.into_iter().map(sigmoid).collect() });
        }
        acts
    }

    pub fn predict_proba_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_inputs() {
            return Err(Error::InvalidInput(format!(
                "network expects {} inputs, got {}",
                self.n_inputs(),
                row.len()
            )));
        }
        Ok(sigmoid(self.forward(row).last().expect("output")[0]))
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        x.rows().map(|r| self.predict_proba_row(r)).collect()
    }

    /// Mean cross-entropy over the listed rows.
    pub fn loss(&self, x: &Matrix, y: &[bool]) -> f64 {
        let total: f64 = x
            .rows()
            .zip(y)
            .map(|(r, &t)| bce_from_logit(self.forward(r).last().expect("output")[0], t))
            .sum();
        total / y.len() as f64
    }

    /// Mean loss over `rows` and its gradient in [`MlpModel::params`] order.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[bool], rows: &[usize]) -> (f64, Vec<f64>) {
        let mut grad_w: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.weights.as_slice().len()]).collect();
        let mut grad_b: Vec<Vec<f64>> = self.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect();
        let mut loss = 0.0;
        for &r in rows {
            let acts = self.forward(x.row(r));
            let z_out = acts.last().expect("output")[0];
            loss += bce_from_logit(z_out, y[r]);
            // dL/dz for the output layer.
            let mut delta = vec![sigmoid(z_out) - if y[r] { 1.0 } else { 0.0 }];
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = &acts[li];
                let n_in = input.len();
                for (o, &d) in delta.iter().enumerate() {
                    grad_b[li][o] += d;
                    for (i, &a) in input.iter().enumerate() {
                        grad_w[li][o * n_in + i] += d * a;
                    }
                }
                if li > 0 {
                    // Back through the weights and the previous sigmoid.
                    delta = (0..n_in)
                        .map(|i| {
                            let back: f64 = delta.iter().enumerate().map(|(o, d)| d * layer.weights.get(o, i)).sum();
                            back * input[i] * (1.0 - input[i])
                        })
                        .collect();
                }
            }
        }
        let scale = 1.0 / rows.len() as f64;
        let mut grad = Vec::with_capacity(self.n_params());
        for (w, b) in grad_w.into_iter().zip(grad_b) {
            grad.extend(w.into_iter().map(|g| g * scale));
            grad.extend(b.into_iter().map(|g| g * scale));
        }
        (loss * scale, grad)
    }
}

/// Trains a `[d, hidden..., 1]` network. Rows are reshuffled every epoch.
/// A non-finite epoch loss aborts with [`Error::Diverged`].
pub fn fit_mlp(x: &Matrix, y: &[bool], config: &MlpConfig) -> Result<MlpModel> {
    config.validate()?;
    fit_mlp_unchecked(x, y, config)
}

/// As [`fit_mlp`] without the five-hidden-layer requirement.
pub fn fit_mlp_unchecked(x: &Matrix, y: &[bool], config: &MlpConfig) -> Result<MlpModel> {
    if x.n_rows() != y.len() || y.is_empty() {
        return Err(Error::InvalidInput(format!("{} rows for {} labels", x.n_rows(), y.len())));
    }
    let mut sizes = vec![x.n_cols()];
    sizes.extend(&config.hidden);
    sizes.push(1);
    let mut model = MlpModel::new(&sizes, seed::derive(config.seed, "init"))?;
    let mut rng = seed::rng(seed::derive(config.seed, "batches"));
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut params = model.params();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let (_, grad) = model.loss_and_gradient(x, y, batch);
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= config.learning_rate * g;
            }
            model.set_params(&params)?;
        }
        let loss = model.loss(x, y);
        if !loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged { epoch, loss });
        }
        model.loss_history.push(loss);
    }
    Ok(model)
}

impl MlpModel {
    pub fn check(&self) -> Result<()> {
        if self.schema != MLP_SCHEMA {
            return Err(Error::SchemaVersion {
                what: "neural network model".into(),
                found: self.schema.into(),
                expected: MLP_SCHEMA.into(),
            });
        }
        if self.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Data("non-finite network weight".into()));
        }
        Ok(())
    }
}
