//! Fully connected network with ReLU hidden layers and a single logistic
//! output unit, trained on binary cross-entropy by mini-batch SGD with
//! momentum. Inputs are expected to be standardized.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::math::{self, logit_cross_entropy, sigmoid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub momentum: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_sizes: vec![32],
            learning_rate: 0.01,
            epochs: 200,
            momentum: 0.9,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Weights are stored row-major, one row per output unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            n_in,
            n_out,
            weights: vec![0.0; n_in * n_out],
            biases: vec![0.0; n_out],
        }
    }

    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.n_in)
                .zip(&self.biases)
                .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b),
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Dense>,
}

impl Mlp {
    /// Random initialization: uniform in `+-sqrt(6 / fan_in)` for ReLU layers
    /// and `+-sqrt(3 / fan_in)` for the output layer, zero biases.
    pub fn initialize(n_features: usize, hidden_sizes: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes = vec![n_features];
        sizes.extend_from_slice(hidden_sizes);
        sizes.push(1);
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(l, w)| {
                let (n_in, n_out) = (w[0], w[1]);
                let gain = if l == last { 3.0 } else { 6.0 };
                let limit = math::sqrt(gain / n_in.max(1) as f64);
                let mut layer = Dense::zeros(n_in, n_out);
                for v in &mut layer.weights {
                    *v = rng.random_range(-limit..=limit);
                }
                layer
            })
            .collect();
        Self { layers }
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn n_features(&self) -> usize {
        self.layers[0].n_in
    }

    /// Output logit.
    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            layer.forward(&a, &mut z);
            if l < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            core::mem::swap(&mut a, &mut z);
        }
        a[0]
    }

    pub fn proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn n_parameters(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// All weights then biases, layer by layer.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_parameters());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        let mut at = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&params[at..at + nw]);
            at += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
    }

    /// Mean cross-entropy over `rows` of `data`.
    pub fn loss(&self, data: &Dataset) -> f64 {
        let total: f64 = data
            .rows()
            .zip(data.labels())
            .map(|(x, &y)| logit_cross_entropy(self.logit(x), f64::from(y)))
            .sum();
        total / data.n_rows() as f64
    }

    /// Mean loss and its gradient (flattened like [`Mlp::parameters`]) by
    /// backpropagation over the whole of `data`.
    pub fn loss_and_gradient(&self, data: &Dataset) -> (f64, Vec<f64>) {
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        let mut grads: Vec<Dense> = self
            .layers
            .iter()
            .map(|l| Dense::zeros(l.n_in, l.n_out))
            .collect();
        let loss = self.accumulate(data, &rows, &mut grads);
        let mut flat = Vec::with_capacity(self.n_parameters());
        for g in &grads {
            flat.extend_from_slice(&g.weights);
            flat.extend_from_slice(&g.biases);
        }
        (loss, flat)
    }

    /// Adds the mean gradient over `rows` into `grads` (which must start at
    /// zero) and returns the mean loss.
    fn accumulate(&self, data: &Dataset, rows: &[usize], grads: &mut [Dense]) -> f64 {
        let n_layers = self.layers.len();
        let scale = 1.0 / rows.len() as f64;
        let mut activations: Vec<Vec<f64>> = vec![Vec::new(); n_layers + 1];
        let mut loss = 0.0;
        for &i in rows {
            let x = data.row(i);
            let y = f64::from(data.labels()[i]);
            activations[0].clear();
            activations[0].extend_from_slice(x);
            for l in 0..n_layers {
                let (before, after) = activations.split_at_mut(l + 1);
                self.layers[l].forward(&before[l], &mut after[0]);
                if l + 1 < n_layers {
                    after[0].iter_mut().for_each(|v| *v = v.max(0.0));
                }
            }
            let z = activations[n_layers][0];
            loss += logit_cross_entropy(z, y);

            let mut delta = vec![sigmoid(z) - y];
            for l in (0..n_layers).rev() {
                let layer = &self.layers[l];
                let input = &activations[l];
                let g = &mut grads[l];
                for (k, &dk) in delta.iter().enumerate() {
                    let row = &mut g.weights[k * layer.n_in..(k + 1) * layer.n_in];
                    for (gw, &a) in row.iter_mut().zip(input) {
                        *gw += scale * dk * a;
                    }
                    g.biases[k] += scale * dk;
                }
                if l > 0 {
                    // Hidden activations are post-ReLU, so a > 0 exactly where
                    // the unit was active.
                    let mut prev = vec![0.0; layer.n_in];
                    for (k, &dk) in delta.iter().enumerate() {
                        let row = &layer.weights[k * layer.n_in..(k + 1) * layer.n_in];
                        for (p, &w) in prev.iter_mut().zip(row) {
                            *p += w * dk;
                        }
                    }
                    for (p, &a) in prev.iter_mut().zip(input) {
                        if a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        loss * scale
    }
}

pub fn train_mlp(train: &Dataset, config: &MlpConfig) -> Result<Mlp> {
    if train.is_empty() {
        return Err(Error::NoDataRows);
    }
    if config.epochs == 0 {
        return Err(Error::invalid("mlp_epochs", "must be at least 1"));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("mlp_batch_size", "must be at least 1"));
    }
    if config.hidden_sizes.contains(&0) {
        return Err(Error::invalid(
            "mlp_hidden_sizes",
            "layers need at least one unit",
        ));
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::invalid("mlp_learning_rate", "must be positive"));
    }
    if !(0.0..1.0).contains(&config.momentum) {
        return Err(Error::invalid("mlp_momentum", "must lie in [0, 1)"));
    }

    let mut net = Mlp::initialize(train.n_features(), &config.hidden_sizes, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut velocity: Vec<Dense> = net
        .layers
        .iter()
        .map(|l| Dense::zeros(l.n_in, l.n_out))
        .collect();
    let mut grads = velocity.clone();
    let mut order: Vec<usize> = (0..train.n_rows()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            for g in &mut grads {
                g.weights.iter_mut().for_each(|v| *v = 0.0);
                g.biases.iter_mut().for_each(|v| *v = 0.0);
            }
            epoch_loss += net.accumulate(train, batch, &mut grads) * batch.len() as f64;
            for ((layer, v), g) in net.layers.iter_mut().zip(&mut velocity).zip(&grads) {
                for ((w, vw), gw) in layer.weights.iter_mut().zip(&mut v.weights).zip(&g.weights) {
                    *vw = config.momentum * *vw - config.learning_rate * gw;
                    *w += *vw;
                }
                for ((b, vb), gb) in layer.biases.iter_mut().zip(&mut v.biases).zip(&g.biases) {
                    *vb = config.momentum * *vb - config.learning_rate * gb;
                    *b += *vb;
                }
            }
        }
        if !epoch_loss.is_finite()
            || net
                .layers
                .iter()
                .any(|l| l.weights.iter().any(|w| !w.is_finite()))
        {
            return Err(Error::Diverged { epoch });
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> Dataset {
        Dataset::from_rows(
            &[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
            &[0, 1, 1, 0],
        )
        .unwrap()
    }

    #[test]
    fn zero_output_layer_gives_even_odds() {
        let mut net = Mlp::initialize(3, &[5], 1);
        let out = net.layers_mut().last_mut().unwrap();
        out.weights.iter_mut().for_each(|w| *w = 0.0);
        out.biases[0] = 0.0;
        assert_eq!(net.proba(&[1.0, -2.0, 3.0]), 0.5);
        assert_eq!(net.proba(&[100.0, 0.0, -7.0]), 0.5);
    }

    #[test]
    fn learns_xor_with_hidden_layer() {
        let config = MlpConfig {
            hidden_sizes: vec![8],
            learning_rate: 0.1,
            epochs: 2000,
            batch_size: 4,
            seed: 3,
            ..Default::default()
        };
        let data = xor();
        let net = train_mlp(&data, &config).unwrap();
        for (x, &y) in data.rows().zip(data.labels()) {
            assert_eq!(
                u8::from(net.proba(x) >= 0.5),
                y,
                "x={x:?} p={}",
                net.proba(x)
            );
        }
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let config = MlpConfig {
            learning_rate: 1e200,
            epochs: 5,
            ..Default::default()
        };
        let err = train_mlp(&xor(), &config).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err:?}");
    }

    #[test]
    fn parameters_round_trip() {
        let mut net = Mlp::initialize(4, &[3, 2], 9);
        let p = net.parameters();
        assert_eq!(p.len(), net.n_parameters());
        let shifted: Vec<f64> = p.iter().map(|v| v + 1.0).collect();
        net.set_parameters(&shifted);
        assert_eq!(net.parameters(), shifted);
    }
}
