use rand::Rng;

use super::layer::DenseLayer;
use super::DropoutSpec;
use crate::error::{Error, Result};

/// A stack of fully connected layers evaluated in order.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<DenseLayer>,
    /// Bumped on every parameter change so stale caches can be detected.
    generation: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct LayerCache {
    pre: Vec<f64>,
    out: Vec<f64>,
    /// Per-unit multiplier: 0 or `1/(1-p)` when dropout was applied.
    mask: Option<Vec<f64>>,
}

/// Everything `backward` needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    generation: u64,
    input: Vec<f64>,
    layers: Vec<LayerCache>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.layers.last().map_or(&self.input, |l| &l.out)
    }

    /// Output of layer `k` after activation and dropout.
    pub fn layer_output(&self, k: usize) -> &[f64] {
        &self.layers[k].out
    }

    pub fn input(&self) -> &[f64] {
        &self.input
    }

    pub fn dropout_mask(&self, k: usize) -> Option<&[f64]> {
        self.layers[k].mask.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrad {
    pub weights: Vec<f64>,
    pub bias: Option<Vec<f64>>,
}

/// Parameter gradients per layer (`None` for fixed layers) and the gradient
/// with respect to the network input.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Option<LayerGrad>>,
    pub input: Vec<f64>,
}

impl Gradients {
    /// Flattened in the same order as [`Network::param`].
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for g in self.layers.iter().flatten() {
            out.extend_from_slice(&g.weights);
            if let Some(b) = &g.bias {
                out.extend_from_slice(b);
            }
        }
        out
    }
}

impl Network {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::ShapeMismatch {
                    context: "layer chaining",
                    expected: pair[0].outputs(),
                    actual: pair[1].inputs(),
                });
            }
        }
        Ok(Self { layers, generation: 0 })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_len(&self) -> usize {
        self.layers.first().map_or(0, DenseLayer::inputs)
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map_or(0, DenseLayer::outputs)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        self.generation += 1;
        &mut self.layers
    }

    fn locate(&self, mut idx: usize) -> (usize, usize) {
        for (k, layer) in self.layers.iter().enumerate() {
            let count = layer.param_count();
            if idx < count {
                return (k, idx);
            }
            idx -= count;
        }
        panic!("parameter index out of range");
    }

    /// Trainable parameter `idx`, ordered by layer, weights (row-major) then bias.
    pub fn param(&self, idx: usize) -> f64 {
        let (k, local) = self.locate(idx);
        let layer = &self.layers[k];
        let w = layer.weights.rows() * layer.weights.cols();
        if local < w {
            layer.weights.get(local / layer.weights.cols(), local % layer.weights.cols())
        } else {
            layer.bias.as_ref().expect("bias present")[local - w]
        }
    }

    pub fn set_param(&mut self, idx: usize, value: f64) {
        let (k, local) = self.locate(idx);
        self.generation += 1;
        let layer = &mut self.layers[k];
        let w = layer.weights.rows() * layer.weights.cols();
        if local < w {
            layer.dense_data_mut()[local] = value;
        } else {
            layer.bias.as_mut().expect("bias present")[local - w] = value;
        }
    }

    pub fn forward<R: Rng + ?Sized>(&self, input: &[f64], dropout: &DropoutSpec, rng: &mut R) -> Result<ForwardCache> {
        if input.len() != self.input_len() {
            return Err(Error::ShapeMismatch {
                context: "network input",
                expected: self.input_len(),
                actual: input.len(),
            });
        }
        let keep_scale = 1.0 / (1.0 - dropout.p_drop);
        let mut caches: Vec<LayerCache> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = caches.last().map_or(input, |c| &c.out);
            let mut pre = vec![0.0; layer.outputs()];
            layer.weights.matvec(x, &mut pre);
            if let Some(b) = &layer.bias {
                pre.iter_mut().zip(b).for_each(|(z, b)| *z += b);
            }
            let mut out: Vec<f64> = pre.iter().map(|&z| layer.activation.apply(z)).collect();
            let mask = if layer.dropout && dropout.active() {
                let mask: Vec<f64> = (0..out.len())
                    .map(|_| {
                        if rng.gen::<f64>() < dropout.p_drop {
                            0.0
                        } else {
                            keep_scale
                        }
                    })
                    .collect();
                out.iter_mut().zip(&mask).for_each(|(o, m)| *o *= m);
                Some(mask)
            } else {
                None
            };
            caches.push(LayerCache { pre, out, mask });
        }
        Ok(ForwardCache {
            generation: self.generation,
            input: input.to_vec(),
            layers: caches,
        })
    }

    /// Reverse-mode pass given `grad_output = dLoss/dOutput`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &[f64]) -> Result<Gradients> {
        if cache.generation != self.generation || cache.layers.len() != self.layers.len() {
            return Err(Error::StaleCache);
        }
        if grad_output.len() != self.output_len() {
            return Err(Error::ShapeMismatch {
                context: "output gradient",
                expected: self.output_len(),
                actual: grad_output.len(),
            });
        }
        let mut grads: Vec<Option<LayerGrad>> = vec![None; self.layers.len()];
        let mut g = grad_output.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let lc = &cache.layers[k];
            if let Some(mask) = &lc.mask {
                g.iter_mut().zip(mask).for_each(|(g, m)| *g *= m);
            }
            for (g, &z) in g.iter_mut().zip(&lc.pre) {
                *g *= layer.activation.derivative(z);
            }
            let x = if k == 0 { &cache.input } else { &cache.layers[k - 1].out };
            if layer.trainable {
                let mut gw = Vec::with_capacity(g.len() * x.len());
                for &gr in &g {
                    gw.extend(x.iter().map(|xi| gr * xi));
                }
                grads[k] = Some(LayerGrad {
                    weights: gw,
                    bias: layer.bias.as_ref().map(|_| g.clone()),
                });
            }
            let mut gx = vec![0.0; layer.inputs()];
            layer.weights.matvec_t(&g, &mut gx);
            g = gx;
        }
        Ok(Gradients { layers: grads, input: g })
    }
}
