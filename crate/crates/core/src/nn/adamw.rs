use super::network::{Gradients, Network};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl AdamWConfig {
    pub fn new(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// Moments of parameters whose gradient has gone to zero decay geometrically
/// into the subnormal range, where arithmetic is very slow. At that size they
/// cannot move a parameter, so they are zeroed.
fn flush(x: f64) -> f64 {
    if x.abs() < f64::MIN_POSITIVE {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone)]
struct Moments {
    m: Vec<f64>,
    v: Vec<f64>,
}

/// Adam with decoupled weight decay. Only trainable layers are touched.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub config: AdamWConfig,
    step: u64,
    /// One entry per layer: weight moments then bias moments, flattened.
    state: Vec<Option<Moments>>,
}

impl AdamW {
    pub fn new(config: AdamWConfig) -> Self {
        Self {
            config,
            step: 0,
            state: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, net: &mut Network, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != net.layers().len() {
            return Err(Error::ShapeMismatch {
                context: "gradient layers",
                expected: net.layers().len(),
                actual: grads.layers.len(),
            });
        }
        if self.state.is_empty() {
            self.state = net
                .layers()
                .iter()
                .map(|l| {
                    l.is_trainable().then(|| Moments {
                        m: vec![0.0; l.param_count()],
                        v: vec![0.0; l.param_count()],
                    })
                })
                .collect();
        }
        self.step += 1;
        let AdamWConfig {
            lr,
            beta1,
            beta2,
            eps,
            weight_decay,
        } = self.config;
        let bc1 = 1.0 - beta1.powi(self.step as i32);
        let bc2_sqrt = (1.0 - beta2.powi(self.step as i32)).sqrt();
        let step_size = lr / bc1;
        let decay = 1.0 - lr * weight_decay;

        for ((layer, grad), moments) in net.layers_mut().iter_mut().zip(&grads.layers).zip(&mut self.state) {
            let (Some(grad), Some(moments)) = (grad, moments) else {
                continue;
            };
            if !layer.trainable {
                continue;
            }
            let update = |params: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
                for (((p, &g), m), v) in params.iter_mut().zip(g).zip(m).zip(v) {
                    *p *= decay;
                    *m = flush(beta1 * *m + (1.0 - beta1) * g);
                    *v = flush(beta2 * *v + (1.0 - beta2) * g * g);
                    let denom = v.sqrt() / bc2_sqrt + eps;
                    *p -= step_size * *m / denom;
                }
            };
            let nw = grad.weights.len();
            let (mw, mb) = moments.m.split_at_mut(nw);
            let (vw, vb) = moments.v.split_at_mut(nw);
            update(layer.dense_data_mut(), &grad.weights, mw, vw);
            if let (Some(bias), Some(gb)) = (layer.bias.as_mut(), grad.bias.as_ref()) {
                update(bias, gb, mb, vb);
            }
        }
        Ok(())
    }
}
