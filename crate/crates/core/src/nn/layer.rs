use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    /// `scale * tanh(z)`, output in `(-scale, scale)`.
    ScaledTanh(f64),
    Square,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match *self {
            Activation::Relu => z.max(0.0),
            Activation::ScaledTanh(s) => s * z.tanh(),
            Activation::Square => z * z,
            Activation::Identity => z,
        }
    }

    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::ScaledTanh(s) => {
                let t = z.tanh();
                s * (1.0 - t * t)
            }
            Activation::Square => 2.0 * z,
            Activation::Identity => 1.0,
        }
    }
}

/// Weight matrix of shape `rows x cols` (outputs x inputs).
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Row-major storage.
    Dense { rows: usize, cols: usize, data: Vec<f64> },
    /// Non-zero entries `(col, value)` per row.
    Sparse {
        rows: usize,
        cols: usize,
        entries: Vec<Vec<(usize, f64)>>,
    },
}

impl Weights {
    pub fn rows(&self) -> usize {
        match self {
            Weights::Dense { rows, .. } | Weights::Sparse { rows, .. } => *rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Weights::Dense { cols, .. } | Weights::Sparse { cols, .. } => *cols,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self {
            Weights::Dense { cols, data, .. } => data[r * cols + c],
            Weights::Sparse { entries, .. } => entries[r]
                .iter()
                .filter(|(col, _)| *col == c)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    /// `out = W x`.
    pub(crate) fn matvec(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Weights::Dense { cols, data, .. } => {
                for (o, row) in out.iter_mut().zip(data.chunks_exact(*cols)) {
                    *o = row.iter().zip(x).map(|(w, x)| w * x).sum();
                }
            }
            Weights::Sparse { entries, .. } => {
                for (o, row) in out.iter_mut().zip(entries) {
                    *o = row.iter().map(|&(c, w)| w * x[c]).sum();
                }
            }
        }
    }

    /// `out = W^T g`.
    pub(crate) fn matvec_t(&self, g: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            Weights::Dense { cols, data, .. } => {
                for (&gr, row) in g.iter().zip(data.chunks_exact(*cols)) {
                    if gr != 0.0 {
                        for (o, w) in out.iter_mut().zip(row) {
                            *o += w * gr;
                        }
                    }
                }
            }
            Weights::Sparse { entries, .. } => {
                for (&gr, row) in g.iter().zip(entries) {
                    for &(c, w) in row {
                        out[c] += w * gr;
                    }
                }
            }
        }
    }
}

/// A fully connected layer `act(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub(crate) weights: Weights,
    pub(crate) bias: Option<Vec<f64>>,
    pub(crate) activation: Activation,
    pub(crate) trainable: bool,
    /// Whether dropout is applied to this layer's output in training mode.
    pub(crate) dropout: bool,
}

impl DenseLayer {
    /// Trainable dense layer with bias, weights and bias drawn uniformly from
    /// `+-1/sqrt(fan_in)`.
    pub fn trainable<R: Rng + ?Sized>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        let bound = 1.0 / (inputs.max(1) as f64).sqrt();
        let data = (0..inputs * outputs).map(|_| rng.gen_range(-bound..=bound)).collect();
        let bias = (0..outputs).map(|_| rng.gen_range(-bound..=bound)).collect();
        Self {
            weights: Weights::Dense {
                rows: outputs,
                cols: inputs,
                data,
            },
            bias: Some(bias),
            activation,
            trainable: true,
            dropout: false,
        }
    }

    /// Layer from explicit dense weights (row-major, `outputs x inputs`).
    pub fn from_dense(
        inputs: usize,
        outputs: usize,
        data: Vec<f64>,
        bias: Option<Vec<f64>>,
        activation: Activation,
        trainable: bool,
    ) -> Result<Self> {
        if data.len() != inputs * outputs {
            return Err(Error::ShapeMismatch {
                context: "dense weights",
                expected: inputs * outputs,
                actual: data.len(),
            });
        }
        if let Some(b) = &bias {
            if b.len() != outputs {
                return Err(Error::ShapeMismatch {
                    context: "bias",
                    expected: outputs,
                    actual: b.len(),
                });
            }
        }
        Ok(Self {
            weights: Weights::Dense {
                rows: outputs,
                cols: inputs,
                data,
            },
            bias,
            activation,
            trainable,
            dropout: false,
        })
    }

    /// Non-trainable, bias-free layer with sparse fixed weights.
    pub fn fixed_sparse(inputs: usize, entries: Vec<Vec<(usize, f64)>>, activation: Activation) -> Result<Self> {
        if let Some(&(c, _)) = entries.iter().flatten().find(|(c, _)| *c >= inputs) {
            return Err(Error::ShapeMismatch {
                context: "sparse weights column",
                expected: inputs,
                actual: c,
            });
        }
        Ok(Self {
            weights: Weights::Sparse {
                rows: entries.len(),
                cols: inputs,
                entries,
            },
            bias: None,
            activation,
            trainable: false,
            dropout: false,
        })
    }

    pub fn with_dropout(mut self, enabled: bool) -> Self {
        self.dropout = enabled;
        self
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn bias(&self) -> Option<&[f64]> {
        self.bias.as_deref()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable
    }

    pub fn has_dropout(&self) -> bool {
        self.dropout
    }

    /// Number of trainable scalars (zero for fixed layers).
    pub fn param_count(&self) -> usize {
        if !self.trainable {
            return 0;
        }
        self.weights.rows() * self.weights.cols() + self.bias.as_ref().map_or(0, Vec::len)
    }

    pub(crate) fn dense_data_mut(&mut self) -> &mut [f64] {
        match &mut self.weights {
            Weights::Dense { data, .. } => data,
            Weights::Sparse { .. } => &mut [],
        }
    }
}
