//! The distance encoder network: a trainable autoencoder producing
//! coordinates, followed by a fixed-weight distance calculator producing the
//! squared distance of every vertex pair.
//!
//! Layout of the flattened vectors is axis-major: all x coordinates, then all
//! y, then all z. The difference layer has one block of `C(n,2)` rows per axis,
//! row `axis * C(n,2) + pair_index(i, j)` computing `p_i - p_j` on that axis.

use rand::Rng;

use crate::error::{Error, Result};
use crate::feasibility::Embedding;
use crate::graph::{pair_count, pairs};
use crate::nn::{Activation, DenseLayer, DropoutSpec, ForwardCache, Mode, Network};

/// Hidden widths of the autoencoder, encoder then decoder.
pub const HIDDEN_WIDTHS: [usize; 7] = [64, 36, 18, 9, 18, 36, 64];

/// Index of the layer whose output holds the learned coordinates.
pub const COORD_LAYER: usize = HIDDEN_WIDTHS.len();

#[derive(Debug, Clone)]
pub struct DenModel {
    net: Network,
    n: usize,
    dim: usize,
    radius: f64,
    p_drop: f64,
}

/// Result of one pass through the model.
#[derive(Debug, Clone)]
pub struct DenOutput {
    /// Coordinates read from the coordinates' layer.
    pub coords: Embedding,
    /// Squared pair distances in pair index order.
    pub v: Vec<f64>,
    pub cache: ForwardCache,
}

/// Difference layer wiring: `dim * C(n,2)` rows with one `+1` and one `-1` each.
pub fn difference_entries(n: usize, dim: usize) -> Vec<Vec<(usize, f64)>> {
    let mut rows = Vec::with_capacity(dim * pair_count(n));
    for axis in 0..dim {
        for (i, j) in pairs(n) {
            rows.push(vec![(axis * n + i, 1.0), (axis * n + j, -1.0)]);
        }
    }
    rows
}

/// Sum layer wiring: row `k` adds the `dim` squared axis differences of pair `k`.
pub fn sum_entries(n: usize, dim: usize) -> Vec<Vec<(usize, f64)>> {
    let pc = pair_count(n);
    (0..pc)
        .map(|k| (0..dim).map(|axis| (axis * pc + k, 1.0)).collect())
        .collect()
}

impl DenModel {
    pub fn build<R: Rng + ?Sized>(n: usize, dim: usize, radius: f64, p_drop: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 vertices, got {n}")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidConfig(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("radius must be positive, got {radius}")));
        }
        DropoutSpec::training(p_drop)?;

        let width = n * dim;
        let mut layers = Vec::with_capacity(HIDDEN_WIDTHS.len() + 3);
        let mut fan_in = width;
        for &out in &HIDDEN_WIDTHS {
            layers.push(DenseLayer::trainable(fan_in, out, Activation::Relu, rng).with_dropout(true));
            fan_in = out;
        }
        layers.push(DenseLayer::trainable(fan_in, width, Activation::ScaledTanh(radius), rng));
        layers.push(DenseLayer::fixed_sparse(width, difference_entries(n, dim), Activation::Square)?);
        layers.push(DenseLayer::fixed_sparse(dim * pair_count(n), sum_entries(n, dim), Activation::Identity)?);
        Ok(Self {
            net: Network::new(layers)?,
            n,
            dim,
            radius,
            p_drop,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn p_drop(&self) -> f64 {
        self.p_drop
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn network_mut(&mut self) -> &mut Network {
        &mut self.net
    }

    fn dropout(&self, mode: Mode) -> DropoutSpec {
        match mode {
            Mode::Training => DropoutSpec {
                p_drop: self.p_drop,
                mode,
            },
            Mode::Inference => DropoutSpec::inference(),
        }
    }

    pub fn forward<R: Rng + ?Sized>(&self, input: &[f64], mode: Mode, rng: &mut R) -> Result<DenOutput> {
        let cache = self.net.forward(input, &self.dropout(mode), rng)?;
        let coords = unflatten(cache.layer_output(COORD_LAYER), self.n, self.dim)?;
        Ok(DenOutput {
            coords,
            v: cache.output().to_vec(),
            cache,
        })
    }

    /// Runs only the fixed distance calculator on flattened coordinates.
    pub fn calculator_forward(&self, flat: &[f64]) -> Result<Vec<f64>> {
        let calc = &self.net.layers()[COORD_LAYER + 1..];
        let net = Network::new(calc.to_vec())?;
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        Ok(net.forward(flat, &DropoutSpec::inference(), &mut rng)?.output().to_vec())
    }
}

/// Axis-major flattening: `I[axis * n + k]` is coordinate `axis` of vertex `k`.
pub fn flatten_coords(coords: &Embedding) -> Vec<f64> {
    let (n, dim) = (coords.n(), coords.dim());
    let mut out = vec![0.0; n * dim];
    for (k, p) in coords.points().enumerate() {
        for (axis, &c) in p.iter().enumerate() {
            out[axis * n + k] = c;
        }
    }
    out
}

pub fn unflatten(flat: &[f64], n: usize, dim: usize) -> Result<Embedding> {
    if flat.len() != n * dim {
        return Err(Error::ShapeMismatch {
            context: "flattened coordinates",
            expected: n * dim,
            actual: flat.len(),
        });
    }
    let mut out = Embedding::zeros(n, dim)?;
    for k in 0..n {
        let p = out.point_mut(k);
        for (axis, c) in p.iter_mut().enumerate() {
            *c = flat[axis * n + k];
        }
    }
    Ok(out)
}
