//! Initial coordinates for the learning phase.
//!
//! Two initializers: [`scale_to_disk`] reuses the generator's points, and
//! [`fruchterman_reingold`] computes a force-directed layout from the graph
//! alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::Embedding;
use crate::graph::Graph;

/// Which preprocessing method produces the initial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initializer {
    Scaling,
    Fr,
}

impl Initializer {
    pub const ALL: [Initializer; 2] = [Initializer::Scaling, Initializer::Fr];

    pub fn as_str(&self) -> &'static str {
        match self {
            Initializer::Scaling => "scaling",
            Initializer::Fr => "fr",
        }
    }
}

impl std::str::FromStr for Initializer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scaling" => Ok(Initializer::Scaling),
            "fr" => Ok(Initializer::Fr),
            other => Err(Error::InvalidConfig(format!(
                "unknown initializer '{other}' (expected scaling or fr)"
            ))),
        }
    }
}

impl std::fmt::Display for Initializer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Centers the points on their centroid and scales them uniformly so the
/// farthest point lands on the sphere of radius `radius`. Missing trailing
/// coordinates (2D input, `dim = 3`) are zero.
pub fn scale_to_disk<R: AsRef<[f64]>>(coords: &[R], radius: f64, dim: usize) -> Result<Embedding> {
    let n = coords.len();
    let mut out = Embedding::zeros(n, dim)?;
    if n == 0 {
        return Ok(out);
    }
    for (i, row) in coords.iter().enumerate() {
        let row = row.as_ref();
        if row.len() > dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: row.len(),
            });
        }
        out.point_mut(i)[..row.len()].copy_from_slice(row);
    }
    let mut centroid = vec![0.0; dim];
    for p in out.points() {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n as f64;
        }
    }
    let mut max_norm: f64 = 0.0;
    for i in 0..n {
        let p = out.point_mut(i);
        for (x, c) in p.iter_mut().zip(&centroid) {
            *x -= c;
        }
        max_norm = max_norm.max(p.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    if max_norm > 0.0 {
        let factor = radius / max_norm;
        for i in 0..n {
            for x in out.point_mut(i) {
                *x *= factor;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrConfig {
    /// Equilibrium distance between adjacent vertices.
    pub k: f64,
    pub iterations: usize,
    pub dim: usize,
    pub seed: u64,
}

impl FrConfig {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            k: 7.0,
            iterations: 1000,
            dim,
            seed,
        }
    }
}

/// Early exit when the mean per-vertex step falls below this.
const FR_THRESHOLD: f64 = 1e-4;
/// Floor applied to pair distances before evaluating forces.
const MIN_DISTANCE: f64 = 0.01;

/// Uniform random starting positions in the unit square/cube.
pub fn random_positions(n: usize, dim: usize, seed: u64) -> Result<Embedding> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| rng.gen::<f64>()).collect();
    Embedding::from_flat(dim, data)
}

/// Force-directed layout before rescaling, starting from `start`.
///
/// Repulsion acts on every pair with magnitude `k^2/d^2`, attraction on
/// adjacent pairs with magnitude `d/k`. Each vertex moves by the current
/// temperature along its net force; the temperature starts at a tenth of the
/// layout extent and decays linearly to zero over the iteration budget.
pub fn fruchterman_reingold_from(g: &Graph, cfg: &FrConfig, start: Embedding) -> Result<Embedding> {
    let n = g.n();
    if start.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: start.n(),
        });
    }
    if !(cfg.k > 0.0) {
        return Err(Error::InvalidConfig(format!("k must be positive, got {}", cfg.k)));
    }
    let dim = start.dim();
    let mut pos = start;
    if n < 2 {
        return Ok(pos);
    }
    // Coincident points need a direction; derive it from a stream separate
    // from the start positions.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);

    let extent = (0..dim)
        .map(|axis| {
            let (lo, hi) = pos.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[axis]), hi.max(p[axis]))
            });
            hi - lo
        })
        .fold(0.0, f64::max);
    let mut temperature = 0.1 * extent.max(MIN_DISTANCE);
    let cooling = temperature / (cfg.iterations as f64 + 1.0);
    let k2 = cfg.k * cfg.k;

    let mut displacement = vec![0.0; n * dim];
    let mut delta = [0.0; 3];
    for _ in 0..cfg.iterations {
        displacement.iter_mut().for_each(|d| *d = 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (pi, pj) = (pos.point(i), pos.point(j));
                let mut dist2 = 0.0;
                for a in 0..dim {
                    delta[a] = pi[a] - pj[a];
                    dist2 += delta[a] * delta[a];
                }
                let mut dist = dist2.sqrt();
                if dist < 1e-9 {
                    random_unit(&mut rng, &mut delta[..dim]);
                    dist = 1.0;
                }
                let unit_scale = 1.0 / dist;
                let d = dist.max(MIN_DISTANCE);
                let mut force = k2 / (d * d);
                if g.is_adjacent(i, j) {
                    force -= d / cfg.k;
                }
                for a in 0..dim {
                    displacement[i * dim + a] += delta[a] * unit_scale * force;
                }
            }
        }
        let mut total_step2 = 0.0;
        for i in 0..n {
            let disp = &displacement[i * dim..(i + 1) * dim];
            let mut length = disp.iter().map(|x| x * x).sum::<f64>().sqrt();
            if length < MIN_DISTANCE {
                length = 0.1;
            }
            let scale = temperature / length;
            let p = pos.point_mut(i);
            for a in 0..dim {
                let step = disp[a] * scale;
                p[a] += step;
                total_step2 += step * step;
            }
        }
        temperature -= cooling;
        if total_step2.sqrt() / (n as f64) < FR_THRESHOLD {
            break;
        }
    }
    Ok(pos)
}

fn random_unit(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = rng.gen::<f64>() * 2.0 - 1.0;
            norm2 += *x * *x;
        }
        if norm2 > 1e-6 && norm2 <= 1.0 {
            let norm = norm2.sqrt();
            out.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

/// Raw layout from seeded random starting positions, before rescaling.
pub fn fruchterman_reingold_raw(g: &Graph, cfg: &FrConfig) -> Result<Embedding> {
    let start = random_positions(g.n(), cfg.dim, cfg.seed)?;
    fruchterman_reingold_from(g, cfg, start)
}

/// Force-directed layout rescaled into the register disk of radius `radius`.
pub fn fruchterman_reingold(g: &Graph, cfg: &FrConfig, radius: f64) -> Result<Embedding> {
    let raw = fruchterman_reingold_raw(g, cfg)?;
    scale_to_disk(&raw.rows(), radius, cfg.dim)
}
