//! Graph instances, pair indexing and the random instance generator.
//!
//! Instances are random geometric graphs: points are dropped uniformly in a
//! square of side `l` and every pair closer than `d` becomes an edge. A sample
//! is only kept when it passes the embeddability gate (estimated clique at most
//! 7, maximum degree at most 18, connected).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest clique that fits a hexagonal packing at the default hardware ratio.
pub const MAX_CLIQUE: usize = 7;
/// Largest vertex degree that fits a hexagonal packing at the default hardware ratio.
pub const MAX_DEGREE: usize = 18;

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
}

impl Graph {
    /// Builds a graph from an edge list. Pairs are normalized to `i < j`,
    /// deduplicated and sorted lexicographically.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![false; n * n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidEdge(a, b));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !adjacency[i * n + j] {
                adjacency[i * n + j] = true;
                adjacency[j * n + i] = true;
                list.push((i, j));
            }
        }
        list.sort_unstable();
        Ok(Self {
            n,
            edges: list,
            adjacency,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, pairs(n)).expect("complete graph edges are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of unordered vertex pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    #[inline]
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v * self.n..(v + 1) * self.n]
            .iter()
            .filter(|&&a| a)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.is_adjacent(v, u))
    }

    /// True when all `n` vertices lie in one component. The empty graph on
    /// zero vertices counts as connected.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        Self::new(self.n, self.edges.iter().map(|&(i, j)| (perm[i], perm[j])))
    }
}

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic rank of the unordered pair `{i, j}` among all pairs of `n`
/// vertices: `i(n-1) - C(i,2) + j - i - 1`.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j || j >= n {
        return Err(Error::InvalidPair { i, j, n });
    }
    Ok(pair_index_unchecked(i, j, n))
}

#[inline]
pub(crate) fn pair_index_unchecked(i: usize, j: usize, n: usize) -> usize {
    i * (n - 1) - i * i.saturating_sub(1) / 2 + j - i - 1
}

/// All unordered pairs `(i, j)`, `i < j`, in lexicographic (pair index) order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Outcome of the necessary-condition gate.
///
/// `clique_estimate` comes from a polynomial approximation and is only a lower
/// bound on the true clique number, so `accepted` means the graph passed the
/// gate, not that an embedding is certified to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub clique_estimate: usize,
    pub max_degree: usize,
    pub connected: bool,
    pub accepted: bool,
}

impl ConditionReport {
    /// Name of the first failed condition, if any.
    pub fn failed_condition(&self) -> Option<&'static str> {
        if self.clique_estimate > MAX_CLIQUE {
            Some("clique")
        } else if self.max_degree > MAX_DEGREE {
            Some("max_degree")
        } else if !self.connected {
            Some("connected")
        } else {
            None
        }
    }
}

pub fn check_necessary_conditions(g: &Graph) -> ConditionReport {
    let clique_estimate = max_clique_estimate(g).len();
    let max_degree = g.max_degree();
    let connected = g.is_connected();
    ConditionReport {
        clique_estimate,
        max_degree,
        connected,
        accepted: clique_estimate <= MAX_CLIQUE && max_degree <= MAX_DEGREE && connected,
    }
}

/// Approximate maximum clique by Ramsey-style clique removal on the complement
/// graph (Boppana–Halldórsson). The result is always a valid clique of `g`.
pub fn max_clique_estimate(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let complement = |a: usize, b: usize| a != b && !g.is_adjacent(a, b);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut best_iset: Vec<usize> = Vec::new();
    while !remaining.is_empty() {
        let (clique, iset) = ramsey(&complement, &remaining);
        if iset.len() > best_iset.len() {
            best_iset = iset;
        }
        remaining.retain(|v| !clique.contains(v));
    }
    best_iset.sort_unstable();
    best_iset
}

/// Returns a (clique, independent set) pair of the graph induced by `nodes`
/// under adjacency `adj`.
fn ramsey(adj: &dyn Fn(usize, usize) -> bool, nodes: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let Some((&pivot, rest)) = nodes.split_first() else {
        return (Vec::new(), Vec::new());
    };
    let (nbrs, non_nbrs): (Vec<usize>, Vec<usize>) = rest.iter().partition(|&&u| adj(pivot, u));
    let (mut c1, i1) = ramsey(adj, &nbrs);
    let (c2, mut i2) = ramsey(adj, &non_nbrs);
    c1.push(pivot);
    i2.push(pivot);
    let clique = if c1.len() >= c2.len() { c1 } else { c2 };
    let iset = if i1.len() >= i2.len() { i1 } else { i2 };
    (clique, iset)
}

/// Point density constant: square side is `SIDE_FACTOR * sqrt(n)` at `d = 1`.
pub const SIDE_FACTOR: f64 = 0.55;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Side of the sampling square, generator units.
    pub l: f64,
    /// Edge threshold distance, generator units.
    pub d: f64,
    pub seed: u64,
    pub max_retries: usize,
}

impl GeneratorConfig {
    /// Constant-density schedule: `d = 1`, `l = SIDE_FACTOR * sqrt(n)`.
    pub fn for_size(n: usize, seed: u64) -> Self {
        Self {
            n,
            l: SIDE_FACTOR * (n as f64).sqrt(),
            d: 1.0,
            seed,
            max_retries: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidConfig(format!("l must be positive, got {}", self.l)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidConfig(format!("d must be positive, got {}", self.d)));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidConfig("max_retries must be at least 1".into()));
        }
        Ok(())
    }
}

/// A generated graph together with the points it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    /// Sampled points, generator units.
    pub coords: Vec<[f64; 2]>,
}

/// Threshold graph over `points`: `{i, j}` is an edge iff the points are within `d`.
pub fn threshold_graph(points: &[[f64; 2]], d: f64) -> Graph {
    let n = points.len();
    let d2 = d * d;
    let edges = pairs(n).filter(|&(i, j)| {
        let dx = points[i][0] - points[j][0];
        let dy = points[i][1] - points[j][1];
        dx * dx + dy * dy <= d2
    });
    Graph::new(n, edges).expect("pairs are in range")
}

pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut last_failure = "none";
    for _ in 0..cfg.max_retries {
        let points: Vec<[f64; 2]> = (0..cfg.n)
            .map(|_| [rng.gen::<f64>() * cfg.l, rng.gen::<f64>() * cfg.l])
            .collect();
        let graph = threshold_graph(&points, cfg.d);
        let report = check_necessary_conditions(&graph);
        match report.failed_condition() {
            None => {
                return Ok(Instance {
                    graph,
                    coords: points,
                })
            }
            Some(reason) => last_failure = reason,
        }
    }
    Err(Error::Generation {
        n: cfg.n,
        attempts: cfg.max_retries,
        condition: last_failure.to_string(),
    })
}
