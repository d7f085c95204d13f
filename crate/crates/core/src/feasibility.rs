//! Exact evaluation of the constrained unit disk graph model for a candidate
//! embedding.
//!
//! Every pair `{i, j}` gets a violation flag: adjacent pairs must sit in
//! `[D_min, D_adj]`, non-adjacent pairs in `[D_adj + eps, 2L]`. All comparisons
//! are done on squared distances without tolerance. The coordinate box
//! `[-L, L]^N` is reported separately since it bounds the variables rather than
//! guarding a pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph};

/// Hardware feasibility domain, lengths in micrometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainParams {
    pub d_min: f64,
    pub d_adj: f64,
    /// Register radius.
    pub l: f64,
    pub epsilon: f64,
    pub iota: f64,
}

impl Default for DomainParams {
    fn default() -> Self {
        Self {
            d_min: 4.0,
            d_adj: 10.26,
            l: 50.0,
            epsilon: 0.1,
            iota: 1.0,
        }
    }
}

impl DomainParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.d_min > 0.0
            && self.d_min < self.d_adj
            && self.d_adj < 2.0 * self.l
            && self.epsilon > 0.0
            && self.iota > 0.0
            && [self.d_min, self.d_adj, self.l, self.epsilon, self.iota]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "domain parameters must satisfy 0 < D_min < D_adj < 2L, eps > 0, iota > 0: {self:?}"
            )))
        }
    }

    /// Objective weight per violated pair, `2L - D_min + iota`.
    pub fn penalty(&self) -> f64 {
        2.0 * self.l - self.d_min + self.iota
    }
}

/// Row-major `n x N` coordinate matrix, `N` in `{2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    dim: usize,
    data: Vec<f64>,
}

impl Embedding {
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() % dim != 0 {
            return Err(Error::ShapeMismatch {
                context: "embedding",
                expected: (data.len() / dim + 1) * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: &[R]) -> Result<Self> {
        check_dim(dim)?;
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(n: usize, dim: usize) -> Result<Self> {
        Self::from_flat(dim, vec![0.0; n * dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.is_finite())
    }

    #[inline]
    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        let mut out = self.clone();
        for p in out.data.chunks_exact_mut(self.dim) {
            for (c, s) in p.iter_mut().zip(shift) {
                *c += s;
            }
        }
        out
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("dimension must be 2 or 3, got {dim}")))
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingRepr {
    dim: usize,
    coords: Vec<Vec<f64>>,
}

impl Serialize for Embedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EmbeddingRepr {
            dim: self.dim,
            coords: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Embedding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = EmbeddingRepr::deserialize(d)?;
        Embedding::from_rows(repr.dim, &repr.coords).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// Violation flag per pair, indexed by pair index.
    pub delta: Vec<bool>,
    /// Largest distance over adjacent pairs, `D_min` when there are no edges.
    pub d_adj: f64,
    /// Smallest distance over non-adjacent pairs, `2L` when every pair is adjacent.
    pub d_nadj: f64,
    /// `d_nadj - d_adj`.
    pub gap: f64,
    pub objective: f64,
    pub feasible: bool,
    pub coord_domain_ok: bool,
    n: usize,
}

impl FeasibilityReport {
    pub fn violation_count(&self) -> usize {
        self.delta.iter().filter(|&&d| d).count()
    }

    /// Violating pairs `(i, j)` in pair index order.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        crate::graph::pairs(self.n)
            .zip(&self.delta)
            .filter(|(_, &d)| d)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            feasible: self.feasible,
            coord_domain_ok: self.coord_domain_ok,
            gap: self.gap,
            d_adj: self.d_adj,
            d_nadj: self.d_nadj,
            objective: self.objective,
            violations: self.violations().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

/// Serialized form of a [`FeasibilityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub feasible: bool,
    pub coord_domain_ok: bool,
    pub gap: f64,
    pub d_adj: f64,
    pub d_nadj: f64,
    pub objective: f64,
    pub violations: Vec<[usize; 2]>,
}

pub fn check_embedding(g: &Graph, emb: &Embedding, params: &DomainParams) -> Result<FeasibilityReport> {
    let n = g.n();
    if emb.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: emb.n(),
        });
    }
    let min2 = params.d_min * params.d_min;
    let adj2 = params.d_adj * params.d_adj;
    let nadj_lo2 = (params.d_adj + params.epsilon).powi(2);
    let nadj_hi2 = 4.0 * params.l * params.l;

    let mut delta = Vec::with_capacity(pair_count(n));
    let mut max_adj2: Option<f64> = None;
    let mut min_nadj2: Option<f64> = None;
    for i in 0..n {
        for j in i + 1..n {
            let s = emb.squared_distance(i, j);
            let violated = if g.is_adjacent(i, j) {
                max_adj2 = Some(max_adj2.map_or(s, |m| m.max(s)));
                !(min2 <= s && s <= adj2)
            } else {
                min_nadj2 = Some(min_nadj2.map_or(s, |m| m.min(s)));
                !(nadj_lo2 <= s && s <= nadj_hi2)
            };
            delta.push(violated);
        }
    }
    let coord_domain_ok = emb.as_flat().iter().all(|c| (-params.l..=params.l).contains(c));
    let d_adj = max_adj2.map_or(params.d_min, f64::sqrt);
    let d_nadj = min_nadj2.map_or(2.0 * params.l, f64::sqrt);
    let gap = adjacency_gap(d_adj, d_nadj);
    let violations = delta.iter().filter(|&&d| d).count();
    let mut report = FeasibilityReport {
        feasible: violations == 0 && coord_domain_ok,
        delta,
        d_adj,
        d_nadj,
        gap,
        objective: 0.0,
        coord_domain_ok,
        n,
    };
    report.objective = objective_value(&report, params);
    Ok(report)
}

/// Clearance between the closest non-adjacent pair and the farthest adjacent pair.
#[inline]
pub fn adjacency_gap(d_adj: f64, d_nadj: f64) -> f64 {
    d_nadj - d_adj
}

/// `(2L - D_min + iota) * sum(delta) + d_adj - d_nadj`.
pub fn objective_value(report: &FeasibilityReport, params: &DomainParams) -> f64 {
    params.penalty() * report.violation_count() as f64 + report.d_adj - report.d_nadj
}
