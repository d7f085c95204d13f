//! Embedding loss: margin ranking penalties on squared pair distances.
//!
//! Lower bounds are `D_min^2` for adjacent pairs and `(D_adj + alpha)^2` for
//! non-adjacent ones; upper bounds are `D_adj^2` and `4L^2`. `alpha` starts at
//! `eps` and is raised to the best clearance `d_nadj - D_adj` seen on a
//! feasible inference step, so later epochs push non-adjacent pairs further out.

use crate::error::{Error, Result};
use crate::feasibility::{DomainParams, FeasibilityReport};
use crate::graph::{pairs, Graph};
use crate::nn::margin_ranking_loss;

#[derive(Debug, Clone, PartialEq)]
pub struct ElfState {
    pub vt_min: Vec<f64>,
    pub vt_max: Vec<f64>,
    pub alpha: f64,
    adjacent: Vec<bool>,
    params: DomainParams,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

/// Split loss value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElfValue {
    pub min_term: f64,
    pub max_term: f64,
}

impl ElfValue {
    pub fn total(&self) -> f64 {
        self.min_term + self.max_term
    }
}

pub fn build_targets(g: &Graph, params: &DomainParams, alpha: f64) -> Result<ElfState> {
    if !(alpha >= params.epsilon) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be at least eps = {}, got {alpha}",
            params.epsilon
        )));
    }
    let n = g.n();
    let adjacent: Vec<bool> = pairs(n).map(|(i, j)| g.is_adjacent(i, j)).collect();
    let m = adjacent.len();
    let mut state = ElfState {
        vt_min: Vec::with_capacity(m),
        vt_max: Vec::with_capacity(m),
        alpha,
        adjacent,
        params: *params,
        plus: vec![1.0; m],
        minus: vec![-1.0; m],
    };
    let far2 = 4.0 * params.l * params.l;
    for &adj in &state.adjacent {
        if adj {
            state.vt_min.push(params.d_min * params.d_min);
            state.vt_max.push(params.d_adj * params.d_adj);
        } else {
            state.vt_min.push((params.d_adj + alpha).powi(2));
            state.vt_max.push(far2);
        }
    }
    Ok(state)
}

impl ElfState {
    pub fn pair_count(&self) -> usize {
        self.adjacent.len()
    }

    fn set_alpha(&mut self, alpha: f64) {
        self.alpha = alpha;
        let lower = (self.params.d_adj + alpha).powi(2);
        for (t, &adj) in self.vt_min.iter_mut().zip(&self.adjacent) {
            if !adj {
                *t = lower;
            }
        }
    }

    /// Loss terms and gradient with respect to `v`.
    pub fn evaluate(&self, v: &[f64]) -> Result<(ElfValue, Vec<f64>)> {
        if v.len() != self.pair_count() {
            return Err(Error::ShapeMismatch {
                context: "squared distances",
                expected: self.pair_count(),
                actual: v.len(),
            });
        }
        let (min_term, mut grad) = margin_ranking_loss(v, &self.vt_min, &self.plus)?;
        let (max_term, grad_max) = margin_ranking_loss(v, &self.vt_max, &self.minus)?;
        grad.iter_mut().zip(grad_max).for_each(|(g, h)| *g += h);
        Ok((ElfValue { min_term, max_term }, grad))
    }
}

/// Total loss and gradient with respect to `v`.
pub fn elf(v: &[f64], state: &ElfState) -> Result<(f64, Vec<f64>)> {
    let (value, grad) = state.evaluate(v)?;
    Ok((value.total(), grad))
}

/// Raises `alpha` to `d_nadj - D_adj` when that beats the current value.
/// Returns whether `alpha` changed.
pub fn update_alpha(state: &mut ElfState, report: &FeasibilityReport) -> Result<bool> {
    if !report.feasible {
        return Err(Error::InfeasibleReport);
    }
    let candidate = (report.d_nadj - state.params.d_adj).max(state.params.epsilon);
    if candidate > state.alpha {
        state.set_alpha(candidate);
        Ok(true)
    } else {
        Ok(false)
    }
}
