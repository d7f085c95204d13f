//! Dense feed-forward networks with hand-written reverse mode.
//!
//! Only what the distance encoder needs: fully connected layers (dense
//! trainable or sparse fixed), a handful of activations, inverted dropout,
//! AdamW, the margin ranking loss and a finite-difference gradient checker.

mod adamw;
mod gradcheck;
mod layer;
mod loss;
mod network;

pub use adamw::{AdamW, AdamWConfig};
pub use gradcheck::{compare_gradients, fd_gradient_check, GradCheckReport};
pub use layer::{Activation, DenseLayer, Weights};
pub use loss::margin_ranking_loss;
pub use network::{ForwardCache, Gradients, LayerGrad, Network};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Training,
    Inference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropoutSpec {
    pub p_drop: f64,
    pub mode: Mode,
}

impl DropoutSpec {
    pub fn new(p_drop: f64, mode: Mode) -> Result<Self> {
        if !(0.0..1.0).contains(&p_drop) {
            return Err(Error::InvalidConfig(format!(
                "dropout probability must lie in [0, 1), got {p_drop}"
            )));
        }
        Ok(Self { p_drop, mode })
    }

    pub fn training(p_drop: f64) -> Result<Self> {
        Self::new(p_drop, Mode::Training)
    }

    pub fn inference() -> Self {
        Self {
            p_drop: 0.0,
            mode: Mode::Inference,
        }
    }

    pub(crate) fn active(&self) -> bool {
        self.mode == Mode::Training && self.p_drop > 0.0
    }
}
