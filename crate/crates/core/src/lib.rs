//! Hardware-feasible unit disk graph embeddings for neutral-atom registers.
//!
//! The crate covers the whole pipeline: random instance generation with the
//! embeddability gate ([`graph`]), exact feasibility checking ([`feasibility`]),
//! initial layouts ([`init`]), a small dense network with manual reverse mode
//! ([`nn`]), the distance encoder network ([`den`]) and its loss ([`elf`]), and
//! the per-graph learning phase plus hyperparameter sweep ([`trainer`]).

pub mod dataset;
pub mod den;
pub mod elf;
pub mod error;
pub mod feasibility;
pub mod graph;
pub mod init;
pub mod nn;
pub mod report;
pub mod seed;
pub mod svg;
pub mod trainer;

pub use error::{Error, Result};
pub use feasibility::{check_embedding, DomainParams, Embedding, FeasibilityReport};
pub use graph::{pair_index, Graph};
pub use init::Initializer;
