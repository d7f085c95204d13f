//! Dataset files: a batch of gate-accepted instances with their generator points.
//!
//! ```json
//! {"params": {...}, "graphs": [{"id": "n10-000", "n": 10, "l": 1.74,
//!   "edges": [[0, 3], ...], "coords": [[0.12, 1.5], ...]}]}
//! ```
//!
//! Coordinates are in generator units, not micrometres.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_instance, GeneratorConfig, Graph, Instance, SIDE_FACTOR};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub n_list: Vec<usize>,
    pub count_per_n: usize,
    pub seed: u64,
    /// Edge threshold, generator units.
    pub d: f64,
    /// Square side is `side_factor * sqrt(n)`, generator units.
    pub side_factor: f64,
    pub max_retries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub id: String,
    pub n: usize,
    /// Side of the sampling square, generator units.
    pub l: f64,
    pub edges: Vec<[usize; 2]>,
    /// Generator-unit points.
    pub coords: Vec<[f64; 2]>,
}

impl GraphRecord {
    pub fn from_instance(id: String, cfg: &GeneratorConfig, inst: &Instance) -> Self {
        Self {
            id,
            n: inst.graph.n(),
            l: cfg.l,
            edges: inst.graph.edges().iter().map(|&(i, j)| [i, j]).collect(),
            coords: inst.coords.clone(),
        }
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])))
    }

    /// Stored points, or `None` when the record carries none.
    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        (!self.coords.is_empty()).then_some(self.coords.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub params: DatasetParams,
    pub graphs: Vec<GraphRecord>,
}

impl Dataset {
    /// Generates `count_per_n` instances for each size, seeding instance `k`
    /// (global index) with `derive_seed(seed, k)`.
    pub fn generate(n_list: &[usize], count_per_n: usize, seed: u64) -> Result<Self> {
        let jobs: Vec<(usize, usize)> = n_list
            .iter()
            .flat_map(|&n| (0..count_per_n).map(move |k| (n, k)))
            .collect();
        let max_retries = GeneratorConfig::for_size(1, 0).max_retries;
        let graphs = jobs
            .par_iter()
            .enumerate()
            .map(|(index, &(n, k))| {
                let cfg = GeneratorConfig::for_size(n, derive_seed(seed, index as u64));
                let inst = generate_instance(&cfg)?;
                Ok(GraphRecord::from_instance(format!("n{n}-{k:03}"), &cfg, &inst))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params: DatasetParams {
                n_list: n_list.to_vec(),
                count_per_n,
                seed,
                d: 1.0,
                side_factor: SIDE_FACTOR,
                max_retries,
            },
            graphs,
        })
    }

    pub fn find(&self, id: &str) -> Option<&GraphRecord> {
        self.graphs.iter().find(|g| g.id == id)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let ds: Dataset = serde_json::from_str(&text)?;
        for g in &ds.graphs {
            g.graph()?;
            if !g.coords.is_empty() && g.coords.len() != g.n {
                return Err(Error::DimensionMismatch {
                    expected: g.n,
                    actual: g.coords.len(),
                });
            }
        }
        Ok(ds)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, serde_json::to_string_pretty(self)?.as_bytes())
    }
}

/// Writes through a temporary sibling file and renames it into place, so a
/// failed write never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
