//! The learning phase and the hyperparameter sweep.
//!
//! Each epoch runs one training step (dropout on, loss, backward, AdamW) and
//! one inference step (dropout off, no update). The inference coordinates are
//! checked with [`check_embedding`]; the best feasible embedding by adjacency
//! gap is kept and `alpha` follows it.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::den::{flatten_coords, DenModel};
use crate::elf::{build_targets, update_alpha};
use crate::error::{Error, Result};
use crate::feasibility::{check_embedding, DomainParams, Embedding};
use crate::graph::Graph;
use crate::init::{fruchterman_reingold, scale_to_disk, FrConfig, Initializer};
use crate::nn::{AdamW, AdamWConfig, Mode};
use crate::seed::derive_seed;

pub const LR_GRID: [f64; 3] = [0.01, 0.001, 0.0001];
pub const P_DROP_GRID: [f64; 3] = [0.3, 0.5, 0.7];
pub const DEFAULT_EPOCHS: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub lr: f64,
    pub p_drop: f64,
    pub init: Initializer,
    pub epochs: usize,
    pub dim: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidConfig(format!("lr must be non-negative, got {}", self.lr)));
        }
        if !(0.0..1.0).contains(&self.p_drop) {
            return Err(Error::InvalidConfig(format!("p_drop must lie in [0, 1), got {}", self.p_drop)));
        }
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::InvalidConfig(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        Ok(())
    }
}

/// The 18 trial configurations: initializer x lr x p_drop, with per-trial
/// seeds derived from `master_seed` and the trial index.
pub fn trial_grid(epochs: usize, dim: usize, master_seed: u64) -> Vec<TrialConfig> {
    let mut grid = Vec::with_capacity(18);
    for init in Initializer::ALL {
        for lr in LR_GRID {
            for p_drop in P_DROP_GRID {
                let index = grid.len() as u64;
                grid.push(TrialConfig {
                    lr,
                    p_drop,
                    init,
                    epochs,
                    dim,
                    seed: derive_seed(master_seed, index),
                });
            }
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub config: TrialConfig,
    pub best_embedding: Option<Embedding>,
    pub best_gap: Option<f64>,
    /// 1-based epoch of the first feasible inference step.
    pub first_feasible_epoch: Option<usize>,
    /// `alpha` in effect after each epoch.
    pub alpha_trace: Vec<f64>,
    /// Best gap so far after each epoch.
    pub best_gap_trace: Vec<Option<f64>>,
    /// Training-step loss per epoch.
    pub elf_trace: Vec<f64>,
    /// Seconds per epoch (training plus inference step).
    pub epoch_wall_times: Vec<f64>,
}

impl TrialResult {
    pub fn success(&self) -> bool {
        self.best_embedding.is_some()
    }

    pub fn total_secs(&self) -> f64 {
        self.epoch_wall_times.iter().sum()
    }

    pub fn mean_epoch_ms(&self) -> f64 {
        if self.epoch_wall_times.is_empty() {
            0.0
        } else {
            1e3 * self.total_secs() / self.epoch_wall_times.len() as f64
        }
    }
}

/// Initial coordinates for the learning phase. `coords` are the generator
/// points, required by the scaling initializer.
pub fn initial_embedding(
    g: &Graph,
    coords: Option<&[[f64; 2]]>,
    params: &DomainParams,
    init: Initializer,
    dim: usize,
    seed: u64,
) -> Result<Embedding> {
    match init {
        Initializer::Scaling => {
            let coords = coords.ok_or(Error::MissingCoordinates)?;
            if coords.len() != g.n() {
                return Err(Error::DimensionMismatch {
                    expected: g.n(),
                    actual: coords.len(),
                });
            }
            scale_to_disk(coords, params.l, dim)
        }
        Initializer::Fr => fruchterman_reingold(g, &FrConfig::new(dim, derive_seed(seed, 1)), params.l),
    }
}

pub fn run_learning_phase(
    g: &Graph,
    coords: Option<&[[f64; 2]]>,
    params: &DomainParams,
    cfg: &TrialConfig,
) -> Result<TrialResult> {
    cfg.validate()?;
    params.validate()?;
    let start = initial_embedding(g, coords, params, cfg.init, cfg.dim, cfg.seed)?;
    let input = flatten_coords(&start);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = DenModel::build(g.n(), cfg.dim, params.l, cfg.p_drop, &mut rng)?;
    let mut optimizer = AdamW::new(AdamWConfig::new(cfg.lr));
    let mut targets = build_targets(g, params, params.epsilon)?;

    let mut result = TrialResult {
        config: *cfg,
        best_embedding: None,
        best_gap: None,
        first_feasible_epoch: None,
        alpha_trace: Vec::with_capacity(cfg.epochs),
        best_gap_trace: Vec::with_capacity(cfg.epochs),
        elf_trace: Vec::with_capacity(cfg.epochs),
        epoch_wall_times: Vec::with_capacity(cfg.epochs),
    };

    for epoch in 1..=cfg.epochs {
        let t0 = Instant::now();

        let train = model.forward(&input, Mode::Training, &mut rng)?;
        let (loss, grad_v) = targets.evaluate(&train.v)?;
        let grads = model.network().backward(&train.cache, &grad_v)?;
        optimizer.step(model.network_mut(), &grads)?;

        let inference = model.forward(&input, Mode::Inference, &mut rng)?;
        let report = check_embedding(g, &inference.coords, params)?;
        if report.feasible {
            result.first_feasible_epoch.get_or_insert(epoch);
            if result.best_gap.map_or(true, |best| report.gap > best) {
                result.best_gap = Some(report.gap);
                result.best_embedding = Some(inference.coords);
                update_alpha(&mut targets, &report)?;
            }
        }

        result.epoch_wall_times.push(t0.elapsed().as_secs_f64());
        result.elf_trace.push(loss.total());
        result.alpha_trace.push(targets.alpha);
        result.best_gap_trace.push(result.best_gap);
    }

    if let (Some(best), Some(gap)) = (&result.best_embedding, result.best_gap) {
        let check = check_embedding(g, best, params)?;
        assert!(check.feasible && check.gap == gap, "stored best embedding failed re-verification");
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub epochs: usize,
    pub dim: usize,
    pub master_seed: u64,
    /// Worker threads for concurrent trials; 0 uses the rayon default.
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config: TrialConfig,
    pub success: bool,
    pub first_feasible_epoch: Option<usize>,
    pub best_gap: Option<f64>,
    pub mean_epoch_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestTrial {
    pub trial_index: usize,
    pub gap: f64,
    pub coords: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub graph_id: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub success: bool,
    pub trials: Vec<TrialRecord>,
    pub best: Option<BestTrial>,
    /// Mean wall time of one trial's learning phase, seconds.
    pub mean_trial_secs: f64,
}

/// Summary plus the full per-trial results, in grid order.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: SweepSummary,
    pub results: Vec<TrialResult>,
}

pub fn run_sweep(
    graph_id: &str,
    g: &Graph,
    coords: Option<&[[f64; 2]]>,
    params: &DomainParams,
    cfg: &SweepConfig,
) -> Result<SweepOutcome> {
    let grid = trial_grid(cfg.epochs, cfg.dim, cfg.master_seed);
    let run = || -> Result<Vec<TrialResult>> {
        grid.par_iter()
            .map(|trial| run_learning_phase(g, coords, params, trial))
            .collect()
    };
    let results = if cfg.workers == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?
            .install(run)?
    };
    Ok(SweepOutcome {
        summary: summarize(graph_id, g.n(), cfg.dim, &results),
        results,
    })
}

pub fn summarize(graph_id: &str, n: usize, dim: usize, results: &[TrialResult]) -> SweepSummary {
    let trials: Vec<TrialRecord> = results
        .iter()
        .map(|r| TrialRecord {
            config: r.config,
            success: r.success(),
            first_feasible_epoch: r.first_feasible_epoch,
            best_gap: r.best_gap,
            mean_epoch_ms: r.mean_epoch_ms(),
        })
        .collect();
    let mut best: Option<BestTrial> = None;
    for (index, r) in results.iter().enumerate() {
        if let (Some(gap), Some(emb)) = (r.best_gap, &r.best_embedding) {
            if best.as_ref().map_or(true, |b| gap > b.gap) {
                best = Some(BestTrial {
                    trial_index: index,
                    gap,
                    coords: emb.rows(),
                });
            }
        }
    }
    let mean_trial_secs = if results.is_empty() {
        0.0
    } else {
        results.iter().map(TrialResult::total_secs).sum::<f64>() / results.len() as f64
    };
    SweepSummary {
        graph_id: graph_id.to_string(),
        n,
        dim,
        success: best.is_some(),
        trials,
        best,
        mean_trial_secs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, GeneratorConfig};

    fn cfg(init: Initializer, epochs: usize) -> TrialConfig {
        TrialConfig {
            lr: 0.01,
            p_drop: 0.3,
            init,
            epochs,
            dim: 2,
            seed: 17,
        }
    }

    #[test]
    fn grid_has_eighteen_distinct_trials() {
        let grid = trial_grid(10, 2, 5);
        assert_eq!(grid.len(), 18);
        let mut combos: Vec<String> = grid.iter().map(|t| format!("{}-{}-{}", t.init, t.lr, t.p_drop)).collect();
        combos.sort();
        combos.dedup();
        assert_eq!(combos.len(), 18);
        assert_eq!(trial_grid(10, 2, 5), grid);
    }

    #[test]
    fn zero_epochs_gives_empty_result() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let r = run_learning_phase(&g, None, &DomainParams::default(), &cfg(Initializer::Fr, 0)).unwrap();
        assert!(!r.success());
        assert!(r.first_feasible_epoch.is_none());
        assert!(r.alpha_trace.is_empty() && r.elf_trace.is_empty() && r.epoch_wall_times.is_empty());
    }

    #[test]
    fn single_edge_becomes_feasible() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let p = DomainParams::default();
        let r = run_learning_phase(&g, None, &p, &cfg(Initializer::Fr, 300)).unwrap();
        let best = r.best_embedding.as_ref().expect("feasible embedding");
        let d = best.squared_distance(0, 1).sqrt();
        assert!((4.0..=10.26).contains(&d), "{d}");
        let report = check_embedding(&g, best, &p).unwrap();
        assert!(report.feasible);
        assert_eq!(Some(report.gap), r.best_gap);
    }

    #[test]
    fn scaling_requires_coordinates() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        assert!(matches!(
            run_learning_phase(&g, None, &DomainParams::default(), &cfg(Initializer::Scaling, 1)),
            Err(Error::MissingCoordinates)
        ));
    }

    #[test]
    fn traces_are_monotone() {
        let inst = generate_instance(&GeneratorConfig::for_size(10, 3)).unwrap();
        let p = DomainParams::default();
        for init in Initializer::ALL {
            let r = run_learning_phase(&inst.graph, Some(&inst.coords), &p, &cfg(init, 400)).unwrap();
            assert_eq!(r.alpha_trace.len(), 400);
            assert!(r.alpha_trace.windows(2).all(|w| w[1] >= w[0]));
            assert!(r.alpha_trace.iter().all(|&a| a >= p.epsilon));
            for w in r.best_gap_trace.windows(2) {
                match (w[0], w[1]) {
                    (Some(a), Some(b)) => assert!(b >= a),
                    (Some(_), None) => panic!("best gap disappeared"),
                    _ => {}
                }
            }
            assert_eq!(r.first_feasible_epoch.is_some(), r.best_embedding.is_some());
        }
    }

    #[test]
    fn frozen_network_has_constant_inference() {
        let inst = generate_instance(&GeneratorConfig::for_size(10, 8)).unwrap();
        let p = DomainParams::default();
        let trial = TrialConfig {
            lr: 0.0,
            p_drop: 0.0,
            ..cfg(Initializer::Scaling, 20)
        };
        let start = initial_embedding(&inst.graph, Some(&inst.coords), &p, trial.init, trial.dim, trial.seed).unwrap();
        let input = flatten_coords(&start);
        let mut rng = ChaCha8Rng::seed_from_u64(trial.seed);
        let mut model = DenModel::build(10, 2, p.l, 0.0, &mut rng).unwrap();
        let mut opt = AdamW::new(AdamWConfig::new(0.0));
        let targets = build_targets(&inst.graph, &p, p.epsilon).unwrap();
        let first = model.forward(&input, Mode::Inference, &mut rng).unwrap().coords;
        for _ in 0..trial.epochs {
            let train = model.forward(&input, Mode::Training, &mut rng).unwrap();
            let (_, gv) = targets.evaluate(&train.v).unwrap();
            let grads = model.network().backward(&train.cache, &gv).unwrap();
            opt.step(model.network_mut(), &grads).unwrap();
            assert_eq!(model.forward(&input, Mode::Inference, &mut rng).unwrap().coords, first);
        }
        let r = run_learning_phase(&inst.graph, Some(&inst.coords), &p, &trial).unwrap();
        assert!(r.elf_trace.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn sweep_is_deterministic_across_worker_counts() {
        let inst = generate_instance(&GeneratorConfig::for_size(10, 4)).unwrap();
        let p = DomainParams::default();
        let sc = SweepConfig {
            epochs: 40,
            dim: 3,
            master_seed: 99,
            workers: 2,
        };
        let a = run_sweep("g0", &inst.graph, Some(&inst.coords), &p, &sc).unwrap();
        let b = run_sweep("g0", &inst.graph, Some(&inst.coords), &p, &SweepConfig { workers: 1, ..sc }).unwrap();
        assert_eq!(a.summary.trials.len(), 18);
        for (x, y) in a.summary.trials.iter().zip(&b.summary.trials) {
            assert_eq!((x.success, x.first_feasible_epoch, x.best_gap), (y.success, y.first_feasible_epoch, y.best_gap));
        }
        assert_eq!(a.summary.best, b.summary.best);
        assert_eq!(a.summary.success, a.summary.best.is_some());
    }

    #[test]
    fn failed_sweep_reports_no_success() {
        let inst = generate_instance(&GeneratorConfig::for_size(10, 4)).unwrap();
        let sc = SweepConfig {
            epochs: 0,
            dim: 2,
            master_seed: 1,
            workers: 1,
        };
        let out = run_sweep("g", &inst.graph, Some(&inst.coords), &DomainParams::default(), &sc).unwrap();
        assert!(!out.summary.success);
        assert!(out.summary.trials.iter().all(|t| t.first_feasible_epoch.is_none()));
        assert!(out.summary.best.is_none());
    }
}
