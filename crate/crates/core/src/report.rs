//! Aggregate CSV reports over sweep summaries.
//!
//! | file                 | columns |
//! |----------------------|---------|
//! | `success.csv`        | `n,dim,graphs,feasible_graphs,success_pct,scaling_pct,fr_pct` |
//! | `first_feasible.csv` | `n,dim,init,trials,feasible_trials,min_epoch,median_epoch,mean_epoch,max_epoch` |
//! | `timing.csv`         | `n,dim,graphs,mean_trial_secs,mean_epoch_ms` |
//! | `gaps.csv`           | `graph_id,n,dim,feasible,best_gap,best_trial` |
//!
//! Rows are sorted by `(n, dim)` (then `init` or `graph_id`). Empty cells mean
//! "no feasible result". Every file except `timing.csv` is a pure function of
//! the summaries, so replaying a sweep with the same seed reproduces them
//! byte for byte; `timing.csv` holds wall-clock measurements.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::dataset::write_atomic;
use crate::error::Result;
use crate::init::Initializer;
use crate::trainer::SweepSummary;

pub const SUCCESS_CSV: &str = "success.csv";
pub const FIRST_FEASIBLE_CSV: &str = "first_feasible.csv";
pub const TIMING_CSV: &str = "timing.csv";
pub const GAPS_CSV: &str = "gaps.csv";

fn by_size(summaries: &[SweepSummary]) -> BTreeMap<(usize, usize), Vec<&SweepSummary>> {
    let mut groups: BTreeMap<_, Vec<_>> = BTreeMap::new();
    for s in summaries {
        groups.entry((s.n, s.dim)).or_default().push(s);
    }
    groups
}

fn pct(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| e.into_error().into())
}

/// A graph counts as feasible for an initializer when any of its trials with
/// that initializer succeeded.
pub fn success_csv(summaries: &[SweepSummary]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "dim", "graphs", "feasible_graphs", "success_pct", "scaling_pct", "fr_pct"])?;
    for ((n, dim), group) in by_size(summaries) {
        let total = group.len();
        let feasible = group.iter().filter(|s| s.success).count();
        let with_init = |init: Initializer| {
            group
                .iter()
                .filter(|s| s.trials.iter().any(|t| t.config.init == init && t.success))
                .count()
        };
        w.write_record([
            n.to_string(),
            dim.to_string(),
            total.to_string(),
            feasible.to_string(),
            pct(feasible, total).to_string(),
            pct(with_init(Initializer::Scaling), total).to_string(),
            pct(with_init(Initializer::Fr), total).to_string(),
        ])?;
    }
    finish(w)
}

fn median(sorted: &[usize]) -> Option<f64> {
    let m = sorted.len();
    match m {
        0 => None,
        _ if m % 2 == 1 => Some(sorted[m / 2] as f64),
        _ => Some((sorted[m / 2 - 1] + sorted[m / 2]) as f64 / 2.0),
    }
}

pub fn first_feasible_csv(summaries: &[SweepSummary]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "dim",
        "init",
        "trials",
        "feasible_trials",
        "min_epoch",
        "median_epoch",
        "mean_epoch",
        "max_epoch",
    ])?;
    for ((n, dim), group) in by_size(summaries) {
        for init in Initializer::ALL {
            let trials: Vec<_> = group
                .iter()
                .flat_map(|s| &s.trials)
                .filter(|t| t.config.init == init)
                .collect();
            let mut epochs: Vec<usize> = trials.iter().filter_map(|t| t.first_feasible_epoch).collect();
            epochs.sort_unstable();
            let mean = (!epochs.is_empty())
                .then(|| epochs.iter().sum::<usize>() as f64 / epochs.len() as f64);
            w.write_record([
                n.to_string(),
                dim.to_string(),
                init.to_string(),
                trials.len().to_string(),
                epochs.len().to_string(),
                epochs.first().map(|e| e.to_string()).unwrap_or_default(),
                opt(median(&epochs)),
                opt(mean),
                epochs.last().map(|e| e.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    finish(w)
}

pub fn timing_csv(summaries: &[SweepSummary]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "dim", "graphs", "mean_trial_secs", "mean_epoch_ms"])?;
    for ((n, dim), group) in by_size(summaries) {
        let trial_secs = group.iter().map(|s| s.mean_trial_secs).sum::<f64>() / group.len() as f64;
        let epoch_ms: Vec<f64> = group.iter().flat_map(|s| s.trials.iter().map(|t| t.mean_epoch_ms)).collect();
        let epoch_ms = if epoch_ms.is_empty() {
            0.0
        } else {
            epoch_ms.iter().sum::<f64>() / epoch_ms.len() as f64
        };
        w.write_record([
            n.to_string(),
            dim.to_string(),
            group.len().to_string(),
            trial_secs.to_string(),
            epoch_ms.to_string(),
        ])?;
    }
    finish(w)
}

pub fn gaps_csv(summaries: &[SweepSummary]) -> Result<Vec<u8>> {
    let mut sorted: Vec<&SweepSummary> = summaries.iter().collect();
    sorted.sort_by(|a, b| (a.n, a.dim, &a.graph_id).cmp(&(b.n, b.dim, &b.graph_id)));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["graph_id", "n", "dim", "feasible", "best_gap", "best_trial"])?;
    for s in sorted {
        w.write_record([
            s.graph_id.clone(),
            s.n.to_string(),
            s.dim.to_string(),
            s.success.to_string(),
            opt(s.best.as_ref().map(|b| b.gap)),
            s.best.as_ref().map(|b| b.trial_index.to_string()).unwrap_or_default(),
        ])?;
    }
    finish(w)
}

/// Writes the four reports into `dir` and returns their paths.
pub fn write_reports(dir: &Path, summaries: &[SweepSummary]) -> Result<Vec<PathBuf>> {
    let files = [
        (SUCCESS_CSV, success_csv(summaries)?),
        (FIRST_FEASIBLE_CSV, first_feasible_csv(summaries)?),
        (TIMING_CSV, timing_csv(summaries)?),
        (GAPS_CSV, gaps_csv(summaries)?),
    ];
    let mut paths = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        paths.push(path);
    }
    Ok(paths)
}
