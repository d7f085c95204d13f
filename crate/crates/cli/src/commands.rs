use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use den_core::dataset::{write_atomic, Dataset, GraphRecord};
use den_core::report::write_reports;
use den_core::seed::derive_seed;
use den_core::svg::render_register;
use den_core::trainer::{initial_embedding, run_learning_phase, run_sweep, SweepConfig, TrialConfig};
use den_core::{check_embedding, DomainParams, Embedding, Error, Graph};
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{sibling_path, RunManifest};
use crate::{CheckArgs, EmbedArgs, Failure, GenDatasetArgs, GraphRef, SweepArgs, EXIT_INFEASIBLE, EXIT_INTERNAL};

type CmdResult = Result<u8, Failure>;

fn domain(params: DomainParams) -> Result<DomainParams, Failure> {
    params.validate().map_err(Failure::usage)?;
    Ok(params)
}

fn load_dataset(path: &Path) -> Result<Dataset, Failure> {
    Dataset::load(path)
        .with_context(|| format!("reading dataset {}", path.display()))
        .map_err(Failure::usage)
}

fn load_graph(r: &GraphRef) -> Result<(GraphRecord, Graph), Failure> {
    let ds = load_dataset(&r.dataset)?;
    let rec = ds
        .find(&r.graph_id)
        .cloned()
        .ok_or_else(|| Failure::usage(anyhow!("graph '{}' not in {}", r.graph_id, r.dataset.display())))?;
    let g = rec.graph().map_err(Failure::usage)?;
    Ok((rec, g))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    write_atomic(path, serde_json::to_string_pretty(value)?.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

fn write_svg(path: &Path, g: &Graph, emb: &Embedding, params: &DomainParams) -> anyhow::Result<()> {
    let view = render_register(g, emb, params)?;
    if !view.mismatches.is_empty() {
        eprintln!("register view: {} pair(s) where geometry disagrees with adjacency", view.mismatches.len());
    }
    write_atomic(path, view.svg.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

pub fn gen_dataset(a: &crate::GenDatasetArgs) -> CmdResult {
    let GenDatasetArgs { n_list, count, seed, out } = a;
    let ds = Dataset::generate(n_list, *count, *seed).map_err(|e| match e {
        Error::Generation { n, .. } => Failure {
            code: EXIT_INTERNAL,
            error: anyhow!(e).context(format!("dataset generation failed for n = {n}")),
        },
        other => other.into(),
    })?;
    ds.save(out).with_context(|| format!("writing {}", out.display()))?;

    let mut manifest = RunManifest::new("gen-dataset", json!({ "n_list": n_list, "count": count }));
    manifest.master_seed = Some(*seed);
    manifest.outputs.push(out.clone());
    manifest.write(&sibling_path(out))?;
    eprintln!("wrote {} graphs to {}", ds.graphs.len(), out.display());
    Ok(0)
}

pub fn embed(a: &EmbedArgs) -> CmdResult {
    let params = domain(a.domain.params())?;
    let cfg = TrialConfig {
        lr: a.lr,
        p_drop: a.pdrop,
        init: a.init,
        epochs: a.epochs,
        dim: a.dim as usize,
        seed: a.seed,
    };
    cfg.validate().map_err(Failure::usage)?;
    let (rec, g) = load_graph(&a.graph)?;

    let result = run_learning_phase(&g, rec.coords(), &params, &cfg).map_err(|e| match e {
        Error::MissingCoordinates => Failure::usage(anyhow!("graph '{}' has no points for the scaling initializer", rec.id)),
        other => other.into(),
    })?;
    write_json(&a.out, &result)?;

    let mut manifest = RunManifest::new(
        "embed",
        json!({ "graph_id": rec.id, "trial": cfg, "params": params }),
    );
    manifest.dataset = Some(a.graph.dataset.clone());
    manifest.master_seed = Some(a.seed);
    manifest.outputs.push(a.out.clone());
    if let Some(svg) = &a.svg {
        // Without a feasible result, show the starting layout instead.
        let start;
        let emb = match &result.best_embedding {
            Some(e) => e,
            None => {
                start = initial_embedding(&g, rec.coords(), &params, cfg.init, cfg.dim, cfg.seed)?;
                &start
            }
        };
        write_svg(svg, &g, emb, &params)?;
        manifest.outputs.push(svg.clone());
    }
    manifest.write(&sibling_path(&a.out))?;

    println!(
        "{}",
        json!({
            "graph_id": rec.id,
            "feasible": result.success(),
            "best_gap": result.best_gap,
            "first_feasible_epoch": result.first_feasible_epoch,
        })
    );
    Ok(if result.success() { 0 } else { EXIT_INFEASIBLE })
}

#[derive(Serialize)]
struct GraphFailure {
    graph_id: String,
    error: String,
}

pub fn sweep(a: &SweepArgs) -> CmdResult {
    let params = domain(a.domain.params())?;
    let ds = load_dataset(&a.dataset)?;
    let graphs_dir = a.out_dir.join("graphs");
    fs::create_dir_all(&graphs_dir).with_context(|| format!("creating {}", graphs_dir.display()))?;

    let mut summaries = Vec::with_capacity(ds.graphs.len());
    let mut failures = Vec::new();
    let mut outputs: Vec<PathBuf> = Vec::new();
    for (index, rec) in ds.graphs.iter().enumerate() {
        let cfg = SweepConfig {
            epochs: a.epochs,
            dim: a.dim as usize,
            master_seed: derive_seed(a.seed, index as u64),
            workers: a.workers,
        };
        let outcome = rec
            .graph()
            .and_then(|g| run_sweep(&rec.id, &g, rec.coords(), &params, &cfg))
            .map_err(anyhow::Error::from)
            .and_then(|o| {
                let path = graphs_dir.join(format!("{}.json", rec.id));
                write_json(&path, &o.summary)?;
                Ok((o.summary, path))
            });
        match outcome {
            Ok((summary, path)) => {
                eprintln!(
                    "{}: {} ({} of {} trials feasible)",
                    rec.id,
                    if summary.success { "feasible" } else { "infeasible" },
                    summary.trials.iter().filter(|t| t.success).count(),
                    summary.trials.len()
                );
                outputs.push(path);
                summaries.push(summary);
            }
            Err(e) => {
                eprintln!("{}: failed: {e:#}", rec.id);
                failures.push(GraphFailure {
                    graph_id: rec.id.clone(),
                    error: format!("{e:#}"),
                });
            }
        }
    }

    outputs.extend(write_reports(&a.out_dir, &summaries)?);
    let mut manifest = RunManifest::new(
        "sweep",
        json!({
            "dim": a.dim,
            "epochs": a.epochs,
            "workers": a.workers,
            "params": params,
            "graphs": ds.graphs.len(),
            "failures": failures,
        }),
    );
    manifest.dataset = Some(a.dataset.clone());
    manifest.master_seed = Some(a.seed);
    manifest.outputs = outputs;
    manifest.write(&a.out_dir.join("manifest.json"))?;

    let feasible = summaries.iter().filter(|s| s.success).count();
    println!("{feasible} of {} graphs feasible", ds.graphs.len());
    Ok(if failures.is_empty() { 0 } else { EXIT_INTERNAL })
}

fn rows_embedding(rows: &Value) -> anyhow::Result<Embedding> {
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows.clone())?;
    let dim = rows.first().map_or(2, Vec::len);
    Ok(Embedding::from_rows(dim, &rows)?)
}

/// Accepts a bare coordinate array, an embedding, a trial result or a sweep summary.
fn parse_coords(text: &str) -> anyhow::Result<Embedding> {
    let v: Value = serde_json::from_str(text)?;
    if v.is_array() {
        return rows_embedding(&v);
    }
    if v.get("dim").is_some() && v.get("coords").is_some() {
        return Ok(serde_json::from_value(v)?);
    }
    if let Some(best) = v.get("best_embedding") {
        if best.is_null() {
            return Err(anyhow!("trial result holds no feasible embedding"));
        }
        return Ok(serde_json::from_value(best.clone())?);
    }
    if let Some(best) = v.get("best") {
        return match best.get("coords") {
            Some(rows) => rows_embedding(rows),
            None => Err(anyhow!("sweep summary holds no feasible embedding")),
        };
    }
    Err(anyhow!("unrecognised coordinate file layout"))
}

pub fn check(a: &CheckArgs) -> CmdResult {
    let params = domain(a.domain.params())?;
    let text = fs::read_to_string(&a.coords)
        .with_context(|| format!("reading {}", a.coords.display()))
        .map_err(Failure::usage)?;
    let emb = parse_coords(&text)
        .with_context(|| format!("parsing {}", a.coords.display()))
        .map_err(Failure::usage)?;
    let (_, g) = load_graph(&a.graph)?;
    if emb.n() != g.n() {
        return Err(Failure::usage(anyhow!(
            "{} holds {} points but graph '{}' has {} vertices",
            a.coords.display(),
            emb.n(),
            a.graph.graph_id,
            g.n()
        )));
    }
    let report = check_embedding(&g, &emb, &params)?;
    println!("{}", serde_json::to_string_pretty(&report.to_json()).map_err(anyhow::Error::from)?);

    if let Some(svg) = &a.svg {
        write_svg(svg, &g, &emb, &params)?;
        let mut manifest = RunManifest::new(
            "check",
            json!({ "coords": a.coords, "graph_id": a.graph.graph_id, "params": params }),
        );
        manifest.dataset = Some(a.graph.dataset.clone());
        manifest.outputs.push(svg.clone());
        manifest.write(&sibling_path(svg))?;
    }
    Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE })
}
