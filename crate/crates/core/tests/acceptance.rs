//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use den_core::dataset::Dataset;
use den_core::den::{flatten_coords, DenModel, COORD_LAYER};
use den_core::elf::{build_targets, ElfState};
use den_core::graph::{check_necessary_conditions, pairs, GeneratorConfig};
use den_core::init::{fruchterman_reingold_raw, FrConfig};
use den_core::nn::{fd_gradient_check, DropoutSpec};
use den_core::seed::derive_seed;
use den_core::trainer::{run_learning_phase, run_sweep, SweepConfig, SweepOutcome, TrialConfig, DEFAULT_EPOCHS};
use den_core::{check_embedding, DomainParams, Embedding, Graph, Initializer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    Graph::new(n, pairs(n).filter(|_| rng.gen_bool(p))).unwrap()
}

fn random_embedding(n: usize, dim: usize, half: f64, rng: &mut impl Rng) -> Embedding {
    Embedding::from_flat(dim, (0..n * dim).map(|_| rng.gen_range(-half..half)).collect()).unwrap()
}

fn distance_calculator() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    for n in [2, 10, 50, 100] {
        for dim in [2, 3] {
            let model = DenModel::build(n, dim, 50.0, 0.0, &mut rng).unwrap();
            for _ in 0..100 {
                let emb = random_embedding(n, dim, 50.0, &mut rng);
                let v = model.calculator_forward(&flatten_coords(&emb)).unwrap();
                ensure(v.len() == n * (n - 1) / 2, || format!("n={n}: {} outputs", v.len()))?;
                let rows = emb.rows();
                for ((i, j), got) in pairs(n).zip(&v) {
                    let want: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    worst = worst.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
                }
                sets += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-9, || format!("worst relative error {worst:e}"))?;
    ensure(secs < 10.0, || format!("took {secs:.2}s"))?;
    Ok(format!("{sets} sets, worst relative error {worst:.1e}, {secs:.2}s"))
}

/// On/off pattern of every ReLU unit and every loss hinge at the current parameters.
fn kink_pattern(model: &DenModel, input: &[f64], targets: &ElfState) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = model.network().forward(input, &DropoutSpec::inference(), &mut rng).unwrap();
    let mut pattern: Vec<bool> = (0..COORD_LAYER).flat_map(|k| cache.layer_output(k).iter().map(|&x| x > 0.0)).collect();
    for (k, &v) in cache.output().iter().enumerate() {
        pattern.push(v < targets.vt_min[k]);
        pattern.push(v > targets.vt_max[k]);
    }
    pattern
}

/// Parameters whose central difference disagrees with the analytic gradient,
/// split by whether a ReLU or hinge switches inside the `+-step` stencil.
fn classify_mismatches(model: &mut DenModel, input: &[f64], targets: &ElfState, step: f64, tol: f64) -> (usize, usize) {
    let loss = |v: &[f64]| targets.evaluate(v).map(|(value, _)| value.total()).unwrap();
    let eval = |model: &DenModel| {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        loss(model.network().forward(input, &DropoutSpec::inference(), &mut rng).unwrap().output())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let cache = model.network().forward(input, &DropoutSpec::inference(), &mut rng).unwrap();
    let (base, grad_v) = targets.evaluate(cache.output()).unwrap();
    let analytic = model.network().backward(&cache, &grad_v).unwrap().flat();
    let floor = 1e-6 * (1.0 + base.total().abs());
    let (mut at_kink, mut smooth) = (0, 0);
    for (idx, &a) in analytic.iter().enumerate() {
        let w = model.network().param(idx);
        let centre = kink_pattern(model, input, targets);
        model.network_mut().set_param(idx, w + step);
        let (plus, plus_pattern) = (eval(model), kink_pattern(model, input, targets));
        model.network_mut().set_param(idx, w - step);
        let (minus, minus_pattern) = (eval(model), kink_pattern(model, input, targets));
        model.network_mut().set_param(idx, w);
        let f = (plus - minus) / (2.0 * step);
        if (a - f).abs() / a.abs().max(f.abs()).max(floor) > tol {
            if plus_pattern != centre || minus_pattern != centre {
                at_kink += 1;
            } else {
                smooth += 1;
            }
        }
    }
    (at_kink, smooth)
}

fn gradient_oracle() -> Verdict {
    let start = Instant::now();
    let params = DomainParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut failed = Vec::new();
    let (mut at_kink, mut smooth) = (0, 0);
    for k in 0..10 {
        let n = 5;
        let dim = if k % 2 == 0 { 2 } else { 3 };
        let g = random_graph(n, 0.5, &mut rng);
        let mut model = DenModel::build(n, dim, params.l, 0.5, &mut rng).unwrap();
        let input = flatten_coords(&random_embedding(n, dim, params.l, &mut rng));
        let targets = build_targets(&g, &params, rng.gen_range(params.epsilon..3.0)).unwrap();
        let report = fd_gradient_check(
            model.network_mut(),
            |v: &[f64]| {
                let (value, grad) = targets.evaluate(v)?;
                Ok((value.total(), grad))
            },
            &input,
            1e-4,
            1e-4,
        )
        .unwrap();
        worst = worst.max(report.worst_rel_error);
        checked += report.checked;
        if !report.passed {
            failed.push(k);
            let (kink, other) = classify_mismatches(&mut model, &input, &targets, 1e-4, 1e-4);
            at_kink += kink;
            smooth += other;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let summary = format!("{checked} parameters, worst relative error {worst:.1e}, {secs:.2}s");
    ensure(failed.is_empty(), || {
        format!(
            "{summary}; graphs {failed:?} exceed 1e-4: {at_kink} component(s) with a ReLU/hinge switching \
             inside the stencil, {smooth} without"
        )
    })?;
    ensure(secs < 30.0, || format!("took {secs:.2}s"))?;
    Ok(summary)
}

/// Per-constraint evaluation on plain distances, written independently of
/// `check_embedding`.
struct Literal {
    violated: Vec<bool>,
    domain_ok: bool,
    d_adj: f64,
    d_nadj: f64,
    objective: f64,
}

fn literal_check(g: &Graph, e: &Embedding, p: &DomainParams) -> Literal {
    let rows = e.rows();
    let dist = |i: usize, j: usize| -> f64 {
        rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let mut violated = Vec::new();
    let mut adjacent = Vec::new();
    let mut non_adjacent = Vec::new();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let d = dist(i, j);
            if g.is_adjacent(i, j) {
                violated.push(!(d >= p.d_min && d <= p.d_adj));
                adjacent.push(d);
            } else {
                violated.push(!(d >= p.d_adj + p.epsilon && d <= 2.0 * p.l));
                non_adjacent.push(d);
            }
        }
    }
    // Empty pair sets fall back to D_min and 2L.
    let d_adj = if adjacent.is_empty() { p.d_min } else { adjacent.iter().copied().fold(f64::MIN, f64::max) };
    let d_nadj = if non_adjacent.is_empty() { 2.0 * p.l } else { non_adjacent.iter().copied().fold(f64::MAX, f64::min) };
    let domain_ok = rows.iter().flatten().all(|x| (-p.l..=p.l).contains(x));
    let count = violated.iter().filter(|&&v| v).count() as f64;
    Literal {
        violated,
        domain_ok,
        d_adj,
        d_nadj,
        objective: (2.0 * p.l - p.d_min + p.iota) * count + d_adj - d_nadj,
    }
}

fn feasibility_oracle() -> Verdict {
    let p = DomainParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut disagreements = Vec::new();
    let mut feasible = 0;
    for sample in 0..200 {
        let n = rng.gen_range(2..=15);
        let dim = rng.gen_range(2..=3);
        // Tight boxes give unit-disk-like layouts; wide ones stress the far bound.
        let half = [6.0, 10.0, 20.0, 52.0][sample % 4];
        let e = random_embedding(n, dim, half, &mut rng);
        let g = if sample % 3 == 0 {
            random_graph(n, 0.4, &mut rng)
        } else {
            let flip = if sample % 3 == 1 { 0.0 } else { 0.05 };
            Graph::new(
                n,
                pairs(n).filter(|&(i, j)| {
                    let d = e.squared_distance(i, j).sqrt();
                    (d <= p.d_adj) != rng.gen_bool(flip)
                }),
            )
            .unwrap()
        };
        let r = check_embedding(&g, &e, &p).unwrap();
        let lit = literal_check(&g, &e, &p);
        let lit_feasible = lit.domain_ok && !lit.violated.contains(&true);
        let agree = r.delta == lit.violated
            && r.coord_domain_ok == lit.domain_ok
            && r.feasible == lit_feasible
            && (r.d_adj - lit.d_adj).abs() <= 1e-9 * lit.d_adj
            && (r.d_nadj - lit.d_nadj).abs() <= 1e-9 * lit.d_nadj
            && (r.objective - lit.objective).abs() <= 1e-9 * (1.0 + lit.objective.abs());
        if !agree {
            disagreements.push(sample);
        }
        feasible += lit_feasible as usize;
    }
    ensure(disagreements.is_empty(), || format!("disagreements on samples {disagreements:?}"))?;
    ensure(feasible > 0 && feasible < 200, || format!("degenerate sample mix: {feasible} feasible"))?;
    Ok(format!("200 samples ({feasible} feasible), 0 disagreements"))
}

fn hexagon() -> Vec<[f64; 2]> {
    // 2*sqrt(3) rounds down in f64; nudge so the short pairs sit exactly on D_min.
    let mut h = 2.0 * 3f64.sqrt();
    while 4.0 + h * h < 16.0 {
        h = h.next_up();
    }
    vec![[0.0, 0.0], [4.0, 0.0], [2.0, h], [-2.0, h], [-4.0, 0.0], [-2.0, -h], [2.0, -h]]
}

fn geometry_fixtures() -> Verdict {
    let p = DomainParams::default();
    let k7 = Graph::complete(7);
    let rows = hexagon();
    let r = check_embedding(&k7, &Embedding::from_rows(2, &rows).unwrap(), &p).unwrap();
    ensure(r.feasible, || format!("hexagon infeasible: {:?}", r.violations()))?;
    ensure((r.d_adj - 8.0).abs() < 1e-12, || format!("max pair distance {}", r.d_adj))?;

    let mut moved = rows.clone();
    moved[1] = [-6.75, -1.0];
    let r = check_embedding(&k7, &Embedding::from_rows(2, &moved).unwrap(), &p).unwrap();
    let d = ((moved[1][0] - moved[4][0]).powi(2) + (moved[1][1] - moved[4][1]).powi(2)).sqrt();
    ensure(!r.feasible && r.violations() == vec![(1, 4)], || format!("violations {:?}", r.violations()))?;
    ensure(d < 3.0, || format!("perturbed pair at {d}"))?;
    Ok(format!("hexagon feasible, max distance 8; perturbed pair (1,4) at {d:.3} is the only violation"))
}

fn fr_equilibrium() -> Verdict {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let mut seen = Vec::new();
    for dim in [2, 3] {
        for seed in 0..5 {
            let cfg = FrConfig::new(dim, seed);
            ensure(cfg.k == 7.0 && cfg.iterations == 1000, || format!("config {cfg:?}"))?;
            let e = fruchterman_reingold_raw(&g, &cfg).unwrap();
            let d = e.squared_distance(0, 1).sqrt();
            ensure((d - 7.0).abs() <= 0.05 * 7.0, || format!("dim {dim} seed {seed}: distance {d}"))?;
            seen.push(d);
        }
    }
    let lo = seen.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = seen.iter().copied().fold(0.0, f64::max);
    Ok(format!("10 runs, distance in [{lo:.4}, {hi:.4}]"))
}

fn condition_gate() -> Verdict {
    let accepted = |g: &Graph| check_necessary_conditions(g).accepted;
    ensure(accepted(&Graph::complete(7)), || "K7 rejected".into())?;
    let k8 = check_necessary_conditions(&Graph::complete(8));
    ensure(!k8.accepted && k8.failed_condition() == Some("clique"), || format!("K8: {k8:?}"))?;
    let star = check_necessary_conditions(&Graph::new(20, (1..20).map(|v| (0, v))).unwrap());
    ensure(!star.accepted && star.failed_condition() == Some("max_degree"), || format!("star: {star:?}"))?;
    let split = check_necessary_conditions(&Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap());
    ensure(!split.accepted && split.failed_condition() == Some("connected"), || format!("two triangles: {split:?}"))?;
    ensure(!accepted(&Graph::empty(3)), || "edgeless graph accepted".into())?;
    Ok("K7 accepted; K8, 19-leaf star, disconnected graphs rejected".into())
}

const DESK_GRAPHS: usize = 10;
const DESK_SEED: u64 = 2024;

struct Desk {
    graphs: Vec<Graph>,
    twod: Vec<SweepOutcome>,
    threed: Vec<SweepOutcome>,
    secs: f64,
}

fn desk_sweeps() -> Desk {
    let start = Instant::now();
    let ds = Dataset::generate(&[10], DESK_GRAPHS, DESK_SEED).unwrap();
    let params = DomainParams::default();
    let run = |dim: usize| -> Vec<SweepOutcome> {
        ds.graphs
            .iter()
            .enumerate()
            .map(|(index, rec)| {
                let cfg = SweepConfig {
                    epochs: DEFAULT_EPOCHS,
                    dim,
                    master_seed: derive_seed(DESK_SEED, index as u64),
                    workers: 0,
                };
                run_sweep(&rec.id, &rec.graph().unwrap(), rec.coords(), &params, &cfg).unwrap()
            })
            .collect()
    };
    let twod = run(2);
    let threed = run(3);
    Desk {
        graphs: ds.graphs.iter().map(|r| r.graph().unwrap()).collect(),
        twod,
        threed,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn successes(runs: &[SweepOutcome]) -> usize {
    runs.iter().filter(|o| o.summary.success).count()
}

fn desk_success(desk: &Desk) -> Verdict {
    let (s2, s3) = (successes(&desk.twod), successes(&desk.threed));
    let msg = format!("2D {s2}/{DESK_GRAPHS}, 3D {s3}/{DESK_GRAPHS} graphs feasible, {:.1}s", desk.secs);
    ensure(2 * s2 >= DESK_GRAPHS, || format!("{msg}: 2D below 50%"))?;
    ensure(s3 >= s2, || format!("{msg}: 3D below 2D"))?;
    Ok(msg)
}

fn monotonicity(desk: &Desk) -> Verdict {
    let params = DomainParams::default();
    let mut trials = 0;
    let mut stored = 0;
    let runs = desk.twod.iter().zip(&desk.graphs).chain(desk.threed.iter().zip(&desk.graphs));
    for (outcome, g) in runs {
        for r in &outcome.results {
            trials += 1;
            let id = format!("{} trial {:?}", outcome.summary.graph_id, r.config);
            ensure(r.alpha_trace.windows(2).all(|w| w[1] >= w[0]), || format!("{id}: alpha decreased"))?;
            ensure(
                r.best_gap_trace.windows(2).all(|w| match (w[0], w[1]) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(a), Some(b)) => b >= a,
                }),
                || format!("{id}: best gap decreased"),
            )?;
            if let Some(best) = &r.best_embedding {
                stored += 1;
                let check = check_embedding(g, best, &params).unwrap();
                ensure(check.feasible, || format!("{id}: stored best is infeasible"))?;
                ensure(Some(check.gap) == r.best_gap, || format!("{id}: stored gap differs from re-check"))?;
            }
        }
    }
    Ok(format!("{trials} trials monotone, {stored} stored embeddings re-verified"))
}

fn mean_epoch_secs(n: usize, dim: usize) -> f64 {
    let params = DomainParams::default();
    let inst = den_core::graph::generate_instance(&GeneratorConfig::for_size(n, 11)).unwrap();
    let cfg = TrialConfig {
        lr: 0.001,
        p_drop: 0.5,
        init: Initializer::Scaling,
        epochs: 1000,
        dim,
        seed: 5,
    };
    let r = run_learning_phase(&inst.graph, Some(&inst.coords), &params, &cfg).unwrap();
    r.epoch_wall_times.iter().sum::<f64>() / r.epoch_wall_times.len() as f64
}

fn scaling_trend() -> Verdict {
    let mut parts = Vec::new();
    for dim in [2, 3] {
        // Warm caches and the allocator before timing.
        mean_epoch_secs(10, dim);
        let small = mean_epoch_secs(10, dim);
        let large = mean_epoch_secs(100, dim);
        let ratio = large / small;
        let line = format!("N={dim}: {:.1}us -> {:.1}us (x{ratio:.2})", small * 1e6, large * 1e6);
        ensure(ratio <= 15.0, || line.clone())?;
        parts.push(line);
    }
    Ok(parts.join("; "))
}

type Fingerprint = Vec<(bool, Option<f64>, Option<usize>)>;

fn fingerprint(runs: &[SweepOutcome]) -> Fingerprint {
    runs.iter()
        .flat_map(|o| &o.results)
        .map(|r| (r.success(), r.best_gap, r.first_feasible_epoch))
        .collect()
}

fn determinism(desk: &Desk) -> Verdict {
    let again = desk_sweeps();
    let mut mismatched = Vec::new();
    for (name, a, b) in [("2D", &desk.twod, &again.twod), ("3D", &desk.threed, &again.threed)] {
        let flags_a: Vec<bool> = a.iter().map(|o| o.summary.success).collect();
        let flags_b: Vec<bool> = b.iter().map(|o| o.summary.success).collect();
        if flags_a != flags_b || fingerprint(a) != fingerprint(b) {
            mismatched.push(name);
        }
    }
    ensure(mismatched.is_empty(), || format!("replay differs for {mismatched:?}"))?;
    Ok(format!(
        "{} trials replayed with identical success flags, gaps and first-feasible epochs",
        fingerprint(&desk.twod).len() + fingerprint(&desk.threed).len()
    ))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Verdict) -> bool {
    let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (tag, detail) = match &verdict {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {id:>2} {tag}  {name}: {detail}");
    verdict.is_ok()
}

fn main() {
    let mut ok = true;
    ok &= run(1, "distance calculator exactness", distance_calculator);
    ok &= run(2, "gradient oracle", gradient_oracle);
    ok &= run(3, "feasibility oracle equivalence", feasibility_oracle);
    ok &= run(4, "geometry fixtures", geometry_fixtures);
    ok &= run(5, "FR equilibrium", fr_equilibrium);
    ok &= run(6, "condition gate", condition_gate);

    let desk = catch_unwind(desk_sweeps).ok();
    let missing = || Err::<String, _>("desk-scale sweeps did not complete".to_string());
    ok &= run(7, "desk-scale success", || desk.as_ref().map_or_else(missing, desk_success));
    ok &= run(8, "monotonicity and re-verification", || desk.as_ref().map_or_else(missing, monotonicity));
    ok &= run(9, "epoch time scaling", scaling_trend);
    ok &= run(10, "determinism", || desk.as_ref().map_or_else(missing, determinism));

    if !ok {
        std::process::exit(1);
    }
}
