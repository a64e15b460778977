//! Parameter sweeps over generated instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::mpsc;

use anyhow::{Context, Result};
use cdw_core::algorithms::{self, AlgorithmKind, SolveOptions};
use cdw_core::generator::{generate, PresetPoint};
use cdw_core::schema::{GraphDocument, SolutionDocument};
use cdw_core::{ConstraintSet, SolveError, WorkflowGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::files::digest;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Timeout,
    BudgetExceeded,
}

/// One CSV line: one algorithm on one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub dataset: String,
    pub algorithm: AlgorithmKind,
    pub n_constraints: usize,
    pub n_vertices: usize,
    pub path_length: usize,
    pub n_paths: u64,
    pub trial: usize,
    pub seed: u64,
    pub runtime_ms: Option<f64>,
    pub utility_abs: Option<f64>,
    pub utility_pct: Option<f64>,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub dataset: String,
    pub points: Vec<PresetPoint>,
    pub algorithms: Vec<AlgorithmKind>,
    pub trials: usize,
    /// Trial `t` uses seed `base_seed + t` at every point.
    pub base_seed: u64,
    pub solve: SolveOptions,
    /// Brute force is skipped at points with more constraints than this.
    pub brute_force_max_constraints: Option<usize>,
    /// When false, `runtime_ms` is left empty so output is reproducible.
    pub timing: bool,
    pub artifacts: Option<PathBuf>,
    pub jobs: usize,
}

#[derive(Clone, Debug, Serialize)]
struct ManifestEntry {
    n_constraints: usize,
    n_vertices: usize,
    path_length: usize,
    trial: usize,
    seed: u64,
    graph: String,
    solutions: BTreeMap<String, String>,
}

struct CellOutput {
    rows: Vec<ExperimentRow>,
    manifest: Option<ManifestEntry>,
}

fn instance_paths(graph: &WorkflowGraph, constraints: &ConstraintSet) -> u64 {
    constraints
        .pairs()
        .iter()
        .map(|&(s, t)| graph.count_paths(s, t).unwrap_or(u64::MAX))
        .fold(0u64, u64::saturating_add)
}

fn run_cell(plan: &BenchPlan, point: &PresetPoint, trial: usize) -> Result<CellOutput> {
    let seed = plan.base_seed.wrapping_add(trial as u64);
    let (graph, constraints) = generate::<f64>(&point.config(seed))
        .with_context(|| format!("cannot generate instance for {point:?} with seed {seed}"))?;
    let n_paths = instance_paths(&graph, &constraints);
    let original = graph.utility()?;

    let stem = format!(
        "{}_n{}_v{}_k{}_t{}",
        plan.dataset, point.n_constraints, point.n_vertices, point.path_length, trial
    );
    let mut manifest = None;
    let mut graph_digest = String::new();
    if let Some(dir) = &plan.artifacts {
        let text = format!("{}\n", GraphDocument::from_workflow(&graph, &constraints).to_json());
        graph_digest = digest(text.as_bytes());
        let name = format!("{stem}.json");
        fs::write(dir.join(&name), text)?;
        manifest = Some(ManifestEntry {
            n_constraints: point.n_constraints,
            n_vertices: point.n_vertices,
            path_length: point.path_length,
            trial,
            seed,
            graph: name,
            solutions: BTreeMap::new(),
        });
    }

    let mut rows = Vec::new();
    for &kind in &plan.algorithms {
        if kind == AlgorithmKind::BruteForce
            && plan.brute_force_max_constraints.is_some_and(|m| point.n_constraints > m)
        {
            continue;
        }
        let opts = SolveOptions { seed, ..plan.solve.clone() };
        let mut row = ExperimentRow {
            dataset: plan.dataset.clone(),
            algorithm: kind,
            n_constraints: constraints.len(),
            n_vertices: graph.vertex_count(),
            path_length: point.path_length,
            n_paths,
            trial,
            seed,
            runtime_ms: None,
            utility_abs: None,
            utility_pct: None,
            status: Status::Ok,
        };
        match algorithms::solve(kind, &graph, &constraints, &opts) {
            Ok(sol) => {
                if !sol.graph.is_feasible(&constraints)? {
                    anyhow::bail!(crate::Guard(format!("{kind} left a constrained path on {stem}")));
                }
                row.runtime_ms = plan.timing.then(|| sol.runtime_ms());
                row.utility_abs = Some(sol.utility + 0.0);
                row.utility_pct = Some(if original > 0.0 { 100.0 * sol.utility / original } else { 100.0 });
                if let (Some(dir), Some(entry)) = (&plan.artifacts, manifest.as_mut()) {
                    let name = format!("{stem}_{kind}.json");
                    let doc = SolutionDocument::new(&sol, original, graph_digest.clone());
                    fs::write(dir.join(&name), format!("{}\n", doc.to_json()))?;
                    entry.solutions.insert(kind.to_string(), name);
                }
            }
            Err(SolveError::Timeout) => row.status = Status::Timeout,
            Err(e) if e.is_budget() => row.status = Status::BudgetExceeded,
            Err(e) => return Err(e.into()),
        }
        rows.push(row);
    }
    Ok(CellOutput { rows, manifest })
}

/// Runs every `(point, trial)` cell, writing CSV rows to `out` in cell
/// order as soon as they are available. Returns all rows.
pub fn run_bench<W: Write>(plan: &BenchPlan, out: W) -> Result<Vec<ExperimentRow>> {
    if let Some(dir) = &plan.artifacts {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let cells: Vec<(usize, usize)> = (0..plan.points.len())
        .flat_map(|p| (0..plan.trials).map(move |t| (p, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(plan.jobs.max(1)).build()?;

    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut all = Vec::new();
    let mut manifest = Vec::new();
    let mut failure = None;
    let (tx, rx) = mpsc::channel();

    std::thread::scope(|scope| -> Result<()> {
        let cells = &cells;
        scope.spawn(move || {
            pool.install(|| {
                cells.par_iter().enumerate().for_each_with(tx, |tx, (i, &(p, t))| {
                    let _ = tx.send((i, run_cell(plan, &plan.points[p], t)));
                });
            });
        });

        let mut pending = BTreeMap::new();
        let mut next = 0;
        for (i, result) in rx {
            pending.insert(i, result);
            while let Some(result) = pending.remove(&next) {
                next += 1;
                match result {
                    Ok(cell) if failure.is_none() => {
                        for row in cell.rows {
                            writer.serialize(&row)?;
                            writer.flush()?;
                            all.push(row);
                        }
                        manifest.extend(cell.manifest);
                    }
                    Ok(_) => {}
                    Err(e) => {
                        failure.get_or_insert(e);
                    }
                }
            }
        }
        Ok(())
    })?;

    if all.is_empty() && failure.is_none() {
        // still emit the header
        writer.write_record([
            "dataset", "algorithm", "n_constraints", "n_vertices", "path_length", "n_paths", "trial", "seed",
            "runtime_ms", "utility_abs", "utility_pct", "status",
        ])?;
    }
    writer.flush()?;
    if let Some(e) = failure {
        return Err(e);
    }
    if let Some(dir) = &plan.artifacts {
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(dir.join("manifest.json"), format!("{text}\n"))?;
    }
    Ok(all)
}

/// Per-point, per-algorithm aggregate over trials.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryLine {
    pub n_constraints: usize,
    pub n_vertices: usize,
    pub path_length: usize,
    pub algorithm: AlgorithmKind,
    pub ok: usize,
    pub timeouts: usize,
    pub over_budget: usize,
    pub mean_pct: Option<f64>,
    /// Sample standard deviation over `sqrt(ok)`.
    pub se_pct: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    pub se_runtime_ms: Option<f64>,
}

/// Mean and standard error of `xs`.
pub fn mean_se(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = xs.len();
    if n == 0 {
        return (None, None);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(var.sqrt() / (n as f64).sqrt()))
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<SummaryLine> {
    let mut groups: BTreeMap<(usize, usize, usize, AlgorithmKind), Vec<&ExperimentRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.n_constraints, r.n_vertices, r.path_length, r.algorithm))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((n_constraints, n_vertices, path_length, algorithm), rs)| {
            let count = |s| rs.iter().filter(|r| r.status == s).count();
            let pct: Vec<f64> = rs.iter().filter_map(|r| r.utility_pct).collect();
            let ms: Vec<f64> = rs.iter().filter_map(|r| r.runtime_ms).collect();
            let (mean_pct, se_pct) = mean_se(&pct);
            let (mean_runtime_ms, se_runtime_ms) = mean_se(&ms);
            SummaryLine {
                n_constraints,
                n_vertices,
                path_length,
                algorithm,
                ok: count(Status::Ok),
                timeouts: count(Status::Timeout),
                over_budget: count(Status::BudgetExceeded),
                mean_pct,
                se_pct,
                mean_runtime_ms,
                se_runtime_ms,
            }
        })
        .collect()
}

pub fn render_summary(lines: &[SummaryLine]) -> String {
    let fmt = |x: Option<f64>, digits: usize| x.map_or("-".to_string(), |v| format!("{v:.digits$}"));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>6} {:>3}  {:<20} {:>4} {:>4} {:>4}  {:>8} {:>6}  {:>11} {:>9}",
        "|N|", "|V|", "k", "algorithm", "ok", "t/o", "bud", "util %", "SE", "runtime ms", "SE"
    );
    for l in lines {
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>3}  {:<20} {:>4} {:>4} {:>4}  {:>8} {:>6}  {:>11} {:>9}",
            l.n_constraints,
            l.n_vertices,
            l.path_length,
            l.algorithm.name(),
            l.ok,
            l.timeouts,
            l.over_budget,
            fmt(l.mean_pct, 2),
            fmt(l.se_pct, 2),
            fmt(l.mean_runtime_ms, 3),
            fmt(l.se_runtime_ms, 3),
        );
    }
    out
}
