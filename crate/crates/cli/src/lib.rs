//! `cdw`: generate workflows, solve them, verify solutions and run sweeps.
//!
//! Exit codes: 0 ok, 1 infeasible solution, 2 usage or input error,
//! 3 budget or deadline exceeded, 4 internal guard tripped, 5 utility
//! mismatch.

pub mod bench;
pub mod files;

use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use cdw_core::algorithms::{self, AlgorithmKind, SolveOptions, DEFAULT_CANDIDATE_BUDGET};
use cdw_core::generator::{dataset2_vertices, generate, preset, Distribution, PresetPoint, PRESET_NAMES};
use cdw_core::multicut::DEFAULT_PATH_BUDGET;
use cdw_core::schema::{GraphDocument, SolutionDocument};
use cdw_core::SolveError;
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INFEASIBLE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_GUARD: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

/// A solver returned a solution that fails its own constraints.
#[derive(Debug)]
pub struct Guard(pub String);

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "internal check failed: {}", self.0)
    }
}

impl std::error::Error for Guard {}

#[derive(Debug, Parser)]
#[command(name = "cdw", version, about = "Consent-respecting edge removal on data workflow graphs")]
pub struct Cli {
    /// Seed for instance generation and randomized solvers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Per-solve wall-clock limit in milliseconds; 0 disables it.
    #[arg(long, global = true, default_value_t = 60_000)]
    pub timeout_ms: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Suppress human-readable summaries.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a layered workflow instance as graph JSON.
    Generate(GenerateArgs),
    /// Run one solver on a graph JSON file and write a solution JSON.
    Solve(SolveArgs),
    /// Check a solution against the graph it was computed on.
    Verify(VerifyArgs),
    /// Sweep a dataset preset and write experiment rows as CSV.
    Bench(BenchArgs),
    /// List the dataset presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Dataset preset to start from (1a, 1b, 1c, 2, 3).
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Number of workflow stages.
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub constraints: Option<usize>,
    /// `uniform`, `non-uniform`, or comma-separated stage fractions.
    #[arg(long)]
    pub distribution: Option<String>,
    /// Minimum edge density between consecutive stages.
    #[arg(long)]
    pub density: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Graph JSON file.
    pub input: PathBuf,
    #[arg(short, long)]
    pub algorithm: AlgorithmKind,
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    pub path_budget: usize,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    pub candidate_budget: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graph JSON file the solution was computed on.
    pub graph: PathBuf,
    /// Solution JSON file.
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub preset: String,
    /// Comma-separated algorithm names; all five when omitted.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Vec<AlgorithmKind>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    /// Keep points whose constraint count is in this range, e.g. `1-10`.
    #[arg(long)]
    pub constraints: Option<Range>,
    /// Keep points whose vertex count is in this range.
    #[arg(long)]
    pub vertices: Option<Range>,
    /// Keep points whose stage count is in this range.
    #[arg(long)]
    pub stages: Option<Range>,
    /// Skip brute force at points with more constraints than this.
    #[arg(long)]
    pub brute_force_max_constraints: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_PATH_BUDGET)]
    pub path_budget: usize,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_BUDGET)]
    pub candidate_budget: usize,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Leave runtime_ms empty so repeated runs give identical bytes.
    #[arg(long)]
    pub no_timing: bool,
    /// Directory for instance and solution JSON plus a manifest.
    #[arg(long)]
    pub artifacts: Option<PathBuf>,
}

/// Inclusive integer range written `a` or `a-b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: usize,
    pub hi: usize,
}

impl Range {
    pub fn contains(&self, x: usize) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad range {s:?}: {e}"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => (parse(s)?, parse(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range { lo, hi })
    }
}

fn parse_distribution(s: &str) -> Result<Distribution> {
    Ok(match s {
        "uniform" | "U" => Distribution::Uniform,
        "non-uniform" | "NU" => Distribution::NonUniform,
        list => Distribution::Custom(
            list.split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("bad distribution {list:?}"))?,
        ),
    })
}

fn timeout(cli: &Cli) -> Option<Duration> {
    (cli.timeout_ms > 0).then(|| Duration::from_millis(cli.timeout_ms))
}

/// Prints a human summary unless `--quiet`: to stderr when the payload
/// went to stdout, otherwise to stdout.
fn report(cli: &Cli, text: &str) {
    if cli.quiet {
        return;
    }
    if cli.output.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
}

fn generate_point(args: &GenerateArgs) -> Result<PresetPoint> {
    let mut point = match &args.preset {
        Some(name) => {
            let p = preset(name)?;
            let mut point = p.points[0].clone();
            if name == "2" {
                if let (Some(k), None) = (args.stages, args.vertices) {
                    point.n_vertices = dataset2_vertices(k);
                }
            }
            point
        }
        None => PresetPoint {
            n_vertices: args.vertices.context("--vertices is required without --preset")?,
            n_constraints: args.constraints.context("--constraints is required without --preset")?,
            path_length: 5,
            distribution: Distribution::Uniform,
            min_density: 0.0,
        },
    };
    if let Some(v) = args.vertices {
        point.n_vertices = v;
    }
    if let Some(k) = args.stages {
        point.path_length = k;
    }
    if let Some(n) = args.constraints {
        point.n_constraints = n;
    }
    if let Some(d) = &args.distribution {
        point.distribution = parse_distribution(d)?;
    }
    if let Some(d) = args.density {
        point.min_density = d;
    }
    Ok(point)
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs) -> Result<u8> {
    let point = generate_point(args)?;
    let (graph, constraints) = generate::<f64>(&point.config(cli.seed))?;
    let doc = GraphDocument::from_workflow(&graph, &constraints);
    files::emit(cli.output.as_deref(), &doc.to_json())?;
    let paths: u64 = constraints
        .pairs()
        .iter()
        .map(|&(s, t)| graph.count_paths(s, t).unwrap_or(u64::MAX))
        .fold(0, u64::saturating_add);
    report(
        cli,
        &format!(
            "|V| = {}  |E| = {}  |N| = {}  paths = {}",
            graph.vertex_count(),
            graph.edge_count(),
            constraints.len(),
            paths
        ),
    );
    Ok(EXIT_OK)
}

fn cmd_solve(cli: &Cli, args: &SolveArgs) -> Result<u8> {
    let loaded = files::read_graph(&args.input)?;
    let opts = SolveOptions {
        seed: cli.seed,
        path_budget: args.path_budget,
        candidate_budget: args.candidate_budget,
        timeout: timeout(cli),
    };
    let before = loaded.graph.utility()?;
    let sol = algorithms::solve(args.algorithm, &loaded.graph, &loaded.constraints, &opts)?;
    if !sol.graph.is_feasible(&loaded.constraints)? {
        bail!(Guard(format!("{} returned an infeasible graph", args.algorithm)));
    }
    let doc = SolutionDocument::new(&sol, before, loaded.digest);
    files::emit(cli.output.as_deref(), &doc.to_json())?;
    let pct = if before > 0.0 { 100.0 * sol.utility / before } else { 100.0 };
    report(
        cli,
        &format!(
            "{}: utility {} -> {} ({:.2}%), removed {} edges (+{} cascaded), {:.3} ms",
            args.algorithm,
            before,
            sol.utility,
            pct,
            sol.removed.len(),
            sol.cascaded.len(),
            sol.runtime_ms()
        ),
    );
    Ok(EXIT_OK)
}

/// Relative comparison used by `verify`.
pub fn utilities_match(reported: f64, recomputed: f64) -> bool {
    (reported - recomputed).abs() <= 1e-9 * reported.abs().max(recomputed.abs()).max(1.0)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<u8> {
    let loaded = files::read_graph(&args.graph)?;
    let doc = files::read_solution(&args.solution)?;
    if doc.input_digest != loaded.digest {
        bail!(
            "solution was computed on a different graph (digest {} vs {})",
            doc.input_digest,
            loaded.digest
        );
    }
    let removed = doc.removed_edges();
    if let Some(e) = removed.iter().find(|&&e| !loaded.graph.has_edge(e)) {
        bail!("removed edge {e} is not in the graph");
    }
    let remaining = loaded.graph.without_edges(removed.iter());
    for &(s, t) in loaded.constraints.pairs() {
        if remaining.reaches(s, t) {
            report(cli, &format!("infeasible: {s} still reaches {t}"));
            return Ok(EXIT_INFEASIBLE);
        }
    }
    let utility = remaining.utility()?;
    if !utilities_match(doc.utility, utility) {
        report(cli, &format!("utility mismatch: reported {}, recomputed {}", doc.utility, utility));
        return Ok(EXIT_MISMATCH);
    }
    report(cli, &format!("ok: feasible, utility {utility}"));
    Ok(EXIT_OK)
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<u8> {
    let p = preset(&args.preset)?;
    let points: Vec<PresetPoint> = p
        .points
        .into_iter()
        .filter(|pt| args.constraints.is_none_or(|r| r.contains(pt.n_constraints)))
        .filter(|pt| args.vertices.is_none_or(|r| r.contains(pt.n_vertices)))
        .filter(|pt| args.stages.is_none_or(|r| r.contains(pt.path_length)))
        .collect();
    if points.is_empty() {
        bail!("no points of preset {} match the filters", args.preset);
    }
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    let algorithms = if args.algorithms.is_empty() {
        AlgorithmKind::ALL.to_vec()
    } else {
        args.algorithms.clone()
    };
    let plan = bench::BenchPlan {
        dataset: args.preset.clone(),
        points,
        algorithms,
        trials: args.trials,
        base_seed: cli.seed,
        solve: SolveOptions {
            seed: cli.seed,
            path_budget: args.path_budget,
            candidate_budget: args.candidate_budget,
            timeout: timeout(cli),
        },
        brute_force_max_constraints: args.brute_force_max_constraints,
        timing: !args.no_timing,
        artifacts: args.artifacts.clone(),
        jobs: args.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let rows = match &cli.output {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            bench::run_bench(&plan, file)?
        }
        None => bench::run_bench(&plan, std::io::stdout().lock())?,
    };
    report(cli, bench::render_summary(&bench::summarize(&rows)).trim_end());
    Ok(EXIT_OK)
}

fn cmd_presets() -> Result<u8> {
    for name in PRESET_NAMES {
        let p = preset(name)?;
        println!("{:<3} {} ({} points)", p.name, p.description, p.points.len());
    }
    Ok(EXIT_OK)
}

/// Maps an error to its exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Guard>().is_some() {
            return EXIT_GUARD;
        }
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            if e.is_budget() || *e == SolveError::Timeout {
                return EXIT_BUDGET;
            }
        }
    }
    EXIT_USAGE
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
        Command::Presets => cmd_presets(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
