//! Single entry point for the pairwise-line location estimation pipelines.
//!
//! Subcommands: `rigidity-test`, `solve`, `solve-dist`, `camera-lines`,
//! `bench`. Results go to files or stdout as JSON/CSV, diagnostics to
//! stderr. Exit codes: 0 success, 1 input error, 2 solver failure.

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use lineloc::bench::{
    run_table, DegreeTarget, NoiseCell, SdrConfigEcho, Solver, TableSpec,
};
use lineloc::camera::{robust_rotations, build_line_graph, OutlierRule, RelativeRotationGraph};
use lineloc::distributed::solve_distributed;
use lineloc::graph::{LocationSet, MeasurementGraph};
use lineloc::operators::CostOperators;
use lineloc::rigidity::{extract_max_rigid_components, test_parallel_rigidity, RIGIDITY_EPS};
use lineloc::sdr::{adm_solve, SdrConfig};
use lineloc::Formation;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod config;

#[derive(Parser, Debug)]
#[command(
    name = "lineloc",
    about = "Location estimation from noisy unsigned pairwise lines",
    version
)]
struct Cli {
    /// TOML config file; explicit command-line flags win over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log level filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test generic parallel rigidity of a measurement graph.
    RigidityTest {
        /// Input graph JSON.
        #[arg(long)]
        input: PathBuf,
        /// Dimension to test in (defaults to the dataset dimension).
        #[arg(long)]
        dim: Option<usize>,
        /// Also report maximal rigid components when the graph is rigid.
        #[arg(long)]
        components: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the semidefinite relaxation on the full graph.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Output solution JSON.
        #[arg(long)]
        out: PathBuf,
        /// Augmented Lagrangian penalty.
        #[arg(long, default_value_t = SdrConfig::default().mu)]
        mu: f64,
        /// Relative KKT tolerance (primal, dual and gap).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = SdrConfig::default().max_iters)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Distributed solve: partition into rigid patches, solve, stitch.
    SolveDist {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Maximum patch size.
        #[arg(long, default_value_t = 70)]
        nmax: usize,
        /// Worker threads for per-patch solves (0 = rayon default).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, default_value_t = SdrConfig::default().mu)]
        mu: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = SdrConfig::default().max_iters)]
        max_iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate pairwise lines from relative rotations and correspondences.
    CameraLines {
        /// Input rotation-graph JSON.
        #[arg(long)]
        input: PathBuf,
        /// Output measurement-graph JSON.
        #[arg(long)]
        out: PathBuf,
        /// Maximum robust-rotation rounds.
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        /// Outlier rule: mean2sigma or topfrac:F.
        #[arg(long, default_value = "mean2sigma")]
        rule: String,
    },
    /// Synthetic experiment grid; writes CSV (and optional JSON) reports.
    Bench {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Gaussian noise levels, comma separated.
        #[arg(long, default_value = "0.05", value_delimiter = ',')]
        sigma: Vec<f64>,
        /// Outlier probabilities, comma separated.
        #[arg(long, default_value = "0", value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Solvers: any of sdr, sdr-dist, ls (comma separated).
        #[arg(long, default_value = "sdr,ls")]
        solvers: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON report path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Edge density theta; when set, overrides the degree targets.
        #[arg(long)]
        theta: Option<f64>,
        /// Target average degree (defaults to n/4).
        #[arg(long)]
        avg_degree: Option<f64>,
        /// Minimum degree (defaults to 3n/100).
        #[arg(long)]
        min_degree: Option<usize>,
        /// Regenerate the graph each trial instead of fixing it per table.
        #[arg(long)]
        fresh_graph: bool,
        #[arg(long, default_value_t = 70)]
        nmax: usize,
        /// Worker threads (0 = rayon default).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Relative KKT tolerance for the SDR solver.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = SdrConfig::default().max_iters)]
        max_iters: usize,
        /// Zero out wall-clock columns for byte-reproducible reports.
        #[arg(long)]
        no_timings: bool,
    },
}

fn main() -> ExitCode {
    let cmd = Cli::command();
    let matches = cmd.get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            e.print().ok();
            return ExitCode::from(1);
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .target(env_logger::Target::Stderr)
        .init();

    let cli = match cli.config.as_deref() {
        Some(path) => match config::apply_config(path, &matches) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => cli,
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Solver(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Solver(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<(MeasurementGraph, Option<LocationSet>), CliError> {
    let text = read_input(path)?;
    MeasurementGraph::from_json_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Solution JSON shared by `solve` and `solve-dist`.
#[derive(Serialize)]
struct SolutionWire {
    d: usize,
    n: usize,
    locations: Vec<Vec<f64>>,
    objective: Option<f64>,
    spectral_gap: f64,
    iters: usize,
    converged: bool,
    residuals: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    nrmse_vs_ground_truth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distributed: Option<DistWire>,
}

#[derive(Serialize)]
struct Residuals {
    primal: f64,
    dual: f64,
    gap: f64,
}

#[derive(Serialize)]
struct DistWire {
    covered_nodes: Vec<usize>,
    patches: Vec<Vec<usize>>,
    patch_spectral_gaps: Vec<f64>,
    dropped_nodes: Vec<usize>,
    dropped_patches: usize,
    stitch_objective: f64,
    stitch_sweeps: usize,
    stage_seconds: [f64; 6],
}

fn nrmse_against(
    est: &LocationSet,
    truth: Option<&LocationSet>,
    covered: Option<&[usize]>,
) -> Option<f64> {
    let truth = truth?;
    let reference = match covered {
        None => truth.clone(),
        Some(nodes) => LocationSet::new(
            truth.dim(),
            nodes.iter().map(|&k| truth.point(k).clone()).collect(),
        )
        .ok()?,
    };
    lineloc::bench::align_and_nrmse(est, &reference).ok()
}

fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>, CliError> {
    if workers == 0 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| CliError::Input(format!("cannot build worker pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::RigidityTest { input, dim, components, seed } => {
            let (graph, _) = load_graph(&input)?;
            let d = dim.unwrap_or_else(|| graph.dim());
            let mut report =
                test_parallel_rigidity(graph.node_count(), &graph.edge_pairs(), d, seed, RIGIDITY_EPS)
                    .map_err(|e| CliError::Input(e.to_string()))?;
            if components && report.components.is_none() {
                report.components = Some(
                    extract_max_rigid_components(graph.node_count(), &graph.edge_pairs(), d, seed)
                        .map_err(|e| CliError::Solver(e.to_string()))?,
                );
            }
            println!("{}", serde_json::to_string_pretty(&report).expect("report json"));
            Ok(())
        }
        Command::Solve { input, out, mu, tol, max_iters, seed } => {
            let (graph, truth) = load_graph(&input)?;
            warn_if_flexible(&graph, seed);
            let cfg = SdrConfig { mu, max_iters, ..SdrConfig::with_tol(tol) };
            let ops = CostOperators::build(&Formation::from_graph(graph));
            let sol = adm_solve(&ops, &cfg, seed).map_err(|e| CliError::Solver(e.to_string()))?;
            if !sol.converged {
                log::warn!("solver did not reach tolerance; residuals {:?}", sol.residuals);
            }
            let wire = SolutionWire {
                d: sol.rounded.dim(),
                n: sol.rounded.len(),
                locations: sol.rounded.to_rows(),
                objective: Some(sol.objective),
                spectral_gap: sol.spectral_gap,
                iters: sol.iters,
                converged: sol.converged,
                residuals: Residuals {
                    primal: sol.residuals[0],
                    dual: sol.residuals[1],
                    gap: sol.residuals[2],
                },
                nrmse_vs_ground_truth: nrmse_against(&sol.rounded, truth.as_ref(), None),
                distributed: None,
            };
            write_output(&out, &serde_json::to_string_pretty(&wire).expect("solution json"))
        }
        Command::SolveDist { input, out, nmax, workers, mu, tol, max_iters, seed } => {
            let (graph, truth) = load_graph(&input)?;
            let cfg = SdrConfig { mu, max_iters, ..SdrConfig::with_tol(tol) };
            let pool = build_pool(workers)?;
            let solve = || solve_distributed(&graph, &cfg, nmax, seed);
            let sol = match &pool {
                Some(p) => p.install(solve),
                None => solve(),
            }
            .map_err(|e| CliError::Solver(e.to_string()))?;
            let wire = SolutionWire {
                d: sol.locations.dim(),
                n: sol.locations.len(),
                locations: sol.locations.to_rows(),
                objective: None,
                spectral_gap: sol.mean_spectral_gap(),
                iters: sol.patch_iters.iter().sum(),
                converged: true,
                residuals: Residuals { primal: 0.0, dual: 0.0, gap: sol.stitch_objective },
                nrmse_vs_ground_truth: nrmse_against(
                    &sol.locations,
                    truth.as_ref(),
                    Some(&sol.covered_nodes),
                ),
                distributed: Some(DistWire {
                    covered_nodes: sol.covered_nodes.clone(),
                    patches: sol.patches.clone(),
                    patch_spectral_gaps: sol.patch_spectral_gaps.clone(),
                    dropped_nodes: sol.dropped_nodes.clone(),
                    dropped_patches: sol.dropped_patches,
                    stitch_objective: sol.stitch_objective,
                    stitch_sweeps: sol.stitch_sweeps,
                    stage_seconds: sol.stage_seconds,
                }),
            };
            write_output(&out, &serde_json::to_string_pretty(&wire).expect("solution json"))
        }
        Command::CameraLines { input, out, rounds, rule } => {
            let text = read_input(&input)?;
            let rot_graph = RelativeRotationGraph::from_json_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
            let rule: OutlierRule = rule.parse().map_err(CliError::Input)?;
            let robust = robust_rotations(&rot_graph, rounds, rule)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            let (graph, report) = build_line_graph(&robust.graph, &robust.rotations, &robust.nodes)
                .map_err(|e| CliError::Solver(e.to_string()))?;
            log::info!(
                "camera-lines: {} edges kept, {} dropped, {} zero samples, {} PCA fallbacks",
                graph.edge_count(),
                report.dropped_edges.len(),
                report.zero_samples,
                report.pca_fallbacks
            );
            write_output(&out, &graph.to_json_string(None))
        }
        Command::Bench {
            n,
            dim,
            sigma,
            p,
            trials,
            solvers,
            seed,
            out,
            json,
            theta,
            avg_degree,
            min_degree,
            fresh_graph,
            nmax,
            workers,
            tol,
            max_iters,
            no_timings,
        } => {
            let solvers = Solver::parse_list(&solvers).map_err(|e| CliError::Input(e.to_string()))?;
            let target = match theta {
                Some(t) => DegreeTarget::Theta(t),
                None => DegreeTarget::AvgMin {
                    avg: avg_degree.unwrap_or(n as f64 / 4.0),
                    min: min_degree.unwrap_or(3 * n / 100),
                },
            };
            let mut cells = Vec::new();
            for &s in &sigma {
                for &pp in &p {
                    cells.push(NoiseCell { sigma: s, p: pp });
                }
            }
            let spec = TableSpec {
                n,
                d: dim,
                target,
                cells,
                trials,
                solvers,
                seed,
                fixed_graph: !fresh_graph,
                n_max: nmax,
                sdr: SdrConfigEcho { tol, max_iters, ..Default::default() },
            };
            let pool = build_pool(workers)?;
            let run_it = || run_table(&spec);
            let mut report = match &pool {
                Some(pl) => pl.install(run_it),
                None => run_it(),
            }
            .map_err(|e| CliError::Solver(e.to_string()))?;
            if no_timings {
                report.strip_timings();
            }
            write_output(&out, &report.to_csv())?;
            if let Some(jpath) = json {
                write_output(&jpath, &report.to_json())?;
            }
            for cell in &report.cells {
                eprintln!(
                    "cell sigma={} p={} solver={}: mean nrmse {}{}",
                    cell.sigma,
                    cell.p,
                    cell.solver,
                    cell.mean_nrmse.map_or("NA".into(), |v| format!("{v:.4}")),
                    if cell.partial { " (partial)" } else { "" }
                );
            }
            Ok(())
        }
    }
}

fn warn_if_flexible(graph: &MeasurementGraph, seed: u64) {
    match lineloc::rigidity::is_parallel_rigid(
        graph.node_count(),
        &graph.edge_pairs(),
        graph.dim(),
        seed,
    ) {
        Ok(true) => {}
        Ok(false) => log::warn!(
            "graph is not parallel rigid; the solution is not unique up to congruence"
        ),
        Err(e) => log::warn!("rigidity pre-check failed: {e}"),
    }
}
