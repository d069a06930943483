//! Synthetic data generation, alignment metrics and the experiment harness.
//!
//! The noise model perturbs each true direction with an isotropic Gaussian
//! of scale `sigma` and replaces it outright with a uniform sphere sample
//! with probability `p`; results are renormalized. Estimation quality is the
//! normalized root mean squared error after removing the global translation,
//! scale and negation.

use crate::distributed::{solve_distributed, DistributedError};
use crate::graph::{GraphError, LocationSet, MeasurementGraph};
use crate::operators::CostOperators;
use crate::rigidity;
use crate::rng::{derive_rng, derive_seed};
use crate::sdr::{adm_solve, least_squares_solve, SdrConfig, SdrError};
use crate::Formation;
use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("could not generate a parallel rigid graph in {0} attempts")]
    RetryCapExceeded(usize),
    #[error("degenerate ground truth: all points coincide")]
    DegenerateTruth,
    #[error("location sets have mismatched shape: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("solver error: {0}")]
    Sdr(#[from] SdrError),
    #[error("distributed solver error: {0}")]
    Distributed(#[from] DistributedError),
    #[error("rigidity error: {0}")]
    Rigidity(#[from] rigidity::RigidityError),
    #[error("unknown solver name: {0}")]
    UnknownSolver(String),
}

/// Parameters of the measurement noise model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Gaussian perturbation scale, >= 0.
    pub sigma: f64,
    /// Outlier probability in [0, 1].
    pub p: f64,
    pub seed: u64,
}

/// Graph density target for the generator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum DegreeTarget {
    /// Edge density `theta = 2m / (n (n-1))`; `theta = 1` is complete.
    Theta(f64),
    /// Target average degree with a minimum-degree floor.
    AvgMin { avg: f64, min: usize },
}

const GEN_RETRY_CAP: usize = 64;

/// Random connected, generically parallel rigid (in `R^d`) edge list with
/// the requested degree statistics. Samples are rejected until the rigidity
/// test passes.
pub fn gen_graph(
    n: usize,
    target: DegreeTarget,
    d: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, BenchError> {
    for attempt in 0..GEN_RETRY_CAP {
        let mut rng = derive_rng(seed, "gen-graph", attempt as u64);
        // Per-node expected degrees. A bare uniform edge probability cannot
        // realize a minimum degree far below the average, so the
        // average/minimum target uses a geometric ramp of expected degrees
        // (independent edges with probability w_i w_j / sum w), which makes
        // the low-degree nodes that the least-squares baseline is known to
        // be sensitive to actually exist.
        // `None` weights mean a uniform edge probability.
        let (weights, min_deg): (Option<Vec<f64>>, usize) = match target {
            DegreeTarget::Theta(_) => (None, 0),
            DegreeTarget::AvgMin { avg, min } => {
                // Two-class mix: ~30% of the nodes sit right at the minimum
                // degree, the rest carry the remaining mass. The spread of
                // realized degrees matters: a near-regular graph of the same
                // average behaves very differently under the least-squares
                // baseline.
                let lo = (min.max(1) as f64 + 0.5).min(avg);
                let n_low = (0.3 * n as f64).round() as usize;
                let hi = if n > n_low {
                    ((avg * n as f64 - lo * n_low as f64) / (n - n_low) as f64)
                        .clamp(lo, n as f64 - 1.0)
                } else {
                    lo
                };
                let w = (0..n)
                    .map(|k| if k < n_low { lo } else { hi })
                    .collect();
                (Some(w), min)
            }
        };
        let uniform_p = match target {
            DegreeTarget::Theta(theta) => theta.clamp(0.0, 1.0),
            DegreeTarget::AvgMin { .. } => 0.0,
        };
        let total: f64 = weights.as_ref().map_or(1.0, |w| w.iter().sum());
        let mut present = vec![false; n * n];
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p_edge = match &weights {
                    None => uniform_p,
                    Some(w) => (w[i] * w[j] / total).min(1.0),
                };
                if rng.random::<f64>() < p_edge {
                    edges.push((i, j));
                    present[i * n + j] = true;
                }
            }
        }
        // greedy repair of the minimum degree
        let mut deg = vec![0usize; n];
        for &(i, j) in &edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        for v in 0..n {
            while deg[v] < min_deg {
                let candidates: Vec<usize> = (0..n)
                    .filter(|&u| {
                        u != v && !present[u.min(v) * n + u.max(v)]
                    })
                    .collect();
                if candidates.is_empty() {
                    break;
                }
                let u = candidates[rng.random_range(0..candidates.len())];
                let (a, b) = (u.min(v), u.max(v));
                present[a * n + b] = true;
                edges.push((a, b));
                deg[v] += 1;
                deg[u] += 1;
            }
        }
        edges.sort_unstable();
        let rig_seed = derive_seed(seed, "gen-graph-test", attempt as u64);
        if rigidity::is_parallel_rigid(n, &edges, d, rig_seed)? {
            return Ok(edges);
        }
    }
    Err(BenchError::RetryCapExceeded(GEN_RETRY_CAP))
}

/// Ground-truth locations drawn i.i.d. standard normal in `R^d`.
pub fn gen_locations(n: usize, d: usize, rng: &mut ChaCha8Rng) -> LocationSet {
    LocationSet::new(
        d,
        (0..n)
            .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect(),
    )
    .expect("valid dimension")
}

fn uniform_sphere(d: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nrm = v.norm();
        if nrm > 1e-9 {
            return v / nrm;
        }
    }
}

/// Noisy measurement graph over the true locations: per edge, with
/// probability `p` a uniform sphere direction, otherwise the true direction
/// plus `sigma` times a standard Gaussian vector, renormalized.
pub fn apply_noise(
    locs: &LocationSet,
    edges: &[(usize, usize)],
    spec: &NoiseSpec,
) -> Result<MeasurementGraph, BenchError> {
    let d = locs.dim();
    let mut rng = derive_rng(spec.seed, "noise", 0);
    let mut out = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        let gamma = if rng.random::<f64>() < spec.p {
            uniform_sphere(d, &mut rng)
        } else {
            let mut g = locs.point(i) - locs.point(j);
            let nrm = g.norm();
            if nrm < crate::graph::DEGENERATE_EDGE_TOL {
                return Err(BenchError::Graph(GraphError::DegenerateEdge { i, j, dist: nrm }));
            }
            g /= nrm;
            loop {
                let noise = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                let candidate = &g + noise * spec.sigma;
                let cn = candidate.norm();
                if cn > 1e-12 {
                    break candidate / cn;
                }
            }
        };
        out.push((i, j, gamma));
    }
    Ok(MeasurementGraph::new(d, locs.len(), out)?)
}

/// Normalized root mean squared error after removing the global
/// translation, scale and negation: both sets are centered, the optimal
/// signed scale `c` on the estimate is applied, and the residual is
/// normalized by the spread of the truth.
pub fn align_and_nrmse(est: &LocationSet, truth: &LocationSet) -> Result<f64, BenchError> {
    if est.len() != truth.len() || est.dim() != truth.dim() {
        return Err(BenchError::ShapeMismatch(est.len(), truth.len()));
    }
    let e = est.centered().stacked();
    let t = truth.centered().stacked();
    let t_norm = t.norm();
    if t_norm < 1e-15 {
        return Err(BenchError::DegenerateTruth);
    }
    let e_sq = e.norm_squared();
    let c = if e_sq > 0.0 { e.dot(&t) / e_sq } else { 0.0 };
    Ok((e * c - &t).norm() / t_norm)
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseCell {
    pub sigma: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    Sdr,
    SdrDist,
    Ls,
}

impl Solver {
    pub fn parse_list(s: &str) -> Result<Vec<Solver>, BenchError> {
        s.split(',')
            .map(|tok| match tok.trim() {
                "sdr" => Ok(Solver::Sdr),
                "sdr-dist" => Ok(Solver::SdrDist),
                "ls" => Ok(Solver::Ls),
                other => Err(BenchError::UnknownSolver(other.to_string())),
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Solver::Sdr => "sdr",
            Solver::SdrDist => "sdr-dist",
            Solver::Ls => "ls",
        }
    }
}

/// Experiment description: a grid of noise cells, each run for `trials`
/// independent realizations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSpec {
    pub n: usize,
    pub d: usize,
    pub target: DegreeTarget,
    pub cells: Vec<NoiseCell>,
    pub trials: usize,
    pub solvers: Vec<Solver>,
    pub seed: u64,
    /// Keep one graph for the whole table (fresh locations and noise per
    /// trial); otherwise regenerate the graph per trial.
    pub fixed_graph: bool,
    /// Patch size bound for the distributed solver.
    pub n_max: usize,
    pub sdr: SdrConfigEcho,
}

/// Serializable echo of the solver configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdrConfigEcho {
    pub mu: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for SdrConfigEcho {
    fn default() -> Self {
        let c = SdrConfig::default();
        Self { mu: c.mu, max_iters: c.max_iters, tol: c.tol_primal }
    }
}

impl SdrConfigEcho {
    pub fn to_config(&self) -> SdrConfig {
        SdrConfig {
            mu: self.mu,
            max_iters: self.max_iters,
            ..SdrConfig::with_tol(self.tol)
        }
    }
}

/// One solver invocation on one realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRow {
    pub solver: String,
    pub sigma: f64,
    pub p: f64,
    pub trial: usize,
    pub nrmse: Option<f64>,
    pub spectral_gap: Option<f64>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub solver: String,
    pub sigma: f64,
    pub p: f64,
    pub mean_nrmse: Option<f64>,
    pub mean_spectral_gap: Option<f64>,
    pub trials_ok: usize,
    /// Set when some trials failed; the mean covers the successful ones.
    pub partial: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: TableSpec,
    pub rows: Vec<TrialRow>,
    pub cells: Vec<CellSummary>,
}

impl ExperimentReport {
    /// CSV with columns `solver,sigma,p,trial,nrmse,spectral_gap,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("solver,sigma,p,trial,nrmse,spectral_gap,seconds\n");
        for r in &self.rows {
            let nrmse = r.nrmse.map_or(String::from("NA"), |v| format!("{v:.9e}"));
            let gap = r.spectral_gap.map_or(String::from("NA"), |v| format!("{v:.9e}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.6}\n",
                r.solver, r.sigma, r.p, r.trial, nrmse, gap, r.seconds
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Zeroes wall-clock fields, for byte-reproducible output.
    pub fn strip_timings(&mut self) {
        for r in &mut self.rows {
            r.seconds = 0.0;
        }
    }

    pub fn cell_mean(&self, solver: Solver, sigma: f64, p: f64) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.solver == solver.name() && c.sigma == sigma && c.p == p)
            .and_then(|c| c.mean_nrmse)
    }
}

struct TrialOutcome {
    nrmse: Option<f64>,
    gap: Option<f64>,
    seconds: f64,
    error: Option<String>,
}

fn run_solver(
    solver: Solver,
    graph: &MeasurementGraph,
    truth: &LocationSet,
    spec: &TableSpec,
    seed: u64,
) -> TrialOutcome {
    let start = std::time::Instant::now();
    let result: Result<(LocationSet, Option<f64>, Option<Vec<usize>>), BenchError> = (|| {
        match solver {
            Solver::Sdr => {
                let ops = CostOperators::build(&Formation::from_graph(graph.clone()));
                let sol = adm_solve(&ops, &spec.sdr.to_config(), seed)?;
                Ok((sol.rounded, Some(sol.spectral_gap), None))
            }
            Solver::Ls => {
                let ops = CostOperators::build(&Formation::from_graph(graph.clone()));
                Ok((least_squares_solve(&ops)?, None, None))
            }
            Solver::SdrDist => {
                let sol = solve_distributed(graph, &spec.sdr.to_config(), spec.n_max, seed)?;
                let gap = sol.mean_spectral_gap();
                Ok((sol.locations, Some(gap), Some(sol.covered_nodes)))
            }
        }
    })();
    match result {
        Ok((est, gap, covered)) => {
            let nrmse = match covered {
                None => align_and_nrmse(&est, truth),
                Some(nodes) => {
                    let subset = LocationSet::new(
                        truth.dim(),
                        nodes.iter().map(|&k| truth.point(k).clone()).collect(),
                    )
                    .expect("subset of truth");
                    align_and_nrmse(&est, &subset)
                }
            };
            match nrmse {
                Ok(v) => TrialOutcome {
                    nrmse: Some(v),
                    gap,
                    seconds: start.elapsed().as_secs_f64(),
                    error: None,
                },
                Err(e) => TrialOutcome {
                    nrmse: None,
                    gap,
                    seconds: start.elapsed().as_secs_f64(),
                    error: Some(e.to_string()),
                },
            }
        }
        Err(e) => TrialOutcome {
            nrmse: None,
            gap: None,
            seconds: start.elapsed().as_secs_f64(),
            error: Some(e.to_string()),
        },
    }
}

/// Runs the full experiment grid. Trials execute in the rayon pool; all
/// randomness is derived per `(cell, trial)` from the master seed, so the
/// report is independent of scheduling.
pub fn run_table(spec: &TableSpec) -> Result<ExperimentReport, BenchError> {
    let fixed_edges = if spec.fixed_graph {
        Some(gen_graph(spec.n, spec.target, spec.d, spec.seed)?)
    } else {
        None
    };

    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for cell in 0..spec.cells.len() {
        for trial in 0..spec.trials {
            jobs.push((cell, trial));
        }
    }

    let results: Result<Vec<Vec<TrialRow>>, BenchError> = jobs
        .par_iter()
        .map(|&(cell_idx, trial)| {
            let cell = spec.cells[cell_idx];
            let tag = (cell_idx * spec.trials + trial) as u64;
            let edges = match &fixed_edges {
                Some(e) => e.clone(),
                None => gen_graph(
                    spec.n,
                    spec.target,
                    spec.d,
                    derive_seed(spec.seed, "trial-graph", tag),
                )?,
            };
            let mut loc_rng = derive_rng(spec.seed, "trial-locs", tag);
            let truth = gen_locations(spec.n, spec.d, &mut loc_rng);
            let noise = NoiseSpec {
                sigma: cell.sigma,
                p: cell.p,
                seed: derive_seed(spec.seed, "trial-noise", tag),
            };
            let graph = apply_noise(&truth, &edges, &noise)?;
            let mut rows = Vec::new();
            for &solver in &spec.solvers {
                let out = run_solver(
                    solver,
                    &graph,
                    &truth,
                    spec,
                    derive_seed(spec.seed, "trial-solve", tag),
                );
                rows.push(TrialRow {
                    solver: solver.name().to_string(),
                    sigma: cell.sigma,
                    p: cell.p,
                    trial,
                    nrmse: out.nrmse,
                    spectral_gap: out.gap,
                    seconds: out.seconds,
                    error: out.error,
                });
            }
            Ok(rows)
        })
        .collect();
    let rows: Vec<TrialRow> = results?.into_iter().flatten().collect();

    let mut cells = Vec::new();
    for cell in &spec.cells {
        for &solver in &spec.solvers {
            let group: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.solver == solver.name() && r.sigma == cell.sigma && r.p == cell.p)
                .collect();
            let ok: Vec<&&TrialRow> = group.iter().filter(|r| r.nrmse.is_some()).collect();
            let mean = |f: fn(&TrialRow) -> Option<f64>| -> Option<f64> {
                let vals: Vec<f64> = ok.iter().filter_map(|r| f(r)).collect();
                if vals.is_empty() {
                    None
                } else {
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                }
            };
            cells.push(CellSummary {
                solver: solver.name().to_string(),
                sigma: cell.sigma,
                p: cell.p,
                mean_nrmse: mean(|r| r.nrmse),
                mean_spectral_gap: mean(|r| r.spectral_gap),
                trials_ok: ok.len(),
                partial: ok.len() != group.len(),
            });
        }
    }

    Ok(ExperimentReport { spec: spec.clone(), rows, cells })
}
