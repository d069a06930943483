//! Semidefinite relaxation of location estimation from pairwise lines, and
//! its specialized alternating-direction augmented Lagrangian solver.
//!
//! The non-convex program (minimize the projected quadratic cost subject to
//! per-edge repulsion `|t_i - t_j|^2 >= 1` and centering) is lifted to the
//! Gram matrix `T = t t^T`:
//!
//! ```text
//! minimize    Tr(L T)
//! subject to  Tr(C^l T) >= 1 for every edge l,
//!             Tr(H T) = 0,
//!             T >= 0 (PSD)
//! ```
//!
//! The solver alternates closed-form updates of the dual vector `z`, the
//! dual slack pair `(R, eta)` and the primal pair `(T, nu)`; the matrix
//! updates are the positive/negative spectral parts of a single symmetric
//! matrix per iteration, and the `z` update needs one application of
//! `(B B^* + I)^{-1}`, which has an explicit low-rank-plus-identity form.
//! The relaxation is typically tight: at low noise the solution is rank one
//! and equal to the non-convex optimum, which the spectral gap of `T^*`
//! diagnoses.

use crate::graph::{connected_components, Formation, GraphError, LocationSet};
use crate::linalg;
use crate::operators::CostOperators;
use crate::rng::derive_rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Problem size `dn` above which the per-iteration eigendecomposition is
/// always iterative (negative eigenpairs only).
const DENSE_EIG_LIMIT: usize = 900;
/// Problem size from which the solver switches to the iterative split once
/// the negative eigenspace has collapsed to low rank. A dense
/// decomposition is redone periodically as a resync guard.
const ITERATIVE_SWITCH_DIM: usize = 120;
const ITERATIVE_MAX_RANK: usize = 32;
const DENSE_RESYNC_PERIOD: usize = 50;

#[derive(Debug, Error)]
pub enum SdrError {
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("solver diverged: non-finite iterate at iteration {0}")]
    NonFinite(usize),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("least squares requires a connected graph")]
    Disconnected,
    #[error("stability bound undefined: formation is flexible (lambda_{{d+2}} = {0:.3e})")]
    BoundUndefined(f64),
    #[error("empty problem: graph has no edges")]
    NoEdges,
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SdrConfig {
    /// Augmented Lagrangian penalty.
    pub mu: f64,
    pub max_iters: usize,
    /// Relative primal infeasibility tolerance.
    pub tol_primal: f64,
    /// Relative dual infeasibility tolerance.
    pub tol_dual: f64,
    /// Relative duality gap tolerance.
    pub tol_gap: f64,
    /// Residual-balancing adaptation of `mu`.
    pub mu_adapt: bool,
    /// A solution counts as rank one when the spectral gap is at least
    /// `1 - rounding_rank_tol`.
    pub rounding_rank_tol: f64,
}

impl Default for SdrConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            max_iters: 20_000,
            tol_primal: 1e-6,
            tol_dual: 1e-6,
            tol_gap: 1e-6,
            mu_adapt: true,
            rounding_rank_tol: 1e-6,
        }
    }
}

impl SdrConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol_primal: tol, tol_dual: tol, tol_gap: tol, ..Self::default() }
    }
}

/// Iterates of the alternating-direction method.
#[derive(Debug, Clone)]
pub struct AdmState {
    /// Primal PSD block.
    pub t: DMatrix<f64>,
    /// Primal slack, elementwise nonnegative.
    pub nu: DVector<f64>,
    /// Dual slack PSD block.
    pub r: DMatrix<f64>,
    /// Dual slack for the inequality rows, elementwise nonnegative.
    pub eta: DVector<f64>,
    /// Dual vector, one entry per edge.
    pub z: DVector<f64>,
    pub iter: usize,
    /// `(primal, dual, gap)` relative residuals per iteration.
    pub residual_history: Vec<[f64; 3]>,
}

/// Solution of the relaxation.
#[derive(Debug, Clone)]
pub struct GramSolution {
    pub t_star: DMatrix<f64>,
    /// `Tr(L T*)`.
    pub objective: f64,
    /// `(lambda_max - lambda_second) / lambda_max` of `T*`, clamped to [0, 1].
    pub spectral_gap: f64,
    /// Leading-eigenvector rounding of `T*`.
    pub rounded: LocationSet,
    pub iters: usize,
    pub converged: bool,
    /// Final `(primal, dual, gap)` residuals.
    pub residuals: [f64; 3],
    pub residual_history: Vec<[f64; 3]>,
    /// Largest `|Tr(H T^k)|` observed over the run.
    pub trace_h_max: f64,
    /// Penalty value at exit (equals the configured one unless adapted).
    pub mu_final: f64,
}

impl GramSolution {
    /// Whether the solution is rank one at the configured tolerance.
    pub fn is_rank_one(&self, cfg: &SdrConfig) -> bool {
        self.spectral_gap >= 1.0 - cfg.rounding_rank_tol
    }
}

/// Per-edge constraint traces: component `l` is `Tr(C^l T)` for the edge
/// `(i, j)`, i.e. `Tr(T_ii) + Tr(T_jj) - Tr(T_ij) - Tr(T_ji)`.
pub fn btilde_apply(ops: &CostOperators, t: &DMatrix<f64>) -> DVector<f64> {
    let d = ops.dim();
    let mut out = DVector::zeros(ops.edge_count());
    for (l, &(i, j)) in ops.edges().iter().enumerate() {
        let mut s = 0.0;
        for a in 0..d {
            s += t[(i * d + a, i * d + a)] + t[(j * d + a, j * d + a)]
                - t[(i * d + a, j * d + a)]
                - t[(j * d + a, i * d + a)];
        }
        out[l] = s;
    }
    out
}

/// Adjoint of [`btilde_apply`]: `sum_l z_l C^l`, a weighted graph Laplacian
/// expanded by `I_d` blocks.
pub fn btilde_adjoint(ops: &CostOperators, z: &DVector<f64>) -> DMatrix<f64> {
    let (d, n) = (ops.dim(), ops.node_count());
    let mut out = DMatrix::zeros(d * n, d * n);
    add_btilde_adjoint(ops, z, &mut out, 1.0);
    out
}

/// `out += scale * sum_l z_l C^l` without a temporary.
fn add_btilde_adjoint(ops: &CostOperators, z: &DVector<f64>, out: &mut DMatrix<f64>, scale: f64) {
    let d = ops.dim();
    for (l, &(i, j)) in ops.edges().iter().enumerate() {
        let w = scale * z[l];
        for a in 0..d {
            out[(i * d + a, i * d + a)] += w;
            out[(j * d + a, j * d + a)] += w;
            out[(i * d + a, j * d + a)] -= w;
            out[(j * d + a, i * d + a)] -= w;
        }
    }
}

/// Application of `(B B^T + I)^{-1}` on edge vectors.
///
/// `B B^T = d M^T M + 2 d I` for the unsigned vertex-edge incidence matrix
/// `M`, so its spectrum splits into at most `n` eigenpairs carried by the
/// image of `M^T` plus the constant `2d` on the orthogonal complement. The
/// inverse is applied from the `n x n` eigendecomposition of `M M^T = D + A`
/// (the signless Laplacian), never forming an `m x m` matrix.
#[derive(Debug, Clone)]
pub struct EdgeGramInverse {
    edges: Vec<(usize, usize)>,
    /// Orthonormal basis of the image of `M^T`, one column per kept pair.
    basis: DMatrix<f64>,
    /// `1 / (d lambda + 2d + 1)` per kept pair.
    inv_vals: DVector<f64>,
    /// `1 / (2d + 1)` on the complement.
    inv_complement: f64,
}

impl EdgeGramInverse {
    pub fn new(n: usize, edges: &[(usize, usize)], d: usize) -> Self {
        let m = edges.len();
        // signless Laplacian D + A
        let mut q = DMatrix::zeros(n, n);
        for &(i, j) in edges {
            q[(i, i)] += 1.0;
            q[(j, j)] += 1.0;
            q[(i, j)] += 1.0;
            q[(j, i)] += 1.0;
        }
        let (vals, vecs) = linalg::sym_eigen(&q);
        let lmax = vals[n - 1].abs().max(1e-300);
        let kept: Vec<usize> = (0..n).filter(|&k| vals[k] > 1e-12 * lmax).collect();
        let mut basis = DMatrix::zeros(m, kept.len());
        let mut inv_vals = DVector::zeros(kept.len());
        for (c, &k) in kept.iter().enumerate() {
            let w = vecs.column(k);
            // M^T w, normalized: |M^T w|^2 = w^T (D + A) w = lambda
            let scale = 1.0 / vals[k].sqrt();
            for (l, &(i, j)) in edges.iter().enumerate() {
                basis[(l, c)] = (w[i] + w[j]) * scale;
            }
            inv_vals[c] = 1.0 / (d as f64 * vals[k] + 2.0 * d as f64 + 1.0);
        }
        Self {
            edges: edges.to_vec(),
            basis,
            inv_vals,
            inv_complement: 1.0 / (2.0 * d as f64 + 1.0),
        }
    }

    pub fn apply(&self, z: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.basis.transpose() * z;
        let projected = &self.basis * &coeffs;
        let mut out = (z - &projected) * self.inv_complement;
        let scaled = coeffs.component_mul(&self.inv_vals);
        out += &self.basis * scaled;
        out
    }

    /// Forward operator `B B^T + I`, for verification.
    pub fn forward(&self, d: usize, z: &DVector<f64>) -> DVector<f64> {
        let mut out = z * (2.0 * d as f64 + 1.0);
        // d * M^T M z with unsigned incidence
        let n = self
            .edges
            .iter()
            .map(|&(i, j)| i.max(j) + 1)
            .max()
            .unwrap_or(0);
        let mut node_acc = DVector::<f64>::zeros(n);
        for (l, &(i, j)) in self.edges.iter().enumerate() {
            node_acc[i] += z[l];
            node_acc[j] += z[l];
        }
        // (M^T M z)_l for l = (i, j) sums z over all edges sharing i or j,
        // counting l itself twice.
        for (l, &(i, j)) in self.edges.iter().enumerate() {
            out[l] += d as f64 * (node_acc[i] + node_acc[j]);
        }
        out
    }
}

/// Convenience wrapper around [`EdgeGramInverse`] for one-off use.
pub fn solve_inverse_operator(
    z: &DVector<f64>,
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
) -> DVector<f64> {
    EdgeGramInverse::new(n, edges, d).apply(z)
}

fn spectral_gap_of(vals: &DVector<f64>) -> f64 {
    let dn = vals.len();
    let top = vals[dn - 1];
    if top <= 0.0 {
        return 0.0;
    }
    let second = if dn >= 2 { vals[dn - 2] } else { 0.0 };
    ((top - second) / top).clamp(0.0, 1.0)
}

/// Deterministic leading-eigenvector rounding of a PSD Gram matrix: the unit
/// leading eigenvector, reshaped into `n` blocks of size `d`, sign fixed so
/// its first nonzero coordinate is positive. A (near-)multiple top
/// eigenvalue logs a warning; the eigensolver's basis choice is kept.
pub fn round_solution(t_star: &DMatrix<f64>, d: usize) -> Result<LocationSet, SdrError> {
    let (vals, vecs) = linalg::sym_eigen(t_star);
    let dn = vals.len();
    let top = vals[dn - 1];
    if dn >= 2 && top > 0.0 && (top - vals[dn - 2]).abs() <= 1e-10 * top.abs() {
        log::warn!(
            "rounding: top eigenvalue is (nearly) multiple ({:.6e} vs {:.6e}); \
             tie broken by the eigensolver basis and sign convention",
            top,
            vals[dn - 2]
        );
    }
    let mut lead = vecs.column(dn - 1).into_owned();
    if let Some(k) = lead.iter().position(|&x| x.abs() > 1e-12) {
        if lead[k] < 0.0 {
            lead.neg_mut();
        }
    }
    Ok(LocationSet::from_stacked(d, &lead)?)
}

/// Solves the relaxation by the alternating-direction method.
///
/// The caller is responsible for the graph being parallel rigid; on flexible
/// graphs the relaxation is still solved but the minimizer is not unique and
/// the rounding is meaningless. `seed` only affects the starting point.
pub fn adm_solve(ops: &CostOperators, cfg: &SdrConfig, seed: u64) -> Result<GramSolution, SdrError> {
    let d = ops.dim();
    let n = ops.node_count();
    let m = ops.edge_count();
    if m == 0 {
        return Err(SdrError::NoEdges);
    }
    let dn = d * n;
    let l = ops.laplacian_dense();
    let l_frob = ops.laplacian_frob_norm();
    let inverse = EdgeGramInverse::new(n, ops.edges(), d);
    let btilde_l = btilde_apply(ops, &l);
    let ones = DVector::from_element(m, 1.0);
    let sqrt_m = (m as f64).sqrt();

    // Feasible-leaning start: centered random rank-1 Gram matrix scaled so
    // the mean constraint trace is 1.
    let mut rng = derive_rng(seed, "adm-init", 0);
    let mut t0 = DVector::from_fn(dn, |_, _| rng.sample::<f64, _>(StandardNormal));
    for a in 0..d {
        let mean: f64 = (0..n).map(|i| t0[i * d + a]).sum::<f64>() / n as f64;
        for i in 0..n {
            t0[i * d + a] -= mean;
        }
    }
    let mut t = &t0 * t0.transpose();
    let mean_trace = btilde_apply(ops, &t).mean();
    if mean_trace > 1e-300 {
        t /= mean_trace;
    }
    let mut nu = btilde_apply(ops, &t).map(|x| (x - 1.0).max(0.0));
    let mut r = DMatrix::<f64>::zeros(dn, dn);
    let mut eta = DVector::<f64>::zeros(m);
    let mut z = DVector::<f64>::zeros(m);

    let unit = 1.0 / (n as f64).sqrt();
    let translation_units: Vec<DVector<f64>> = ops
        .translation_directions()
        .into_iter()
        .map(|u| u * unit)
        .collect();

    let mut mu = cfg.mu;
    let mut history: Vec<[f64; 3]> = Vec::new();
    let mut trace_h_max: f64 = ops.trace_h(&t).abs();
    let mut converged = false;
    let mut residuals = [f64::INFINITY; 3];
    let mut iters = 0;
    // number of negative eigenpairs seen in the previous split
    let mut neg_rank = 8usize;
    let mut eig_rng = derive_rng(seed, "adm-eig", 0);

    for k in 0..cfg.max_iters {
        iters = k + 1;

        // z update
        let bt = btilde_apply(ops, &t);
        let br = btilde_apply(ops, &r);
        let rhs = (&bt - &nu - &ones) / mu + &br - &btilde_l - &eta;
        z = -inverse.apply(&rhs);

        // F = L - T/mu - B*(z)
        let mut f = l.clone();
        f.zip_apply(&t, |fi, ti| *fi -= ti / mu);
        add_btilde_adjoint(ops, &z, &mut f, -1.0);

        // spectral split: R = positive part, T_new = -mu * negative part.
        // Once the negative eigenspace collapses to low rank, a Lanczos
        // solve for just those pairs replaces the dense decomposition, with
        // a periodic dense resync as a guard against missed eigenvalues.
        let want_iterative = dn > DENSE_EIG_LIMIT
            || (dn >= ITERATIVE_SWITCH_DIM
                && neg_rank <= ITERATIVE_MAX_RANK
                && k >= 20
                && k % DENSE_RESYNC_PERIOD != 0);
        let (r_new, t_new, counted_rank) = if want_iterative {
            linalg::split_spectral_parts_iterative(&f, mu, neg_rank, &mut eig_rng)
                .unwrap_or_else(|| linalg::split_spectral_parts(&f, mu))
        } else {
            linalg::split_spectral_parts(&f, mu)
        };
        neg_rank = counted_rank.max(1);

        let mut t_new = t_new;
        // The translation directions stay in the null space of every
        // iterate in exact arithmetic; re-projecting strips the roundoff
        // that otherwise accumulates at large mu.
        project_out_translations(&mut t_new, &translation_units);

        let w = &z - &nu / mu;
        let eta_new = w.map(|x| x.max(0.0));
        let nu_new = w.map(|x| (-mu * x.min(0.0)).max(0.0));

        if !t_new.iter().all(|x| x.is_finite()) || !nu_new.iter().all(|x| x.is_finite()) {
            return Err(SdrError::NonFinite(k));
        }

        // residuals
        let primal = (btilde_apply(ops, &t_new) - &nu_new - &ones).norm() / (1.0 + sqrt_m);
        // B*(z) + R - L = (T_new - T_old)/mu, by construction of the split
        let dual = (&t_new - &t).norm() / (mu * (1.0 + l_frob));
        let pobj = ops.trace_laplacian_product(&t_new);
        let dobj = z.sum();
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        residuals = [primal, dual, gap];
        history.push(residuals);

        trace_h_max = trace_h_max.max(ops.trace_h(&t_new).abs());

        t = t_new;
        nu = nu_new;
        r = r_new;
        eta = eta_new;

        if primal <= cfg.tol_primal && dual <= cfg.tol_dual && gap <= cfg.tol_gap {
            converged = true;
            break;
        }

        // Stall-driven penalty escalation for the degenerate-dual regime:
        // on (near-)noiseless instances the primal becomes feasible almost
        // immediately while the duality gap crawls, and only a much larger
        // mu moves it. The primal-slack guard keeps the booster silent on
        // ordinary noisy instances, where it would wreck the iterate.
        const ADAPT_PERIOD: usize = 250;
        if cfg.mu_adapt && k % ADAPT_PERIOD == ADAPT_PERIOD - 1 && gap > cfg.tol_gap {
            let prev = history[history.len() - ADAPT_PERIOD];
            let prev_worst = prev[0].max(prev[2]);
            let stalled = primal.max(gap) > 0.85 * prev_worst;
            if stalled && primal <= 100.0 * cfg.tol_primal && primal <= 0.01 * gap {
                mu = (mu * 10.0).min(1e4);
            }
        }
    }

    let state = AdmState { t, nu, r, eta, z, iter: iters, residual_history: history };
    debug_assert!(state.eta.component_mul(&state.nu).amax() <= 1e-9);

    let (vals, _) = linalg::sym_eigen(&state.t);
    let spectral_gap = spectral_gap_of(&vals);
    let rounded = round_solution(&state.t, d)?;
    let objective = ops.trace_laplacian_product(&state.t);
    if !converged {
        log::warn!(
            "ADM hit max_iters = {} with residuals (primal {:.2e}, dual {:.2e}, gap {:.2e})",
            cfg.max_iters,
            residuals[0],
            residuals[1],
            residuals[2]
        );
    }
    Ok(GramSolution {
        t_star: state.t,
        objective,
        spectral_gap,
        rounded,
        iters,
        converged,
        residuals,
        residual_history: state.residual_history,
        trace_h_max,
        mu_final: mu,
    })
}

/// Projects `P T P` with `P = I - sum_a u_a u_a^T` for orthonormal columns
/// `u_a`, in place.
fn project_out_translations(t: &mut DMatrix<f64>, units: &[DVector<f64>]) {
    for u in units {
        // T <- (I - u u^T) T (I - u u^T)
        //    = T - u (T u)^T - (T u) u^T + (u^T T u) u u^T
        let tu = &*t * u;
        let utu = u.dot(&tu);
        t.ger(utu, u, u, 1.0);
        t.ger(-1.0, &tu, u, 1.0);
        t.ger(-1.0, u, &tu, 1.0);
    }
}

/// Least-squares baseline: minimizes `t^T L t` over unit-norm, centered
/// stacked vectors, i.e. the smallest eigenvector of `L` orthogonal to the
/// `d` translation directions.
pub fn least_squares_solve(ops: &CostOperators) -> Result<LocationSet, SdrError> {
    if connected_components(ops.node_count(), ops.edges()).len() > 1 {
        return Err(SdrError::Disconnected);
    }
    let n = ops.node_count();
    let mut work = ops.laplacian_dense();
    // Deflate the exact translation null space far above the spectrum.
    let gershgorin = (0..work.nrows())
        .map(|i| work.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let shift = 2.0 * gershgorin + 1.0;
    let unit = 1.0 / (n as f64).sqrt();
    for u in ops.translation_directions() {
        let u = u * unit;
        work.syger(shift, &u, &u, 1.0);
    }
    work.fill_upper_triangle_with_lower_triangle();
    let (_, vecs) = linalg::sym_eigen(&work);
    let lead = vecs.column(0).into_owned();
    Ok(LocationSet::from_stacked(ops.dim(), &lead)?)
}

/// Data-dependent constants of the stability bound.
fn stability_constants(
    truth: &LocationSet,
    edges: &[(usize, usize)],
) -> Result<(f64, f64), SdrError> {
    let d = truth.dim() as f64;
    let n = truth.len();
    let m = edges.len() as f64;
    // The bound is stated for centered locations with unit stacked norm;
    // kappa depends on that normalization, the Laplacian spectra do not.
    let centered = truth.centered();
    let scale = centered.stacked().norm();
    let normalized = LocationSet::new(
        truth.dim(),
        centered.points().iter().map(|p| p / scale).collect(),
    )?;
    let formation = Formation::from_locations(&normalized, edges)?;
    let ops = CostOperators::build(&formation);
    let (vals, _) = linalg::sym_eigen(&ops.laplacian_dense());
    let dn = vals.len();
    let lambda_d2 = vals[truth.dim() + 1];
    if lambda_d2 <= 1e-9 * vals[dn - 1].abs().max(1e-300) {
        return Err(SdrError::BoundUndefined(lambda_d2));
    }
    // graph Laplacian of the measurement graph
    let mut lg = DMatrix::zeros(n, n);
    for &(i, j) in edges {
        lg[(i, i)] += 1.0;
        lg[(j, j)] += 1.0;
        lg[(i, j)] -= 1.0;
        lg[(j, i)] -= 1.0;
    }
    let (lg_vals, _) = linalg::sym_eigen(&lg);
    let lg_max = lg_vals[n - 1];
    let lg_frob = lg.norm();
    let min_edge = edges
        .iter()
        .map(|&(i, j)| (normalized.point(i) - normalized.point(j)).norm_squared())
        .fold(f64::INFINITY, f64::min);
    let kappa = 1.0 / min_edge;
    let alpha1 = 2f64.sqrt() * m / lambda_d2;
    let alpha2 = (kappa * d.sqrt() * lg_frob / m + 1.0) * lg_max / lambda_d2;
    Ok((alpha1, alpha2))
}

/// Worst-case bound on the Gram-matrix error `delta(T*, T_0)` under
/// line-direction perturbations of magnitude at most `epsilon`.
pub fn stability_bound(
    truth: &LocationSet,
    edges: &[(usize, usize)],
    epsilon: f64,
) -> Result<f64, SdrError> {
    let (alpha1, alpha2) = stability_constants(truth, edges)?;
    Ok(epsilon * (alpha1 + (alpha1 * alpha1 + 2.0 * alpha2).sqrt()))
}

/// Bound on the rounded-location error `min_a |a t_hat - t0|` implied by
/// [`stability_bound`].
pub fn rounded_stability_bound(
    truth: &LocationSet,
    edges: &[(usize, usize)],
    epsilon: f64,
) -> Result<f64, SdrError> {
    let d = truth.dim() as f64;
    let n = truth.len() as f64;
    let base = stability_bound(truth, edges, epsilon)?;
    Ok(base * std::f64::consts::PI * d * (n - 1.0) / 2.0)
}

/// Gram-matrix error `delta(T*, T_0) = min_{c >= 0} |c T* - T_0|_F` against
/// the centered, unit-scaled ground truth.
pub fn relaxation_error(t_star: &DMatrix<f64>, truth: &LocationSet) -> f64 {
    let centered = truth.centered().stacked();
    let t0_vec = &centered / centered.norm();
    let t0 = &t0_vec * t0_vec.transpose();
    let c = (t_star.dot(&t0) / t_star.norm_squared()).max(0.0);
    (t_star * c - t0).norm()
}

/// Rounded-location error `min_a |a t_hat - t0|` for the unit leading
/// eigenvector `t_hat` against the centered, unit-scaled ground truth.
pub fn rounded_error(rounded: &LocationSet, truth: &LocationSet) -> f64 {
    let that = rounded.stacked();
    let that = &that / that.norm();
    let centered = truth.centered().stacked();
    let t0 = &centered / centered.norm();
    let a = t0.dot(&that);
    (that * a - t0).norm()
}
