//! Shared fixtures and the slow independent reference solver used to check
//! the alternating-direction method.

use lineloc::graph::{Formation, LocationSet, MeasurementGraph};
use lineloc::operators::CostOperators;
use lineloc::rng::derive_rng;
use lineloc::sdr::btilde_apply;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_locations(n: usize, d: usize, seed: u64) -> LocationSet {
    let mut rng = derive_rng(seed, "acceptance-locs", 0);
    LocationSet::new(
        d,
        (0..n)
            .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect(),
    )
    .unwrap()
}

/// Random connected parallel-rigid edge set of moderate density.
pub fn rigid_edges(n: usize, d: usize, prob: f64, seed: u64) -> Vec<(usize, usize)> {
    for attempt in 0..64u64 {
        let mut rng = derive_rng(seed, "acceptance-edges", attempt);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < prob {
                    edges.push((i, j));
                }
            }
        }
        if lineloc::rigidity::is_parallel_rigid(n, &edges, d, seed ^ attempt).unwrap_or(false) {
            return edges;
        }
    }
    panic!("could not sample a rigid graph (n={n}, d={d}, prob={prob})");
}

/// Unit directions perturbed by a rotation of magnitude at most `epsilon`
/// in chord distance, so that `|gamma - gamma0| <= epsilon` and
/// `|gamma| = 1` hold exactly as in the stability noise model.
pub fn perturbed_graph(
    truth: &LocationSet,
    edges: &[(usize, usize)],
    epsilon: f64,
    seed: u64,
) -> MeasurementGraph {
    let d = truth.dim();
    let mut rng = derive_rng(seed, "acceptance-perturb", 0);
    let phi_max = 2.0 * (epsilon / 2.0).asin();
    let mut out = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        let g0 = (truth.point(i) - truth.point(j)).normalize();
        // random unit vector orthogonal to g0
        let mut u = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        u -= &g0 * g0.dot(&u);
        let un = u.norm();
        let gamma = if un < 1e-12 {
            g0.clone()
        } else {
            let phi = rng.random::<f64>() * phi_max;
            &g0 * phi.cos() + (u / un) * phi.sin()
        };
        debug_assert!((&gamma - &g0).norm() <= epsilon + 1e-12);
        out.push((i, j, gamma));
    }
    MeasurementGraph::new(d, truth.len(), out).unwrap()
}

/// Reference solution of the relaxation by an augmented-Lagrangian method
/// with projected-gradient inner solves. Slow but independent of the
/// alternating-direction path: primal-only, generic PSD projection, no
/// closed-form block updates.
pub fn reference_sdr_objective(ops: &CostOperators, t_init_scale: f64) -> (DMatrix<f64>, f64) {
    let d = ops.dim();
    let n = ops.node_count();
    let m = ops.edge_count();
    let dn = d * n;
    let l = ops.laplacian_dense();

    let project_psd = |t: &DMatrix<f64>| -> DMatrix<f64> {
        let (vals, vecs) = lineloc::linalg::sym_eigen(t);
        let mut out = DMatrix::zeros(dn, dn);
        for k in 0..dn {
            if vals[k] > 0.0 {
                let v = vecs.column(k);
                out.syger(vals[k], &v, &v, 1.0);
            }
        }
        out.fill_upper_triangle_with_lower_triangle();
        out
    };

    // gradient of the augmented Lagrangian at multipliers (lambda, w)
    let grad = |t: &DMatrix<f64>,
                lambda: &DVector<f64>,
                w: f64,
                rho: f64|
     -> (DMatrix<f64>, f64, f64) {
        let b = btilde_apply(ops, t);
        let h = ops.trace_h(t);
        let mut g = l.clone();
        let mut max_violation = 0.0f64;
        for lidx in 0..m {
            let viol = 1.0 - b[lidx];
            max_violation = max_violation.max(viol);
            let mult = (lambda[lidx] + rho * viol).max(0.0);
            if mult != 0.0 {
                let (i, j) = ops.edges()[lidx];
                for a in 0..d {
                    g[(i * d + a, i * d + a)] -= mult;
                    g[(j * d + a, j * d + a)] -= mult;
                    g[(i * d + a, j * d + a)] += mult;
                    g[(j * d + a, i * d + a)] += mult;
                }
            }
        }
        let hmult = w + rho * h;
        for bi in 0..n {
            for bj in 0..n {
                for a in 0..d {
                    g[(bi * d + a, bj * d + a)] += hmult;
                }
            }
        }
        (g, max_violation, h.abs())
    };

    let value = |t: &DMatrix<f64>, lambda: &DVector<f64>, w: f64, rho: f64| -> f64 {
        let b = btilde_apply(ops, t);
        let h = ops.trace_h(t);
        let mut v = ops.trace_laplacian_product(t);
        for lidx in 0..m {
            let s = (lambda[lidx] + rho * (1.0 - b[lidx])).max(0.0);
            v += (s * s - lambda[lidx] * lambda[lidx]) / (2.0 * rho);
        }
        v += w * h + 0.5 * rho * h * h;
        v
    };

    // start from a feasible-leaning scaled identity-ish matrix
    let mut t = DMatrix::<f64>::identity(dn, dn) * t_init_scale;
    let mut lambda = DVector::<f64>::zeros(m);
    let mut w = 0.0f64;
    let mut rho = 1.0f64;
    let mut step = 1e-2;
    let mut prev_outer_obj = f64::INFINITY;

    for outer in 0..400 {
        // inner projected gradient with simple backtracking
        let mut fv = value(&t, &lambda, w, rho);
        for _inner in 0..1500 {
            let (g, _, _) = grad(&t, &lambda, w, rho);
            let mut accepted = false;
            for _ in 0..50 {
                let cand = project_psd(&(&t - &g * step));
                let fc = value(&cand, &lambda, w, rho);
                if fc < fv {
                    let move_norm = (&cand - &t).norm();
                    t = cand;
                    fv = fc;
                    step *= 1.3;
                    accepted = move_norm > 1e-13 * t.norm().max(1.0);
                    break;
                }
                step *= 0.5;
                if step < 1e-17 {
                    break;
                }
            }
            if !accepted {
                break;
            }
        }
        // multiplier updates
        let b = btilde_apply(ops, &t);
        let h = ops.trace_h(&t);
        let max_violation = b.iter().map(|&x| 1.0 - x).fold(0.0f64, f64::max);
        for lidx in 0..m {
            lambda[lidx] = (lambda[lidx] + rho * (1.0 - b[lidx])).max(0.0);
        }
        w += rho * h;
        let obj = ops.trace_laplacian_product(&t);
        let settled = (prev_outer_obj - obj).abs() <= 1e-9 * obj.abs().max(1e-6);
        if outer > 10 && max_violation < 1e-10 && h.abs() < 1e-10 && settled {
            break;
        }
        prev_outer_obj = obj;
        if max_violation > 1e-10 {
            rho = (rho * 2.0).min(1e9);
        }
        step = step.max(1e-9 / rho);
    }

    let objective = ops.trace_laplacian_product(&t);
    (t, objective)
}

pub fn ops_for(graph: MeasurementGraph) -> CostOperators {
    CostOperators::build(&Formation::from_graph(graph))
}
