//! Structure-from-motion front-end: from relative rotations and point
//! correspondences to a pairwise-line measurement graph.
//!
//! Every correspondence between images `i` and `j` yields one unit vector
//! orthogonal to the camera baseline `t_i - t_j` (the epipolar constraint
//! rewritten in world coordinates), so the samples of an image pair span a
//! 2D subspace whose normal is the unsigned pairwise line. Rotations are
//! synchronized from the relative measurements by the eigenvector method
//! with iterative outlier pruning, and the 2D subspaces are estimated
//! robustly by S-REAPER, a convex relaxation of projection pursuit over the
//! spectrahedron `{0 <= Q <= I, Tr Q = 2}`.

use crate::graph::{connected_components, GraphError, MeasurementGraph};
use crate::linalg;
use nalgebra::{DMatrix, DVector, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CameraError {
    #[error("edge ({i}, {j}): matrix is not a rotation (|R^T R - I| = {ortho:.3e}, det = {det:.6})")]
    NotARotation { i: usize, j: usize, ortho: f64, det: f64 },
    #[error("focal length of camera {0} must be positive, got {1}")]
    BadFocal(usize, f64),
    #[error("edge ({0}, {1}) out of range for {2} cameras")]
    EdgeOutOfRange(usize, usize, usize),
    #[error("rotation graph is disconnected")]
    Disconnected,
    #[error("graph shrank below 2 cameras during outlier pruning")]
    GraphVanished,
    #[error("subspace estimation needs at least 2 nonzero samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid dataset: {0}")]
    Dataset(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
}

/// One image pair: relative rotation and pixel correspondences.
#[derive(Debug, Clone)]
pub struct RotationEdge {
    pub i: usize,
    pub j: usize,
    /// `R_ij = R_i^T R_j`.
    pub rot: Matrix3<f64>,
    /// Corresponding image points `(q_i, q_j)` in pixels.
    pub pairs: Vec<(Vector2<f64>, Vector2<f64>)>,
}

/// Measurement graph of relative rotations with per-camera focal lengths.
#[derive(Debug, Clone)]
pub struct RelativeRotationGraph {
    pub n: usize,
    pub focal: Vec<f64>,
    pub edges: Vec<RotationEdge>,
}

const ROTATION_TOL: f64 = 1e-8;

impl RelativeRotationGraph {
    pub fn new(n: usize, focal: Vec<f64>, edges: Vec<RotationEdge>) -> Result<Self, CameraError> {
        if focal.len() != n {
            return Err(CameraError::Dataset(format!(
                "expected {n} focal lengths, got {}",
                focal.len()
            )));
        }
        for (k, &f) in focal.iter().enumerate() {
            if !(f > 0.0) {
                return Err(CameraError::BadFocal(k, f));
            }
        }
        for e in &edges {
            if e.i >= n || e.j >= n || e.i == e.j {
                return Err(CameraError::EdgeOutOfRange(e.i, e.j, n));
            }
            let ortho = (e.rot.transpose() * e.rot - Matrix3::identity()).norm();
            let det = e.rot.determinant();
            if ortho > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
                return Err(CameraError::NotARotation { i: e.i, j: e.j, ortho, det });
            }
        }
        Ok(Self { n, focal, edges })
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self.n, &self.edge_pairs()).len() == 1
    }

    /// Parses the rotation-graph JSON format (`R` row-major).
    pub fn from_json_str(s: &str) -> Result<Self, CameraError> {
        let wire: RotGraphWire =
            serde_json::from_str(s).map_err(|e| CameraError::Dataset(e.to_string()))?;
        let mut edges = Vec::with_capacity(wire.edges.len());
        for ew in wire.edges {
            if ew.r.len() != 9 {
                return Err(CameraError::Dataset(format!(
                    "edge ({}, {}): R must have 9 entries, got {}",
                    ew.i,
                    ew.j,
                    ew.r.len()
                )));
            }
            let rot = Matrix3::from_row_slice(&ew.r);
            let pairs = ew
                .pairs
                .iter()
                .map(|p| (Vector2::new(p[0], p[1]), Vector2::new(p[2], p[3])))
                .collect();
            edges.push(RotationEdge { i: ew.i, j: ew.j, rot, pairs });
        }
        Self::new(wire.n, wire.focal, edges)
    }

    pub fn to_json_string(&self) -> String {
        let wire = RotGraphWire {
            n: self.n,
            focal: self.focal.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| RotEdgeWire {
                    i: e.i,
                    j: e.j,
                    r: e.rot.transpose().iter().copied().collect(),
                    pairs: e
                        .pairs
                        .iter()
                        .map(|(a, b)| [a.x, a.y, b.x, b.y])
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("rotation graph serialization")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotGraphWire {
    n: usize,
    focal: Vec<f64>,
    edges: Vec<RotEdgeWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotEdgeWire {
    i: usize,
    j: usize,
    /// row-major 3x3
    r: Vec<f64>,
    /// `[qx_i, qy_i, qx_j, qy_j]` per correspondence
    pairs: Vec<[f64; 4]>,
}

/// Unit 2D-subspace samples per edge, with the number of zero cross
/// products that were dropped.
#[derive(Debug, Clone)]
pub struct SubspaceSampleSet {
    pub samples: Vec<Vector3<f64>>,
    pub dropped_zero: usize,
}

/// Epipolar subspace samples of one image pair: for each correspondence,
/// `normalize((R_i [q_i/f_i; 1]) x (R_j [q_j/f_j; 1]))`. Zero cross
/// products (parallel back-projected rays) are dropped and counted.
pub fn epipolar_samples(
    rot_i: &Matrix3<f64>,
    rot_j: &Matrix3<f64>,
    pairs: &[(Vector2<f64>, Vector2<f64>)],
    f_i: f64,
    f_j: f64,
) -> SubspaceSampleSet {
    let mut samples = Vec::with_capacity(pairs.len());
    let mut dropped_zero = 0;
    for (qi, qj) in pairs {
        let ri = rot_i * Vector3::new(qi.x / f_i, qi.y / f_i, 1.0);
        let rj = rot_j * Vector3::new(qj.x / f_j, qj.y / f_j, 1.0);
        let cross = ri.cross(&rj);
        let nrm = cross.norm();
        if nrm < 1e-14 {
            dropped_zero += 1;
        } else {
            samples.push(cross / nrm);
        }
    }
    SubspaceSampleSet { samples, dropped_zero }
}

/// Rotation synchronization by the eigenvector method: the top three
/// eigenvectors of the block matrix with `R_ij` blocks carry the camera
/// frames; each vertical block is projected to the nearest rotation.
/// Gauge-fixed so the first camera gets the identity.
pub fn evm_rotations(graph: &RelativeRotationGraph) -> Result<Vec<Matrix3<f64>>, CameraError> {
    if !graph.is_connected() {
        return Err(CameraError::Disconnected);
    }
    let n = graph.n;
    let mut big = DMatrix::<f64>::zeros(3 * n, 3 * n);
    for k in 0..n {
        big.view_mut((3 * k, 3 * k), (3, 3)).copy_from(&Matrix3::identity());
    }
    for e in &graph.edges {
        big.view_mut((3 * e.i, 3 * e.j), (3, 3)).copy_from(&e.rot);
        big.view_mut((3 * e.j, 3 * e.i), (3, 3)).copy_from(&e.rot.transpose());
    }
    let (_, vecs) = linalg::sym_eigen(&big);
    let dim = 3 * n;
    let mut v = DMatrix::<f64>::zeros(dim, 3);
    for c in 0..3 {
        v.set_column(c, &vecs.column(dim - 1 - c));
    }
    // The noiseless eigenbasis is X O for block rows X_k = R_k^T; a basis
    // with det(O) = -1 would force every block polar factor through the
    // reflection fix inconsistently, so flip one column first if needed.
    let det_sum: f64 = (0..n)
        .map(|k| v.view((3 * k, 0), (3, 3)).determinant())
        .sum();
    if det_sum < 0.0 {
        let flipped = -v.column(2).into_owned();
        v.set_column(2, &flipped);
    }
    let blocks: Vec<Matrix3<f64>> = (0..n)
        .map(|k| {
            let b = Matrix3::from_iterator(v.view((3 * k, 0), (3, 3)).iter().copied());
            linalg::polar_rotation3(&b)
        })
        .collect();
    // blocks approximate R_k^T O; fix the gauge so camera 0 is the identity
    let g0 = blocks[0];
    Ok(blocks.iter().map(|b| (b * g0.transpose()).transpose()).collect())
}

/// Outlier identification rule for rotation pruning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OutlierRule {
    /// Prune edges with consistency error above mean + 2 stddev, at least
    /// one edge per round.
    MeanTwoSigma,
    /// Prune the `ceil(fraction * m)` worst edges per round.
    TopFraction(f64),
}

impl std::str::FromStr for OutlierRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "mean2sigma" {
            return Ok(OutlierRule::MeanTwoSigma);
        }
        if let Some(frac) = s.strip_prefix("topfrac:") {
            let f: f64 = frac.parse().map_err(|e| format!("bad fraction: {e}"))?;
            if !(0.0..=1.0).contains(&f) {
                return Err(format!("fraction must be in [0, 1], got {f}"));
            }
            return Ok(OutlierRule::TopFraction(f));
        }
        Err(format!("unknown outlier rule '{s}' (expected mean2sigma or topfrac:F)"))
    }
}

/// Result of the iterative robust rotation estimation.
#[derive(Debug, Clone)]
pub struct RobustRotations {
    /// Estimate per surviving camera, aligned with `nodes`.
    pub rotations: Vec<Matrix3<f64>>,
    /// Surviving camera ids (sorted, original indexing).
    pub nodes: Vec<usize>,
    /// Surviving graph, re-expressed over the original camera indices.
    pub graph: RelativeRotationGraph,
    pub rounds: usize,
    /// Mean consistency error per round, on that round's edge set.
    pub mean_errors: Vec<f64>,
}

fn consistency_errors(graph: &RelativeRotationGraph, rots: &[Matrix3<f64>]) -> Vec<f64> {
    graph
        .edges
        .iter()
        .map(|e| (rots[e.i].transpose() * rots[e.j] - e.rot).norm())
        .collect()
}

/// Iterative eigenvector-method rotation estimation with outlier pruning:
/// synchronize, score every edge by `|R_i^T R_j - R_ij|_F`, prune per the
/// rule, keep the largest connected component, and repeat until the mean
/// error stabilizes (relative change below 1e-3), the error is already at
/// the numerical floor, or `max_rounds` is hit. A round that increases the
/// mean error is rolled back.
pub fn robust_rotations(
    graph: &RelativeRotationGraph,
    max_rounds: usize,
    rule: OutlierRule,
) -> Result<RobustRotations, CameraError> {
    const CLEAN_FLOOR: f64 = 1e-10;
    if !graph.is_connected() {
        return Err(CameraError::Disconnected);
    }
    let mut current = graph.clone();
    let mut alive: Vec<usize> = (0..graph.n).collect();
    let mut mean_errors: Vec<f64> = Vec::new();
    let mut best: Option<RobustRotations> = None;

    for round in 0..max_rounds.max(1) {
        let rots = evm_rotations(&current)?;
        let errors = consistency_errors(&current, &rots);
        let mean = errors.iter().sum::<f64>() / errors.len().max(1) as f64;

        if let Some(prev) = mean_errors.last() {
            if mean > *prev {
                // pruning made things worse; keep the previous state
                break;
            }
        }
        mean_errors.push(mean);
        best = Some(RobustRotations {
            rotations: alive.iter().map(|&k| rots[k]).collect(),
            nodes: alive.clone(),
            graph: current.clone(),
            rounds: round + 1,
            mean_errors: mean_errors.clone(),
        });

        let stabilized = mean <= CLEAN_FLOOR
            || mean_errors
                .len()
                .checked_sub(2)
                .map(|k| (mean_errors[k] - mean).abs() <= 1e-3 * mean_errors[k].max(1e-300))
                .unwrap_or(false);
        if stabilized || round + 1 == max_rounds.max(1) {
            break;
        }

        // prune
        let m = errors.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]));
        let prune: Vec<usize> = match rule {
            OutlierRule::MeanTwoSigma => {
                let var =
                    errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / m.max(1) as f64;
                let thresh = mean + 2.0 * var.sqrt();
                let above: Vec<usize> =
                    (0..m).filter(|&l| errors[l] > thresh).collect();
                if above.is_empty() {
                    vec![order[0]]
                } else {
                    above
                }
            }
            OutlierRule::TopFraction(f) => {
                let k = ((f * m as f64).ceil() as usize).clamp(1, m);
                order[..k].to_vec()
            }
        };
        let mut keep = vec![true; m];
        for l in prune {
            keep[l] = false;
        }
        let kept_edges: Vec<RotationEdge> = current
            .edges
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(e, _)| e.clone())
            .collect();
        // largest connected component of the pruned graph
        let pairs: Vec<(usize, usize)> = kept_edges.iter().map(|e| (e.i, e.j)).collect();
        let comp = connected_components(current.n, &pairs)
            .into_iter()
            .max_by_key(|c| {
                let set: std::collections::BTreeSet<usize> = c.iter().copied().collect();
                pairs.iter().filter(|&&(i, j)| set.contains(&i) && set.contains(&j)).count()
            })
            .unwrap_or_default();
        if comp.len() < 2 {
            return Err(CameraError::GraphVanished);
        }
        let mut local = vec![usize::MAX; current.n];
        for (k, &g) in comp.iter().enumerate() {
            local[g] = k;
        }
        let new_edges: Vec<RotationEdge> = kept_edges
            .into_iter()
            .filter(|e| local[e.i] != usize::MAX && local[e.j] != usize::MAX)
            .map(|e| RotationEdge { i: local[e.i], j: local[e.j], rot: e.rot, pairs: e.pairs })
            .collect();
        let new_focal: Vec<f64> = comp.iter().map(|&g| current.focal[g]).collect();
        alive = comp.iter().map(|&g| alive[g]).collect();
        current = RelativeRotationGraph::new(comp.len(), new_focal, new_edges)?;
    }

    let mut out = best.expect("at least one round ran");
    // report the surviving graph over original camera ids
    let mut orig_edges: Vec<RotationEdge> = out
        .graph
        .edges
        .iter()
        .map(|e| RotationEdge {
            i: out.nodes[e.i],
            j: out.nodes[e.j],
            rot: e.rot,
            pairs: e.pairs.clone(),
        })
        .collect();
    orig_edges.sort_by_key(|e| (e.i.min(e.j), e.i.max(e.j)));
    out.graph = RelativeRotationGraph::new(graph.n, graph.focal.clone(), orig_edges)?;
    Ok(out)
}

/// S-REAPER subspace estimate of one edge.
#[derive(Debug, Clone)]
pub struct SreaperLine {
    /// Optimizer over the spectrahedron `{0 <= Q <= I, Tr Q = 2}`.
    pub q: Matrix3<f64>,
    /// Line projector `I - (q1 q1^T + q2 q2^T)` from the two leading unit
    /// eigenvectors of `q`.
    pub gamma: Matrix3<f64>,
    /// Unit line direction (leading eigenvector of `gamma`).
    pub direction: Vector3<f64>,
    /// Sum-of-norms objective at the solution.
    pub objective: f64,
    /// Set when the samples were (near) collinear and the plain PCA
    /// projector was returned instead.
    pub pca_fallback: bool,
}

/// Covariance eigen-decomposition as 3x3 (ascending eigenvalues).
fn cov_eigen(samples: &[Vector3<f64>], weights: Option<&[f64]>) -> (Vector3<f64>, Matrix3<f64>) {
    let mut c = Matrix3::<f64>::zeros();
    for (k, s) in samples.iter().enumerate() {
        let w = weights.map_or(1.0, |w| w[k]);
        c += s * s.transpose() * w;
    }
    let eig = nalgebra::SymmetricEigen::new(c);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = Vector3::new(
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    );
    let mut vecs = Matrix3::zeros();
    for (c_out, &c_in) in order.iter().enumerate() {
        vecs.set_column(c_out, &eig.eigenvectors.column(c_in));
    }
    (vals, vecs)
}

/// Rank-2 projector onto the span of the top two eigenvector columns.
fn top_two_projector(vecs: &Matrix3<f64>) -> Matrix3<f64> {
    let q1 = vecs.column(2);
    let q2 = vecs.column(1);
    q1 * q1.transpose() + q2 * q2.transpose()
}

/// Exact minimizer of `sum_a c_a p_a^2` over the simplex slice
/// `p in [0,1]^3, sum p = 1`, for nonnegative costs `c` (ascending order
/// not required). Evaluates the closed-form candidates per support.
fn min_weighted_square_simplex(c: &Vector3<f64>) -> Vector3<f64> {
    let mut best: Option<(f64, Vector3<f64>)> = None;
    let mut consider = |p: Vector3<f64>| {
        if p.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)) {
            let obj = c[0] * p[0] * p[0] + c[1] * p[1] * p[1] + c[2] * p[2] * p[2];
            if best.is_none() || obj < best.as_ref().unwrap().0 {
                best = Some((obj, p.map(|x| x.clamp(0.0, 1.0))));
            }
        }
    };
    // single-coordinate candidates
    for a in 0..3 {
        let mut p = Vector3::zeros();
        p[a] = 1.0;
        consider(p);
    }
    // interior candidates p_a ~ 1/c_a on a support set
    let supports: [&[usize]; 4] = [&[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]];
    for support in supports {
        if support.iter().any(|&a| c[a] <= 1e-300) {
            continue; // degenerate costs are covered by the vertex candidates
        }
        let denom: f64 = support.iter().map(|&a| 1.0 / c[a]).sum();
        let mut p = Vector3::zeros();
        for &a in support {
            p[a] = (1.0 / c[a]) / denom;
        }
        consider(p);
    }
    best.expect("simplex always has a vertex candidate").1
}

/// Robust 2D-subspace estimation: minimizes the sum of unsquared residuals
/// `sum_k |nu_k - Q nu_k|` over `{0 <= Q <= I, Tr Q = 2}` by iteratively
/// reweighted least squares. Each weighted subproblem is solved exactly:
/// the optimal `Q` shares eigenvectors with the weighted covariance and its
/// eigenvalues solve a three-variable quadratic program on the capped
/// simplex. Collinear sample sets fall back to the PCA projector with a
/// warning flag.
pub fn sreaper_line(samples: &[Vector3<f64>]) -> Result<SreaperLine, CameraError> {
    const IRLS_DELTA: f64 = 1e-8;
    const REL_TOL: f64 = 1e-9;
    const MAX_ITERS: usize = 500;
    let nonzero: Vec<Vector3<f64>> =
        samples.iter().filter(|s| s.norm() > 0.0).copied().collect();
    if nonzero.len() < 2 {
        return Err(CameraError::TooFewSamples(nonzero.len()));
    }
    let (vals, vecs) = cov_eigen(&nonzero, None);
    let objective = |q: &Matrix3<f64>| -> f64 {
        nonzero.iter().map(|s| (s - q * s).norm()).sum()
    };
    let pca = top_two_projector(&vecs);
    if vals[1] <= 1e-12 * vals[2].max(1e-300) {
        log::warn!(
            "subspace estimation: samples are (near) collinear; the 2D subspace is ill-posed, \
             falling back to the PCA projector"
        );
        let (_, gvecs) = cov_eigen(&nonzero, None);
        let gamma = Matrix3::identity() - pca;
        return Ok(SreaperLine {
            q: pca,
            gamma,
            direction: gvecs.column(0).into_owned(),
            objective: objective(&pca),
            pca_fallback: true,
        });
    }

    // IRLS from the (feasible) PCA projector; the majorize-minimize steps
    // never increase the objective, so the final Q beats PCA by
    // construction.
    let mut q = pca;
    let mut obj = objective(&q);
    for _ in 0..MAX_ITERS {
        let weights: Vec<f64> = nonzero
            .iter()
            .map(|s| 1.0 / (s - q * s).norm().max(IRLS_DELTA))
            .collect();
        let (cvals, cvecs) = cov_eigen(&nonzero, Some(&weights));
        let p = min_weighted_square_simplex(&cvals);
        let mut q_new = Matrix3::zeros();
        for a in 0..3 {
            let v = cvecs.column(a);
            q_new += v * v.transpose() * (1.0 - p[a]);
        }
        let obj_new = objective(&q_new);
        if obj_new > obj {
            break; // reweighting floor reached
        }
        let done = (obj - obj_new) <= REL_TOL * obj.max(1e-300);
        q = q_new;
        obj = obj_new;
        if done {
            break;
        }
    }

    let (_, qvecs) = {
        let eig = nalgebra::SymmetricEigen::new(q);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut vecs = Matrix3::zeros();
        for (c_out, &c_in) in order.iter().enumerate() {
            vecs.set_column(c_out, &eig.eigenvectors.column(c_in));
        }
        (eig.eigenvalues, vecs)
    };
    let gamma = Matrix3::identity() - top_two_projector(&qvecs);
    let mut direction = qvecs.column(0).into_owned();
    if let Some(k) = direction.iter().position(|&x| x.abs() > 1e-12) {
        if direction[k] < 0.0 {
            direction = -direction;
        }
    }
    Ok(SreaperLine { q, gamma, direction, objective: obj, pca_fallback: false })
}

/// Per-edge outcome bookkeeping of the line-graph assembly.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LineGraphReport {
    /// Edges dropped for lacking two usable samples.
    pub dropped_edges: Vec<(usize, usize)>,
    /// Zero cross products dropped, summed over edges.
    pub zero_samples: usize,
    /// Edges where the subspace was collinear and PCA was used.
    pub pca_fallbacks: usize,
}

/// Assembles the pairwise-line measurement graph from estimated rotations:
/// epipolar samples then a robust subspace fit per edge; the unit normal of
/// each 2D subspace is the measured line of that camera pair.
pub fn build_line_graph(
    graph: &RelativeRotationGraph,
    rotations: &[Matrix3<f64>],
    nodes: &[usize],
) -> Result<(MeasurementGraph, LineGraphReport), CameraError> {
    let mut rot_of = vec![None; graph.n];
    for (k, &g) in nodes.iter().enumerate() {
        rot_of[g] = Some(rotations[k]);
    }
    let mut report = LineGraphReport::default();
    let mut edges = Vec::new();
    for e in &graph.edges {
        let (ri, rj) = match (rot_of[e.i], rot_of[e.j]) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                report.dropped_edges.push((e.i, e.j));
                continue;
            }
        };
        let set = epipolar_samples(&ri, &rj, &e.pairs, graph.focal[e.i], graph.focal[e.j]);
        report.zero_samples += set.dropped_zero;
        if set.samples.len() < 2 {
            report.dropped_edges.push((e.i, e.j));
            continue;
        }
        match sreaper_line(&set.samples) {
            Ok(line) => {
                if line.pca_fallback {
                    report.pca_fallbacks += 1;
                }
                edges.push((e.i, e.j, DVector::from_column_slice(line.direction.as_slice())));
            }
            Err(CameraError::TooFewSamples(_)) => {
                report.dropped_edges.push((e.i, e.j));
            }
            Err(other) => return Err(other),
        }
    }
    let graph = MeasurementGraph::new(3, graph.n, edges)?;
    Ok((graph, report))
}

/// Mean geodesic error after the best global rotation alignment.
pub fn rotation_alignment_error(
    truth: &[Matrix3<f64>],
    estimate: &[Matrix3<f64>],
) -> (f64, f64) {
    // right-multiplied gauge: estimates satisfy R_i ~ G R_i_hat
    let mut acc = Matrix3::<f64>::zeros();
    for (t, e) in truth.iter().zip(estimate) {
        acc += t * e.transpose();
    }
    let g = linalg::polar_rotation3(&acc);
    let mut mean = 0.0;
    let mut max = 0.0f64;
    for (t, e) in truth.iter().zip(estimate) {
        let err = linalg::rotation_angle(&(t.transpose() * (g * e)));
        mean += err;
        max = max.max(err);
    }
    (mean / truth.len() as f64, max)
}
