//! Generic parallel rigidity: decide whether a measurement graph determines
//! its locations up to translation, scale and negation, and extract maximal
//! rigid components when it does not.
//!
//! The workhorse is a randomized rank test: sample a generic point set `p`,
//! form the parallel rigidity matrix `R` whose null space consists of the
//! parallel formations of `p`, and check that the null space is exactly the
//! `d + 1` dimensional trivial one (translations and scaling). The check is
//! performed on `W = R^T R + U U^T`, where the columns of `U` span the
//! trivial space: the graph is rigid iff the smallest eigenvalue of `W` is
//! bounded away from zero. A false `rigid` answer has probability zero; a
//! false `flexible` answer cannot occur.
//!
//! For small graphs a combinatorial certificate search (a generalization of
//! Laman's condition to `(d, d+1)`-sparse multigraphs) is provided as an
//! independent cross-check.

use crate::graph::{connected_components, Formation, LocationSet};
use crate::linalg;
use crate::operators::CostOperators;
use crate::rng::derive_rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative threshold on the smallest eigenvalue of the test
/// matrix. Flexible graphs produce an exact zero (roundoff leaves it below
/// 1e-13 relative); minimally rigid graphs with an unlucky point sample can
/// dip to 1e-9 relative, so the threshold sits well below that tail and a
/// flexible verdict is re-checked on fresh samples.
pub const RIGIDITY_EPS: f64 = 1e-12;
/// Independent point samples before accepting a flexible verdict.
const FLEXIBLE_RESAMPLES: u64 = 3;
/// Node count below which the eigenvalue test is done densely.
const DENSE_TEST_LIMIT: usize = 64;
/// Largest graph accepted by the exponential certificate search.
const LAMAN_NODE_LIMIT: usize = 8;
/// Random null-space samples used to separate rigid components.
const COMPONENT_SAMPLES: usize = 8;
/// Relative tolerance when comparing per-edge scaling factors.
const COMPONENT_SCALE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error("rigidity test needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("edge ({0}, {1}) out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("generic point sample produced a degenerate edge ({0}, {1})")]
    DegenerateSample(usize, usize),
    #[error("certificate search refuses graphs with more than {limit} nodes (got {n})")]
    CertificateTooLarge { n: usize, limit: usize },
    #[error("component extraction requires at least one edge")]
    NoEdges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Rigid,
    Flexible,
}

/// Outcome of the randomized parallel rigidity test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub verdict: Verdict,
    pub tested_dimension: usize,
    /// Smallest eigenvalue of `W = R^T R + U U^T`, relative scale is
    /// `epsilon * lambda_max(W)`.
    pub smallest_eigenvalue: f64,
    /// Maximal rigid components; populated when the graph is flexible or on
    /// explicit request. Vertex sets may overlap at articulation nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<usize>>>,
    pub seed: u64,
}

fn validate(n: usize, edges: &[(usize, usize)], d: usize) -> Result<(), RigidityError> {
    if n < 2 {
        return Err(RigidityError::TooFewNodes(n));
    }
    if d < 2 {
        return Err(RigidityError::BadDimension(d));
    }
    for &(i, j) in edges {
        if i >= n || j >= n || i == j {
            return Err(RigidityError::EdgeOutOfRange(i, j));
        }
    }
    Ok(())
}

/// Samples an i.i.d. Gaussian point set, centered so the coordinates sum to
/// zero, re-drawing in the (probability-zero) event of a degenerate edge.
fn sample_generic_points(
    n: usize,
    d: usize,
    edges: &[(usize, usize)],
    seed: u64,
) -> Result<LocationSet, RigidityError> {
    for attempt in 0..8u64 {
        let mut rng = derive_rng(seed, "rigidity-points", attempt);
        let pts: Vec<DVector<f64>> = (0..n)
            .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let locs = LocationSet::new(d, pts).expect("dimension checked").centered();
        if let Some(&(i, j)) = edges
            .iter()
            .find(|&&(i, j)| (locs.point(i) - locs.point(j)).norm() < 1e-9)
        {
            if attempt == 7 {
                return Err(RigidityError::DegenerateSample(i, j));
            }
            continue;
        }
        return Ok(locs);
    }
    unreachable!()
}

/// The parallel rigidity matrix of a point set: one `d x dn` row block per
/// edge `(i, j)`, applying `Q = I - Gamma(p_i - p_j)` to `q_i - q_j`. Its
/// null vectors are exactly the parallel formations of `p`.
pub fn rigidity_matrix(
    n: usize,
    edges: &[(usize, usize)],
    p: &LocationSet,
) -> Result<DMatrix<f64>, RigidityError> {
    let d = p.dim();
    validate(n, edges, d)?;
    let mut r = DMatrix::zeros(d * edges.len(), d * n);
    for (e, &(i, j)) in edges.iter().enumerate() {
        let diff = p.point(i) - p.point(j);
        let dist = diff.norm();
        if dist < 1e-9 {
            return Err(RigidityError::DegenerateSample(i, j));
        }
        let gamma = diff / dist;
        let q = DMatrix::identity(d, d) - &gamma * gamma.transpose();
        r.view_mut((e * d, i * d), (d, d)).copy_from(&q);
        r.view_mut((e * d, j * d), (d, d)).copy_from(&(-&q));
    }
    Ok(r)
}

/// Orthonormal spanning set of the trivial null space: `d` normalized
/// translation directions plus the (centered, normalized) point vector.
fn trivial_basis(p: &LocationSet) -> Vec<DVector<f64>> {
    let (d, n) = (p.dim(), p.len());
    let mut basis: Vec<DVector<f64>> = (0..d)
        .map(|a| {
            DVector::from_fn(d * n, |r, _| if r % d == a { 1.0 / (n as f64).sqrt() } else { 0.0 })
        })
        .collect();
    let stacked = p.stacked();
    basis.push(&stacked / stacked.norm());
    basis
}

struct TestMatrix {
    ops: CostOperators,
    basis: Vec<DVector<f64>>,
}

impl TestMatrix {
    fn build(n: usize, edges: &[(usize, usize)], p: &LocationSet) -> Self {
        let formation = Formation::from_locations(p, edges).expect("non-degenerate sample");
        let ops = CostOperators::build(&formation);
        let _ = n;
        Self { ops, basis: trivial_basis(p) }
    }

    // W v = R^T R v + U U^T v; R^T R is the noiseless cost Laplacian of p.
    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = self.ops.apply_laplacian(v);
        for u in &self.basis {
            out += u * u.dot(v);
        }
        out
    }

    fn dense(&self) -> DMatrix<f64> {
        let mut w = self.ops.laplacian_dense();
        for u in &self.basis {
            w.syger(1.0, u, u, 1.0);
        }
        w.fill_upper_triangle_with_lower_triangle();
        w
    }
}

/// Smallest and largest eigenvalue of the rigidity test matrix.
fn test_matrix_extremes(w: &TestMatrix, dim: usize, n: usize, seed: u64) -> (f64, f64) {
    if n < DENSE_TEST_LIMIT {
        let (vals, _) = linalg::sym_eigen(&w.dense());
        return (vals[0], vals[dim - 1]);
    }
    let apply = |v: &DVector<f64>| w.apply(v);
    let mut rng = derive_rng(seed, "rigidity-eig", 0);
    let (top, _) = linalg::lanczos_largest(&apply, dim, 1, &mut rng);
    let lambda_max = top[0];
    let shifted = |v: &DVector<f64>| {
        let mut out = apply(v);
        out.zip_apply(v, |oi, vi| *oi = lambda_max * vi - *oi);
        out
    };
    let (gap, _) = linalg::lanczos_largest(&shifted, dim, 1, &mut rng);
    let lambda_min = lambda_max - gap[0];
    // The Lanczos estimate of lambda_min carries error around 1e-10 of the
    // spectral scale; answers that are not clearly above the threshold fall
    // back to the dense decomposition.
    if dim <= 2400 && lambda_min.abs() < 1e-6 * lambda_max.abs() {
        let (vals, _) = linalg::sym_eigen(&w.dense());
        return (vals[0], vals[dim - 1]);
    }
    (lambda_min, lambda_max)
}

/// Randomized generic parallel rigidity test in dimension `d`.
///
/// Disconnected graphs are flexible by convention and their components are
/// reported per connected part.
pub fn test_parallel_rigidity(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
    epsilon: f64,
) -> Result<RigidityReport, RigidityError> {
    validate(n, edges, d)?;
    if connected_components(n, edges).len() > 1 {
        let components = if edges.is_empty() {
            None
        } else {
            Some(extract_max_rigid_components(n, edges, d, seed)?)
        };
        return Ok(RigidityReport {
            verdict: Verdict::Flexible,
            tested_dimension: d,
            smallest_eigenvalue: 0.0,
            components,
            seed,
        });
    }
    let (rigid, lambda_min) = rigid_with_resampling(n, edges, d, seed, epsilon)?;
    let verdict = if rigid { Verdict::Rigid } else { Verdict::Flexible };
    let components = if rigid {
        None
    } else {
        Some(extract_max_rigid_components(n, edges, d, seed)?)
    };
    Ok(RigidityReport {
        verdict,
        tested_dimension: d,
        smallest_eigenvalue: lambda_min,
        components,
        seed,
    })
}

/// A rigid verdict from any sample is definitive (flexible graphs have an
/// exact null vector for every point set); a flexible verdict is accepted
/// only after independent samples agree.
fn rigid_with_resampling(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
    epsilon: f64,
) -> Result<(bool, f64), RigidityError> {
    let mut lambda_min = f64::INFINITY;
    for attempt in 0..FLEXIBLE_RESAMPLES {
        let sub_seed = seed.wrapping_add(attempt.wrapping_mul(0x5851_f42d_4c95_7f2d));
        let (lmin, lmax) = rigidity_eigenvalues(n, edges, d, sub_seed)?;
        if lmin > epsilon * lmax.abs() {
            return Ok((true, lmin));
        }
        lambda_min = lambda_min.min(lmin);
    }
    Ok((false, lambda_min))
}

/// Bare verdict without component extraction, for rejection loops.
pub fn is_parallel_rigid(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
) -> Result<bool, RigidityError> {
    validate(n, edges, d)?;
    if connected_components(n, edges).len() > 1 {
        return Ok(false);
    }
    Ok(rigid_with_resampling(n, edges, d, seed, RIGIDITY_EPS)?.0)
}

fn rigidity_eigenvalues(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
) -> Result<(f64, f64), RigidityError> {
    let p = sample_generic_points(n, d, edges, seed)?;
    let w = TestMatrix::build(n, edges, &p);
    Ok(test_matrix_extremes(&w, d * n, n, seed))
}

/// Maximal parallel rigid components of a graph in dimension `d`.
///
/// Within a maximal rigid component every parallel formation restricts to a
/// similarity, so the per-edge scaling factor `s` with `q_i - q_j = s (p_i -
/// p_j)` is constant on the component and, with probability one, differs
/// between components for random null-space samples. Edges are clustered by
/// their scaling profile over a handful of samples; each cluster's vertex
/// set is one component. Vertex sets may overlap at articulation nodes.
pub fn extract_max_rigid_components(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, RigidityError> {
    validate(n, edges, d)?;
    if edges.is_empty() {
        return Err(RigidityError::NoEdges);
    }
    let mut components = Vec::new();
    for (cc_index, part) in connected_components(n, edges).into_iter().enumerate() {
        if part.len() < 2 {
            continue; // isolated node
        }
        let mut local = vec![usize::MAX; n];
        for (k, &g) in part.iter().enumerate() {
            local[g] = k;
        }
        let local_edges: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(i, j)| local[i] != usize::MAX && local[j] != usize::MAX)
            .map(|&(i, j)| (local[i], local[j]))
            .collect();
        let sub_seed = seed ^ (cc_index as u64).wrapping_mul(0x9e37_79b9);
        for comp in component_edge_clusters(part.len(), &local_edges, d, sub_seed)? {
            let mut verts: Vec<usize> = comp.into_iter().map(|v| part[v]).collect();
            verts.sort_unstable();
            components.push(verts);
        }
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    Ok(components)
}

/// Clusters the edges of one connected graph by scaling profile; returns
/// vertex sets of the clusters.
fn component_edge_clusters(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, RigidityError> {
    let p = sample_generic_points(n, d, edges, seed)?;
    let w = TestMatrix::build(n, edges, &p);
    let (vals, vecs) = linalg::sym_eigen(&w.dense());
    let dim = d * n;
    let lambda_max = vals[dim - 1].abs().max(1e-300);
    let null_dims: Vec<usize> =
        (0..dim).filter(|&k| vals[k] <= RIGIDITY_EPS * lambda_max).collect();

    let m = edges.len();
    if null_dims.is_empty() {
        // Rigid: a single component covering the connected part.
        let mut verts: Vec<usize> = (0..n).collect();
        verts.sort_unstable();
        return Ok(vec![verts]);
    }

    // Scaling profiles of random non-trivial parallel formations.
    let mut rng = derive_rng(seed, "rigidity-components", 0);
    let mut profiles = vec![[0.0f64; COMPONENT_SAMPLES]; m];
    for r in 0..COMPONENT_SAMPLES {
        let mut q = DVector::zeros(dim);
        for &k in &null_dims {
            let g: f64 = rng.sample(StandardNormal);
            q += vecs.column(k) * g;
        }
        for (e, &(i, j)) in edges.iter().enumerate() {
            let dp = p.point(i) - p.point(j);
            let dq = q.rows(i * d, d) - q.rows(j * d, d);
            profiles[e][r] = dp.dot(&dq) / dp.norm_squared();
        }
    }

    // Union edges whose profiles agree on every sample.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let agree = |a: &[f64; COMPONENT_SAMPLES], b: &[f64; COMPONENT_SAMPLES]| {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= COMPONENT_SCALE_TOL * x.abs().max(y.abs()).max(1.0))
    };
    for a in 0..m {
        for b in (a + 1)..m {
            if agree(&profiles[a], &profiles[b]) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for e in 0..m {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().push(e);
    }
    Ok(groups
        .into_values()
        .map(|es| {
            let mut verts: Vec<usize> = es.iter().flat_map(|&e| [edges[e].0, edges[e].1]).collect();
            verts.sort_unstable();
            verts.dedup();
            verts
        })
        .collect())
}

/// Combinatorial certificate for generic parallel rigidity in `R^d`: the
/// graph is rigid iff some `D` among the `(d-1)`-fold copies of the edges
/// has `|D| = d n - (d+1)` while every nonempty subset `D'` satisfies
/// `|D'| <= d |V(D')| - (d+1)`.
///
/// Sets satisfying the sparsity condition form a matroid, so a greedy
/// independence augmentation computes the maximum certificate size. The
/// independence oracle enumerates vertex subsets and is exponential in `n`;
/// the function refuses graphs with more than 8 nodes.
pub fn count_laman_certificate(
    n: usize,
    edges: &[(usize, usize)],
    d: usize,
) -> Result<bool, RigidityError> {
    validate(n, edges, d)?;
    if n > LAMAN_NODE_LIMIT {
        return Err(RigidityError::CertificateTooLarge { n, limit: LAMAN_NODE_LIMIT });
    }
    let target = d * n - (d + 1);
    let mut chosen: Vec<(usize, usize)> = Vec::new();

    // Sparsity check for `chosen + candidate`: only vertex sets containing
    // both candidate endpoints can become violated.
    let violates = |chosen: &[(usize, usize)], u: usize, v: usize| -> bool {
        let rest: Vec<usize> = (0..n).filter(|&x| x != u && x != v).collect();
        for mask in 0..(1u32 << rest.len()) {
            let mut in_set = [false; LAMAN_NODE_LIMIT];
            in_set[u] = true;
            in_set[v] = true;
            let mut size = 2;
            for (b, &x) in rest.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    in_set[x] = true;
                    size += 1;
                }
            }
            let inside = chosen.iter().filter(|&&(a, b)| in_set[a] && in_set[b]).count();
            if inside + 1 > d * size - (d + 1) {
                return true;
            }
        }
        false
    };

    for &(u, v) in edges {
        for _copy in 0..(d - 1) {
            if chosen.len() == target {
                return Ok(true);
            }
            if !violates(&chosen, u, v) {
                chosen.push((u, v));
            }
        }
    }
    Ok(chosen.len() == target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Vec<(usize, usize)> {
        vec![(0, 1), (1, 2)]
    }

    fn triangle() -> Vec<(usize, usize)> {
        vec![(0, 1), (1, 2), (0, 2)]
    }

    /// Two triangles sharing vertex 2: flexible in any dimension.
    fn two_triangles() -> Vec<(usize, usize)> {
        vec![(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]
    }

    /// `two_triangles` plus the linking edge (0, 3): rigid in R^2 and R^3.
    fn two_triangles_linked() -> Vec<(usize, usize)> {
        let mut e = two_triangles();
        e.push((0, 3));
        e
    }

    /// Four-cycle: rigid in R^3, flexible in R^2.
    fn four_cycle() -> Vec<(usize, usize)> {
        vec![(0, 1), (1, 2), (2, 3), (0, 3)]
    }

    #[test]
    fn rigidity_matrix_single_edge_block() {
        let p = LocationSet::from_rows(2, &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = rigidity_matrix(2, &[(0, 1)], &p).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 4, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        assert!((r - expected).norm() < 1e-14);
    }

    #[test]
    fn rigidity_matrix_annihilates_trivial_space() {
        let edges = two_triangles_linked();
        let p = sample_generic_points(5, 3, &edges, 77).unwrap();
        let r = rigidity_matrix(5, &edges, &p).unwrap();
        assert!((&r * p.stacked()).norm() < 1e-10);
        for a in 0..3 {
            let u = DVector::from_fn(15, |k, _| if k % 3 == a { 1.0 } else { 0.0 });
            assert!((&r * u).norm() < 1e-12);
        }
    }

    #[test]
    fn curated_verdicts() {
        for seed in [1u64, 99] {
            let t = |n, e: &[(usize, usize)], d| {
                test_parallel_rigidity(n, e, d, seed, RIGIDITY_EPS).unwrap().verdict
            };
            assert_eq!(t(3, &triangle(), 2), Verdict::Rigid);
            assert_eq!(t(3, &path3(), 2), Verdict::Flexible);
            assert_eq!(t(5, &two_triangles(), 2), Verdict::Flexible);
            assert_eq!(t(5, &two_triangles(), 3), Verdict::Flexible);
            assert_eq!(t(5, &two_triangles_linked(), 2), Verdict::Rigid);
            assert_eq!(t(5, &two_triangles_linked(), 3), Verdict::Rigid);
            assert_eq!(t(4, &four_cycle(), 3), Verdict::Rigid);
            assert_eq!(t(4, &four_cycle(), 2), Verdict::Flexible);
        }
    }

    #[test]
    fn rank_matches_verdict_on_random_graphs() {
        let mut rng = derive_rng(5150, "rigidity-test", 0);
        for trial in 0..8 {
            let n = 4 + (trial % 5) as usize * 3;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random::<f64>() < 0.45 {
                        edges.push((i, j));
                    }
                }
            }
            if connected_components(n, &edges).len() > 1 {
                continue;
            }
            for d in [2usize, 3] {
                let p = sample_generic_points(n, d, &edges, 1000 + trial).unwrap();
                let r = rigidity_matrix(n, &edges, &p).unwrap();
                let svd = r.svd(false, false);
                let smax = svd.singular_values.max();
                let rank = svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax).count();
                let rigid =
                    is_parallel_rigid(n, &edges, d, 2000 + trial).unwrap();
                assert_eq!(rank == d * n - (d + 1), rigid, "n={n} d={d} edges={edges:?}");
            }
        }
    }

    #[test]
    fn flexible_report_lists_two_triangles() {
        let report =
            test_parallel_rigidity(5, &two_triangles(), 2, 7, RIGIDITY_EPS).unwrap();
        assert_eq!(report.verdict, Verdict::Flexible);
        let comps = report.components.unwrap();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![2, 3, 4]]);
        // each extracted component is itself rigid, their union is not
        for c in &comps {
            let sub: Vec<(usize, usize)> = two_triangles()
                .iter()
                .filter(|(i, j)| c.contains(i) && c.contains(j))
                .map(|&(i, j)| {
                    let li = c.iter().position(|&x| x == i).unwrap();
                    let lj = c.iter().position(|&x| x == j).unwrap();
                    (li, lj)
                })
                .collect();
            assert!(is_parallel_rigid(c.len(), &sub, 2, 3).unwrap());
        }
    }

    #[test]
    fn rigid_graph_has_single_component() {
        let comps = extract_max_rigid_components(5, &two_triangles_linked(), 2, 3).unwrap();
        assert_eq!(comps, vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn disconnected_graph_is_flexible_with_per_part_components() {
        let edges = vec![(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)];
        let report = test_parallel_rigidity(6, &edges, 2, 5, RIGIDITY_EPS).unwrap();
        assert_eq!(report.verdict, Verdict::Flexible);
        assert_eq!(report.components.unwrap(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn laman_certificates_on_curated_graphs() {
        // the d = 2 certificate is a subset of E itself
        assert!(count_laman_certificate(3, &triangle(), 2).unwrap());
        assert!(!count_laman_certificate(5, &two_triangles(), 2).unwrap());
        assert!(!count_laman_certificate(5, &two_triangles(), 3).unwrap());
        assert!(count_laman_certificate(5, &two_triangles_linked(), 2).unwrap());
        // triangle in R^3: two copies of two edges plus one of the third
        assert!(count_laman_certificate(3, &triangle(), 3).unwrap());
        // the explicit 11-element certificate graph
        assert!(count_laman_certificate(5, &two_triangles_linked(), 3).unwrap());
        assert!(count_laman_certificate(4, &four_cycle(), 3).unwrap());
        assert!(!count_laman_certificate(4, &four_cycle(), 2).unwrap());
        assert!(matches!(
            count_laman_certificate(9, &[(0, 1)], 2),
            Err(RigidityError::CertificateTooLarge { .. })
        ));
    }

    #[test]
    fn monte_carlo_runs_agree_across_seeds() {
        let cases: Vec<(usize, Vec<(usize, usize)>, usize)> = vec![
            (3, triangle(), 2),
            (3, triangle(), 3),
            (3, path3(), 2),
            (5, two_triangles(), 2),
            (5, two_triangles_linked(), 3),
            (4, four_cycle(), 2),
            (4, four_cycle(), 3),
        ];
        for (n, edges, d) in cases {
            let a = is_parallel_rigid(n, &edges, d, 11).unwrap();
            let b = is_parallel_rigid(n, &edges, d, 1234567).unwrap();
            assert_eq!(a, b, "n={n} d={d}");
        }
    }

    #[test]
    fn small_input_rejected() {
        assert!(matches!(
            test_parallel_rigidity(1, &[], 2, 0, RIGIDITY_EPS),
            Err(RigidityError::TooFewNodes(1))
        ));
    }
}
