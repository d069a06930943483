//! Divide-and-stitch location estimation for large graphs.
//!
//! The graph is split by recursive spectral bisection into overlapping
//! patches of bounded size, each patch is reduced to its maximal parallel
//! rigid components and solved independently, pairwise registrations give
//! relative signed scales, a Z2 eigenvector synchronization fixes the patch
//! negations, and a robust sum-of-norms fit stitches the sign-corrected
//! local solutions into one global set of locations.

use crate::graph::{connected_components, LocationSet, MeasurementGraph};
use crate::linalg;
use crate::operators::CostOperators;
use crate::rigidity;
use crate::rng::derive_seed;
use crate::sdr::{adm_solve, SdrConfig, SdrError};
use crate::Formation;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reweighting floor of the stitching solver.
const STITCH_DELTA: f64 = 1e-8;
const STITCH_MAX_SWEEPS: usize = 5000;
const STITCH_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DistributedError {
    #[error("input graph must be connected")]
    Disconnected,
    #[error("patch size bound must be at least d + 2 = {min}, got {got}")]
    PatchBoundTooSmall { min: usize, got: usize },
    #[error("all patches are flexible; no rigid components to solve")]
    AllFlexible,
    #[error("patch {0} and {1} registration is degenerate: overlap has no spread")]
    DegenerateRegistration(usize, usize),
    #[error("registration requires an overlap of at least 2 nodes, got {0}")]
    OverlapTooSmall(usize),
    #[error("patch graph is disconnected and empty after taking the largest component")]
    EmptyPatchGraph,
    #[error("stitch solver failed: {0}")]
    Stitch(String),
    #[error("patch solve failed: {0}")]
    PatchSolve(#[from] SdrError),
    #[error("rigidity error: {0}")]
    Rigidity(#[from] rigidity::RigidityError),
    #[error("graph error: {0}")]
    Graph(#[from] crate::graph::GraphError),
}

/// Raw partition into node sets of size at most `n_max`.
#[derive(Debug, Clone)]
pub struct PatchPartition {
    pub patches: Vec<Vec<usize>>,
    /// A non-shrinking spectral split forced the degree-ordered fallback.
    pub used_fallback: bool,
}

/// Pairwise registration between two patches.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairRegistration {
    /// Signed relative scale mapping patch-j coordinates into patch i.
    pub c: f64,
    /// Relative translation.
    pub t: Vec<f64>,
    /// Sign of `c`.
    pub z: i8,
}

/// Patches, their graph, local solutions and synchronization data.
#[derive(Debug, Clone)]
pub struct PatchDecomposition {
    pub d: usize,
    /// Sorted global node ids per patch.
    pub patches: Vec<Vec<usize>>,
    /// Patch-graph edges: `(i, j)` iff the patches share at least 2 nodes.
    pub patch_edges: Vec<(usize, usize)>,
    /// Local coordinate estimates, index-aligned with `patches[i]`.
    pub local_estimates: Vec<LocationSet>,
    /// Synchronized patch signs.
    pub signs: Vec<i8>,
    /// Registration per patch edge, aligned with `patch_edges`.
    pub pairwise: Vec<PairRegistration>,
    /// Nodes of the input graph not covered by any kept patch.
    pub dropped_nodes: Vec<usize>,
    /// Patches removed when the patch graph was disconnected.
    pub dropped_patches: usize,
}

impl PatchDecomposition {
    pub fn covered_nodes(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.patches.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Fiedler-vector bisection of one induced subgraph; returns the two sides
/// as local indices.
fn spectral_bisect(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut deg = vec![0.0f64; n];
    for &(i, j) in edges {
        deg[i] += 1.0;
        deg[j] += 1.0;
    }
    // normalized Laplacian I - D^{-1/2} A D^{-1/2}; isolated nodes keep a
    // unit diagonal and end up on the sign of their (zero) entry
    let mut l = DMatrix::identity(n, n);
    for &(i, j) in edges {
        let w = 1.0 / (deg[i] * deg[j]).sqrt();
        l[(i, j)] -= w;
        l[(j, i)] -= w;
    }
    let (_, vecs) = linalg::sym_eigen(&l);
    let fiedler = vecs.column(1);
    let mut left: Vec<usize> = (0..n).filter(|&v| fiedler[v] >= 0.0).collect();
    let mut right: Vec<usize> = (0..n).filter(|&v| fiedler[v] < 0.0).collect();
    if left.is_empty() || right.is_empty() {
        // sign split failed (constant vector); fall back to a median split
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
        right = order[..n / 2].to_vec();
        left = order[n / 2..].to_vec();
    }
    (left, right)
}

/// Iterative bisection into patches of size at most `n_max`: every oversized
/// part is split spectrally and both sides are extended by their 1-hop
/// neighborhood inside the part, which creates the overlaps the stitching
/// stage needs. A split that fails to shrink falls back to a degree-ordered
/// balanced cut without extension.
pub fn partition_graph(
    n: usize,
    edges: &[(usize, usize)],
    n_max: usize,
) -> Result<PatchPartition, DistributedError> {
    if n_max < 2 {
        return Err(DistributedError::PatchBoundTooSmall { min: 2, got: n_max });
    }
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut queue: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut patches = Vec::new();
    let mut used_fallback = false;
    while let Some(part) = queue.pop() {
        if part.len() <= n_max {
            patches.push(part);
            continue;
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
        let comps = connected_components(part.len(), &local_edges);
        if comps.len() > 1 {
            for c in comps {
                queue.push(c.into_iter().map(|v| part[v]).collect());
            }
            continue;
        }
        let (left, right) = spectral_bisect(part.len(), &local_edges);
        let in_part = |v: usize| local[v] != usize::MAX;
        let extend = |side: &[usize]| -> Vec<usize> {
            let mut set: Vec<bool> = vec![false; n];
            for &v in side {
                set[part[v]] = true;
            }
            for &v in side {
                for &u in &adj[part[v]] {
                    if in_part(u) {
                        set[u] = true;
                    }
                }
            }
            (0..n).filter(|&v| set[v]).collect()
        };
        let mut a = extend(&left);
        let mut b = extend(&right);
        if a.len() >= part.len() || b.len() >= part.len() {
            used_fallback = true;
            log::warn!(
                "spectral split of a {}-node part did not shrink; using degree-ordered cut",
                part.len()
            );
            let mut order = part.clone();
            let deg_of = |v: usize| adj[v].len();
            order.sort_by(|&x, &y| deg_of(y).cmp(&deg_of(x)).then(x.cmp(&y)));
            let half = order.len() / 2;
            a = order[..half].to_vec();
            b = order[half..].to_vec();
            a.sort_unstable();
            b.sort_unstable();
        }
        queue.push(a);
        queue.push(b);
    }
    patches.sort();
    Ok(PatchPartition { patches, used_fallback })
}

/// Reduces raw patches to parallel rigid ones and builds the patch graph:
/// per-patch maximal rigid component extraction, subset removal, removal of
/// patches without any overlap of size >= 2, and (if the patch graph is
/// disconnected) restriction to its largest connected component.
pub fn refine_patches(
    graph: &MeasurementGraph,
    raw: &[Vec<usize>],
    seed: u64,
) -> Result<PatchDecomposition, DistributedError> {
    let d = graph.dim();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for (idx, patch) in raw.iter().enumerate() {
        let (sub, ids) = graph.induced_subgraph(patch);
        if sub.edge_count() == 0 {
            continue;
        }
        let comps = rigidity::extract_max_rigid_components(
            sub.node_count(),
            &sub.edge_pairs(),
            d,
            derive_seed(seed, "refine-rigid", idx as u64),
        )?;
        for comp in comps {
            if comp.len() >= 2 {
                let mut global: Vec<usize> = comp.into_iter().map(|v| ids[v]).collect();
                global.sort_unstable();
                candidates.push(global);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(DistributedError::AllFlexible);
    }
    // subset removal
    let mut keep = vec![true; candidates.len()];
    for a in 0..candidates.len() {
        for b in 0..candidates.len() {
            if a != b
                && keep[a]
                && keep[b]
                && candidates[a].len() <= candidates[b].len()
                && is_subset(&candidates[a], &candidates[b])
                && candidates[a] != candidates[b]
            {
                keep[a] = false;
            }
        }
    }
    let mut patches: Vec<Vec<usize>> =
        candidates.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| p).collect();

    // drop patches with no sufficient overlap, until stable; if nothing
    // overlaps at all, keep the largest candidate and solve it alone
    let fallback_largest = patches
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)))
        .cloned();
    loop {
        if patches.len() <= 1 {
            break;
        }
        let before = patches.len();
        let overlaps: Vec<bool> = (0..patches.len())
            .map(|i| {
                (0..patches.len())
                    .any(|j| i != j && overlap_size(&patches[i], &patches[j]) >= 2)
            })
            .collect();
        patches = patches.into_iter().zip(&overlaps).filter(|(_, &o)| o).map(|(p, _)| p).collect();
        if patches.is_empty() {
            let largest = fallback_largest.expect("candidates were nonempty");
            log::warn!(
                "no patch pair overlaps in >= 2 nodes; keeping only the largest rigid \
                 component ({} nodes)",
                largest.len()
            );
            patches = vec![largest];
            break;
        }
        if patches.len() == before {
            break;
        }
    }

    // patch graph and its connectivity
    let mut patch_edges = Vec::new();
    for i in 0..patches.len() {
        for j in (i + 1)..patches.len() {
            if overlap_size(&patches[i], &patches[j]) >= 2 {
                patch_edges.push((i, j));
            }
        }
    }
    let comps = connected_components(patches.len(), &patch_edges);
    let mut dropped_patches = 0;
    if comps.len() > 1 {
        let largest = comps.iter().max_by_key(|c| c.len()).cloned().unwrap_or_default();
        if largest.is_empty() {
            return Err(DistributedError::EmptyPatchGraph);
        }
        dropped_patches = patches.len() - largest.len();
        log::warn!(
            "patch graph disconnected; keeping largest component ({} of {} patches)",
            largest.len(),
            patches.len()
        );
        let mut newidx = vec![usize::MAX; patches.len()];
        for (k, &p) in largest.iter().enumerate() {
            newidx[p] = k;
        }
        patches = largest.iter().map(|&p| patches[p].clone()).collect();
        patch_edges = patch_edges
            .into_iter()
            .filter(|&(i, j)| newidx[i] != usize::MAX && newidx[j] != usize::MAX)
            .map(|(i, j)| (newidx[i], newidx[j]))
            .collect();
    }

    let covered: std::collections::BTreeSet<usize> =
        patches.iter().flatten().copied().collect();
    let dropped_nodes: Vec<usize> =
        (0..graph.node_count()).filter(|v| !covered.contains(v)).collect();

    Ok(PatchDecomposition {
        d,
        patches,
        patch_edges,
        local_estimates: Vec::new(),
        signs: Vec::new(),
        pairwise: Vec::new(),
        dropped_nodes,
        dropped_patches,
    })
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

fn overlap_size(a: &[usize], b: &[usize]) -> usize {
    let mut count = 0;
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

fn overlap_indices(a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push((x, y));
                x += 1;
                y += 1;
            }
        }
    }
    out
}

/// Closed-form least-squares registration of patch `j` coordinates into
/// patch `i` over their shared nodes: returns `(c, t, sign(c))` minimizing
/// `sum_k |est_i_k - (c est_j_k + t)|^2`.
pub fn register_pair(
    est_i: &LocationSet,
    est_j: &LocationSet,
    overlap: &[(usize, usize)],
) -> Result<(f64, DVector<f64>, i8), DistributedError> {
    if overlap.len() < 2 {
        return Err(DistributedError::OverlapTooSmall(overlap.len()));
    }
    let d = est_i.dim();
    let k = overlap.len() as f64;
    let mut mean_i = DVector::zeros(d);
    let mut mean_j = DVector::zeros(d);
    for &(a, b) in overlap {
        mean_i += est_i.point(a);
        mean_j += est_j.point(b);
    }
    mean_i /= k;
    mean_j /= k;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(a, b) in overlap {
        let ci = est_i.point(a) - &mean_i;
        let cj = est_j.point(b) - &mean_j;
        num += ci.dot(&cj);
        den += cj.norm_squared();
    }
    if den < 1e-24 {
        return Err(DistributedError::DegenerateRegistration(0, 0));
    }
    let c = num / den;
    let t = &mean_i - &mean_j * c;
    let z = if c >= 0.0 { 1 } else { -1 };
    Ok((c, t, z))
}

/// Z2 synchronization of patch signs from relative sign estimates: the
/// leading eigenvector of the sign matrix, thresholded entrywise. Zero
/// entries are broken to +1 with a warning. The output is determined up to
/// one global flip; the first patch is normalized to +1.
pub fn sync_signs(
    num_patches: usize,
    patch_edges: &[(usize, usize)],
    z_pairs: &[i8],
) -> Result<Vec<i8>, DistributedError> {
    if num_patches == 0 {
        return Err(DistributedError::EmptyPatchGraph);
    }
    if connected_components(num_patches, patch_edges).len() > 1 {
        return Err(DistributedError::Disconnected);
    }
    let mut zmat = DMatrix::zeros(num_patches, num_patches);
    for (e, &(i, j)) in patch_edges.iter().enumerate() {
        zmat[(i, j)] = f64::from(z_pairs[e]);
        zmat[(j, i)] = f64::from(z_pairs[e]);
    }
    let (vals, vecs) = linalg::sym_eigen(&zmat);
    let lead = vecs.column(vals.len() - 1);
    let mut signs: Vec<i8> = (0..num_patches)
        .map(|i| {
            if lead[i] == 0.0 {
                log::warn!("sign synchronization: zero eigenvector entry at patch {i}; using +1");
                1
            } else if lead[i] > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    if signs[0] < 0 {
        for s in &mut signs {
            *s = -*s;
        }
    }
    Ok(signs)
}

/// Stitching result: global locations over the covered nodes.
#[derive(Debug, Clone)]
pub struct StitchResult {
    pub locations: LocationSet,
    /// Global node ids, aligned with `locations`.
    pub covered_nodes: Vec<usize>,
    /// Final sum-of-norms objective.
    pub objective: f64,
    pub sweeps: usize,
    /// Scales per patch (all >= 1).
    pub scales: Vec<f64>,
}

/// Solves the sum-of-norms stitching program
/// `min sum_i sum_{k in P_i} | t_k - (c^i z^i that^i_k + t^i) |` with
/// `c^i >= 1`, by iteratively reweighted least squares: each sweep solves
/// the weighted quadratic jointly in the locations and patch translations
/// (one small positive system per coordinate), then updates every scale in
/// closed form projected onto `[1, inf)`.
pub fn stitch(decomp: &PatchDecomposition) -> Result<StitchResult, DistributedError> {
    let d = decomp.d;
    let npatch = decomp.patches.len();
    if npatch == 0 {
        return Err(DistributedError::EmptyPatchGraph);
    }
    let covered = decomp.covered_nodes();
    let node_index: std::collections::BTreeMap<usize, usize> =
        covered.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let n = covered.len();

    // sign-corrected local coordinates
    let corrected: Vec<Vec<DVector<f64>>> = (0..npatch)
        .map(|i| {
            let s = f64::from(decomp.signs[i]);
            decomp.local_estimates[i].points().iter().map(|p| p * s).collect()
        })
        .collect();

    // initial gauge per patch from a spanning tree of registrations over the
    // sign-corrected locals
    let mut scale = vec![f64::NAN; npatch];
    let mut shift: Vec<DVector<f64>> = vec![DVector::zeros(d); npatch];
    scale[0] = 1.0;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); npatch];
    for (e, &(i, j)) in decomp.patch_edges.iter().enumerate() {
        let _ = e;
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if !scale[j].is_nan() {
                continue;
            }
            let ov = overlap_indices(&decomp.patches[i], &decomp.patches[j]);
            let est_i = LocationSet::new(d, corrected[i].clone())?;
            let est_j = LocationSet::new(d, corrected[j].clone())?;
            if let Ok((c, t, _)) = register_pair(&est_i, &est_j, &ov) {
                scale[j] = scale[i] * c;
                shift[j] = &shift[i] + &t * scale[i];
                stack.push(j);
            }
        }
    }
    let usable = scale.iter().all(|s| s.is_finite()) && scale.iter().all(|&s| s > 1e-12);
    if !usable {
        // signs or registrations were unreliable; start from the identity
        for i in 0..npatch {
            scale[i] = 1.0;
            shift[i] = DVector::zeros(d);
        }
    } else {
        let smin = scale.iter().cloned().fold(f64::INFINITY, f64::min);
        for i in 0..npatch {
            scale[i] /= smin;
            shift[i] /= smin;
        }
    }

    // membership lists: node -> (patch, local index)
    let mut members: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, patch) in decomp.patches.iter().enumerate() {
        for (local, &g) in patch.iter().enumerate() {
            members[node_index[&g]].push((i, local));
        }
    }

    // initial global locations: average of patch predictions
    let mut locations: Vec<DVector<f64>> = (0..n)
        .map(|k| {
            let mut acc = DVector::zeros(d);
            for &(i, local) in &members[k] {
                acc += &corrected[i][local] * scale[i] + &shift[i];
            }
            acc / members[k].len() as f64
        })
        .collect();

    let objective = |locations: &[DVector<f64>], scale: &[f64], shift: &[DVector<f64>]| -> f64 {
        let mut obj = 0.0;
        for (i, patch) in decomp.patches.iter().enumerate() {
            for (local, &g) in patch.iter().enumerate() {
                let r = &locations[node_index[&g]] - &(&corrected[i][local] * scale[i] + &shift[i]);
                obj += r.norm();
            }
        }
        obj
    };

    let mut prev_obj = objective(&locations, &scale, &shift);
    let mut sweeps = 0;
    for sweep in 0..STITCH_MAX_SWEEPS {
        sweeps = sweep + 1;
        // weights from current residuals
        let mut weights: Vec<Vec<f64>> = Vec::with_capacity(npatch);
        for (i, patch) in decomp.patches.iter().enumerate() {
            let w = patch
                .iter()
                .enumerate()
                .map(|(local, &g)| {
                    let r = &locations[node_index[&g]]
                        - &(&corrected[i][local] * scale[i] + &shift[i]);
                    1.0 / r.norm().max(STITCH_DELTA)
                })
                .collect();
            weights.push(w);
        }

        // joint weighted solve in (t_k, t^i) with scales fixed; patch 0's
        // translation is pinned to remove the global translation gauge.
        // Eliminating t_k gives a small SPD system in the free translations.
        let mut w_node = vec![0.0f64; n];
        for (i, patch) in decomp.patches.iter().enumerate() {
            for (local, &g) in patch.iter().enumerate() {
                w_node[node_index[&g]] += weights[i][local];
            }
        }
        let free = npatch - 1; // t^0 = 0
        let mut a = DMatrix::<f64>::zeros(free, free);
        let mut rhs = DMatrix::<f64>::zeros(free, d);
        // A_ij = delta_ij sum_k w_ik - sum_k w_ik w_jk / W_k
        // rhs_i = sum_k w_ik [ (sum_j w_jk c^j s_jk) / W_k - c^i s_ik ]
        let mut node_cs: Vec<DVector<f64>> = vec![DVector::zeros(d); n];
        for (i, patch) in decomp.patches.iter().enumerate() {
            for (local, &g) in patch.iter().enumerate() {
                let k = node_index[&g];
                node_cs[k] += &corrected[i][local] * (scale[i] * weights[i][local]);
            }
        }
        for (i, patch) in decomp.patches.iter().enumerate() {
            for (local, &g) in patch.iter().enumerate() {
                let k = node_index[&g];
                let wik = weights[i][local];
                if i > 0 {
                    a[(i - 1, i - 1)] += wik;
                    let pred = &node_cs[k] / w_node[k] - &corrected[i][local] * scale[i];
                    for c in 0..d {
                        rhs[(i - 1, c)] += wik * pred[c];
                    }
                }
                for &(jp, _jl) in &members[k] {
                    if i > 0 && jp > 0 {
                        let wjk = weights[jp][members[k]
                            .iter()
                            .find(|&&(p, _)| p == jp)
                            .map(|&(_, l)| l)
                            .unwrap()];
                        a[(i - 1, jp - 1)] -= wik * wjk / w_node[k];
                    }
                }
            }
        }
        // tiny ridge guards near-singular systems when weights collapse
        for i in 0..free {
            a[(i, i)] += 1e-12;
        }
        let solved = a
            .clone()
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .or_else(|| a.clone().lu().solve(&rhs))
            .ok_or_else(|| DistributedError::Stitch("translation system is singular".into()))?;
        for i in 1..npatch {
            for c in 0..d {
                shift[i][c] = solved[(i - 1, c)];
            }
        }
        shift[0].fill(0.0);
        // recover node locations from the weighted means
        for k in 0..n {
            let mut acc = node_cs[k].clone();
            for &(i, local) in &members[k] {
                acc += &shift[i] * weights[i][local];
            }
            locations[k] = acc / w_node[k];
        }

        // closed-form scale update, projected onto c >= 1
        for (i, patch) in decomp.patches.iter().enumerate() {
            let mut num = 0.0;
            let mut den = 0.0;
            for (local, &g) in patch.iter().enumerate() {
                let w = weights[i][local];
                let s = &corrected[i][local];
                let diff = &locations[node_index[&g]] - &shift[i];
                num += w * s.dot(&diff);
                den += w * s.norm_squared();
            }
            if den > 1e-24 {
                scale[i] = (num / den).max(1.0);
            } else {
                scale[i] = 1.0;
            }
        }

        let obj = objective(&locations, &scale, &shift);
        if (prev_obj - obj).abs() <= STITCH_REL_TOL * prev_obj.max(1e-300) {
            prev_obj = obj;
            break;
        }
        prev_obj = obj;
    }

    Ok(StitchResult {
        locations: LocationSet::new(d, locations)?,
        covered_nodes: covered,
        objective: prev_obj,
        sweeps,
        scales: scale,
    })
}

/// Report of the distributed pipeline.
#[derive(Debug, Clone)]
pub struct DistributedSolution {
    pub locations: LocationSet,
    pub covered_nodes: Vec<usize>,
    pub patches: Vec<Vec<usize>>,
    pub patch_spectral_gaps: Vec<f64>,
    pub patch_iters: Vec<usize>,
    pub dropped_nodes: Vec<usize>,
    pub dropped_patches: usize,
    pub stitch_objective: f64,
    pub stitch_sweeps: usize,
    /// Wall-clock seconds per stage: partition, refine, solve, register,
    /// sync, stitch.
    pub stage_seconds: [f64; 6],
    pub used_partition_fallback: bool,
}

impl DistributedSolution {
    pub fn mean_spectral_gap(&self) -> f64 {
        if self.patch_spectral_gaps.is_empty() {
            0.0
        } else {
            self.patch_spectral_gaps.iter().sum::<f64>() / self.patch_spectral_gaps.len() as f64
        }
    }
}

/// Full pipeline: partition, refine to rigid patches, solve every patch
/// (in parallel), register overlapping pairs, synchronize signs, stitch.
pub fn solve_distributed(
    graph: &MeasurementGraph,
    cfg: &SdrConfig,
    n_max: usize,
    seed: u64,
) -> Result<DistributedSolution, DistributedError> {
    let d = graph.dim();
    if n_max < d + 2 {
        return Err(DistributedError::PatchBoundTooSmall { min: d + 2, got: n_max });
    }
    if !graph.is_connected() {
        return Err(DistributedError::Disconnected);
    }
    let mut stage_seconds = [0.0f64; 6];
    let clock = std::time::Instant::now;

    let t0 = clock();
    let partition = partition_graph(graph.node_count(), &graph.edge_pairs(), n_max)?;
    stage_seconds[0] = t0.elapsed().as_secs_f64();

    let t1 = clock();
    let mut decomp = refine_patches(graph, &partition.patches, seed)?;
    stage_seconds[1] = t1.elapsed().as_secs_f64();

    let t2 = clock();
    let solves: Result<Vec<_>, DistributedError> = decomp
        .patches
        .par_iter()
        .enumerate()
        .map(|(i, patch)| {
            let (sub, _ids) = graph.induced_subgraph(patch);
            let ops = CostOperators::build(&Formation::from_graph(sub));
            let sol = adm_solve(&ops, cfg, derive_seed(seed, "patch-solve", i as u64))?;
            Ok((sol.rounded, sol.spectral_gap, sol.iters))
        })
        .collect();
    let solves = solves?;
    decomp.local_estimates = solves.iter().map(|(l, _, _)| l.clone()).collect();
    let patch_spectral_gaps: Vec<f64> = solves.iter().map(|&(_, g, _)| g).collect();
    let patch_iters: Vec<usize> = solves.iter().map(|&(_, _, it)| it).collect();
    stage_seconds[2] = t2.elapsed().as_secs_f64();

    let t3 = clock();
    let mut pairwise = Vec::with_capacity(decomp.patch_edges.len());
    let mut z_pairs = Vec::with_capacity(decomp.patch_edges.len());
    for &(i, j) in &decomp.patch_edges {
        let ov = overlap_indices(&decomp.patches[i], &decomp.patches[j]);
        let (c, t, z) =
            register_pair(&decomp.local_estimates[i], &decomp.local_estimates[j], &ov)
                .map_err(|_| DistributedError::DegenerateRegistration(i, j))?;
        pairwise.push(PairRegistration { c, t: t.iter().copied().collect(), z });
        z_pairs.push(z);
    }
    decomp.pairwise = pairwise;
    stage_seconds[3] = t3.elapsed().as_secs_f64();

    let t4 = clock();
    decomp.signs = if decomp.patches.len() == 1 {
        vec![1]
    } else {
        sync_signs(decomp.patches.len(), &decomp.patch_edges, &z_pairs)?
    };
    stage_seconds[4] = t4.elapsed().as_secs_f64();

    let t5 = clock();
    let stitched = stitch(&decomp)?;
    stage_seconds[5] = t5.elapsed().as_secs_f64();

    Ok(DistributedSolution {
        locations: stitched.locations,
        covered_nodes: stitched.covered_nodes,
        patches: decomp.patches,
        patch_spectral_gaps,
        patch_iters,
        dropped_nodes: decomp.dropped_nodes,
        dropped_patches: decomp.dropped_patches,
        stitch_objective: stitched.objective,
        stitch_sweeps: stitched.sweeps,
        stage_seconds,
        used_partition_fallback: partition.used_fallback,
    })
}
