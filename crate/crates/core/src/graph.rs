//! Measurement-graph data model: nodes, unsigned unit line directions per
//! edge, the rank-1 projectors they induce, and the JSON dataset format.
//!
//! An edge `(i, j)` carries a single unit vector `gamma` whose sign is
//! arbitrary; the observable object is the projector `gamma * gamma^T`, which
//! is invariant under negation. Edges are stored with `i < j` and callers
//! needing the `(j, i)` direction use the same vector.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unit-norm tolerance enforced on stored line directions.
pub const GAMMA_NORM_TOL: f64 = 1e-12;
/// Deviation from unit norm above which loading a dataset warns.
pub const GAMMA_LOAD_WARN_TOL: f64 = 1e-6;
/// Edges between locations closer than this are rejected as degenerate.
pub const DEGENERATE_EDGE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("ambient dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("edge ({i}, {j}) out of range for {n} nodes")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({i}, {j}): direction has dimension {got}, expected {expected}")]
    GammaDimension { i: usize, j: usize, got: usize, expected: usize },
    #[error("edge ({i}, {j}): direction is zero or not normalizable")]
    GammaNotNormalizable { i: usize, j: usize },
    #[error("line direction must be unit norm, |gamma| = {0}")]
    NotUnit(f64),
    #[error("degenerate edge ({i}, {j}): locations coincide (distance {dist:.3e})")]
    DegenerateEdge { i: usize, j: usize, dist: f64 },
    #[error("location count mismatch: expected {expected}, got {got}")]
    LocationCount { expected: usize, got: usize },
    #[error("invalid dataset: {0}")]
    Dataset(String),
}

/// An undirected measurement edge `i < j` with its unsigned unit direction.
#[derive(Debug, Clone)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub gamma: DVector<f64>,
}

/// Graph of pairwise line measurements in `R^d`.
#[derive(Debug, Clone)]
pub struct MeasurementGraph {
    d: usize,
    n: usize,
    edges: Vec<Edge>,
}

impl MeasurementGraph {
    /// Builds a validated graph. Edge endpoints may be given in either
    /// order; they are canonicalized to `i < j` (direction sign is
    /// immaterial).
    pub fn new(
        d: usize,
        n: usize,
        edges: Vec<(usize, usize, DVector<f64>)>,
    ) -> Result<Self, GraphError> {
        if d < 2 {
            return Err(GraphError::BadDimension(d));
        }
        let mut canon: Vec<Edge> = Vec::with_capacity(edges.len());
        for (i, j, gamma) in edges {
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if i >= n || j >= n {
                return Err(GraphError::EdgeOutOfRange { i, j, n });
            }
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            if gamma.len() != d {
                return Err(GraphError::GammaDimension { i, j, got: gamma.len(), expected: d });
            }
            let nrm = gamma.norm();
            if (nrm - 1.0).abs() > GAMMA_NORM_TOL {
                return Err(GraphError::NotUnit(nrm));
            }
            canon.push(Edge { i, j, gamma });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        for w in canon.windows(2) {
            if w[0].i == w[1].i && w[0].j == w[1].j {
                return Err(GraphError::DuplicateEdge(w[0].i, w[0].j));
            }
        }
        Ok(Self { d, n, edges: canon })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge endpoint pairs, in storage order.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.i, e.j)).collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self.n, &self.edge_pairs()).len() == 1
    }

    /// Subgraph induced by `nodes` (global ids, any order). Returns the
    /// subgraph over local indices `0..nodes.len()` together with the sorted
    /// global ids those indices refer to.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> (MeasurementGraph, Vec<usize>) {
        let mut sorted: Vec<usize> = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (k, &g) in sorted.iter().enumerate() {
            local[g] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.i] != usize::MAX && local[e.j] != usize::MAX)
            .map(|e| Edge { i: local[e.i], j: local[e.j], gamma: e.gamma.clone() })
            .collect();
        (
            MeasurementGraph { d: self.d, n: sorted.len(), edges },
            sorted,
        )
    }

    /// Parses the JSON dataset format. Directions are normalized on load; a
    /// deviation from unit norm above `1e-6` logs a warning.
    pub fn from_json_str(s: &str) -> Result<(Self, Option<LocationSet>), GraphError> {
        let wire: DatasetWire =
            serde_json::from_str(s).map_err(|e| GraphError::Dataset(e.to_string()))?;
        let mut edges = Vec::with_capacity(wire.edges.len());
        for ew in &wire.edges {
            if ew.gamma.len() != wire.d {
                return Err(GraphError::GammaDimension {
                    i: ew.i,
                    j: ew.j,
                    got: ew.gamma.len(),
                    expected: wire.d,
                });
            }
            let mut g = DVector::from_column_slice(&ew.gamma);
            let nrm = g.norm();
            if !nrm.is_finite() || nrm < GAMMA_NORM_TOL {
                return Err(GraphError::GammaNotNormalizable { i: ew.i, j: ew.j });
            }
            if (nrm - 1.0).abs() > GAMMA_LOAD_WARN_TOL {
                log::warn!(
                    "edge ({}, {}): |gamma| = {:.9} deviates from 1 by more than {:.0e}; normalizing",
                    ew.i, ew.j, nrm, GAMMA_LOAD_WARN_TOL
                );
            }
            g /= nrm;
            edges.push((ew.i, ew.j, g));
        }
        let graph = Self::new(wire.d, wire.n, edges)?;
        let truth = match wire.ground_truth {
            None => None,
            Some(rows) => Some(LocationSet::from_rows(wire.d, &rows)?),
        };
        if let Some(t) = &truth {
            if t.len() != wire.n {
                return Err(GraphError::LocationCount { expected: wire.n, got: t.len() });
            }
        }
        Ok((graph, truth))
    }

    pub fn to_json_string(&self, truth: Option<&LocationSet>) -> String {
        let wire = DatasetWire {
            d: self.d,
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeWire { i: e.i, j: e.j, gamma: e.gamma.iter().copied().collect() })
                .collect(),
            ground_truth: truth.map(|t| t.to_rows()),
        };
        serde_json::to_string_pretty(&wire).expect("dataset serialization")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetWire {
    d: usize,
    n: usize,
    edges: Vec<EdgeWire>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_truth: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeWire {
    i: usize,
    j: usize,
    gamma: Vec<f64>,
}

/// Connected components of a node set `0..n` under an edge list; each
/// component is sorted.
pub fn connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// A set of `n` points in `R^d` (ground truth or estimates).
#[derive(Debug, Clone)]
pub struct LocationSet {
    d: usize,
    points: Vec<DVector<f64>>,
}

impl LocationSet {
    pub fn new(d: usize, points: Vec<DVector<f64>>) -> Result<Self, GraphError> {
        if d < 2 {
            return Err(GraphError::BadDimension(d));
        }
        for p in &points {
            if p.len() != d {
                return Err(GraphError::Dataset(format!(
                    "location has dimension {}, expected {}",
                    p.len(),
                    d
                )));
            }
        }
        Ok(Self { d, points })
    }

    pub fn from_rows(d: usize, rows: &[Vec<f64>]) -> Result<Self, GraphError> {
        Self::new(d, rows.iter().map(|r| DVector::from_column_slice(r)).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.iter().copied().collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &DVector<f64> {
        &self.points[i]
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// Concatenation of the points into a single `dn` vector.
    pub fn stacked(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.d * self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            v.rows_mut(i * self.d, self.d).copy_from(p);
        }
        v
    }

    pub fn from_stacked(d: usize, v: &DVector<f64>) -> Result<Self, GraphError> {
        if v.len() % d != 0 {
            return Err(GraphError::Dataset(format!(
                "stacked vector of length {} is not a multiple of d = {}",
                v.len(),
                d
            )));
        }
        let n = v.len() / d;
        let points = (0..n).map(|i| v.rows(i * d, d).into_owned()).collect();
        Self::new(d, points)
    }

    pub fn centroid(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.d);
        for p in &self.points {
            c += p;
        }
        c / self.points.len() as f64
    }

    /// Centered copy (centroid at the origin).
    pub fn centered(&self) -> LocationSet {
        let c = self.centroid();
        LocationSet {
            d: self.d,
            points: self.points.iter().map(|p| p - &c).collect(),
        }
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.min((&self.points[i] - &self.points[j]).norm());
            }
        }
        best
    }
}

/// The rank-1 projector `gamma * gamma^T` of a unit direction.
pub fn line_projection(gamma: &DVector<f64>) -> Result<DMatrix<f64>, GraphError> {
    let nrm = gamma.norm();
    if (nrm - 1.0).abs() > 1e-9 {
        return Err(GraphError::NotUnit(nrm));
    }
    Ok(gamma * gamma.transpose())
}

/// A measurement graph together with the per-edge projectors `Gamma_ij`.
#[derive(Debug, Clone)]
pub struct Formation {
    graph: MeasurementGraph,
    projections: Vec<DMatrix<f64>>,
}

impl Formation {
    /// Formation induced by the measured directions of `graph`.
    pub fn from_graph(graph: MeasurementGraph) -> Self {
        let projections = graph
            .edges
            .iter()
            .map(|e| &e.gamma * e.gamma.transpose())
            .collect();
        Self { graph, projections }
    }

    /// Noiseless formation of a point set over the given edges. Rejects
    /// edges whose endpoints (nearly) coincide.
    pub fn from_locations(
        locs: &LocationSet,
        edge_list: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        let d = locs.dim();
        let n = locs.len();
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(i, j) in edge_list {
            if i >= n || j >= n {
                return Err(GraphError::EdgeOutOfRange { i, j, n });
            }
            let diff = locs.point(i) - locs.point(j);
            let dist = diff.norm();
            if dist < DEGENERATE_EDGE_TOL {
                return Err(GraphError::DegenerateEdge { i, j, dist });
            }
            edges.push((i, j, diff / dist));
        }
        let graph = MeasurementGraph::new(d, n, edges)?;
        Ok(Self::from_graph(graph))
    }

    pub fn graph(&self) -> &MeasurementGraph {
        &self.graph
    }

    /// Projector `Gamma` of the `e`-th edge.
    pub fn gamma(&self, e: usize) -> &DMatrix<f64> {
        &self.projections[e]
    }

    /// Orthogonal-complement projector `Q = I - Gamma` of the `e`-th edge.
    pub fn q(&self, e: usize) -> DMatrix<f64> {
        DMatrix::identity(self.graph.d, self.graph.d) - &self.projections[e]
    }
}
