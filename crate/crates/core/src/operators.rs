//! Quadratic-cost Laplacian and per-edge constraint operators.
//!
//! For a formation with projectors `Q_ij = I - Gamma_ij`, the cost matrix
//! `L` is the `dn x dn` block Laplacian with `-Q_ij` off the diagonal and
//! `sum_k Q_ik` on it, so that `Tr(L T) = sum_ij Tr(Q_ij (t_i - t_j)(t_i -
//! t_j)^T)` for `T = t t^T`. Each edge also defines the constraint operator
//! `C^{ij}` with `Tr(C^{ij} T) = |t_i - t_j|^2`; the rank-`d` centering
//! operator `H = J_n (x) I_d` is kept implicit.

use crate::graph::Formation;
use nalgebra::{DMatrix, DVector};

/// Node count up to which the Laplacian is materialized densely. Beyond it a
/// block-sparse form is kept and densified only on demand.
pub const DENSE_NODE_LIMIT: usize = 512;

#[derive(Debug, Clone)]
enum Laplacian {
    Dense(DMatrix<f64>),
    /// Diagonal blocks plus `-Q` blocks per edge, in edge order.
    BlockSparse {
        diag: Vec<DMatrix<f64>>,
        off: Vec<DMatrix<f64>>,
    },
}

/// The cost Laplacian and constraint-edge index map of a formation.
#[derive(Debug, Clone)]
pub struct CostOperators {
    d: usize,
    n: usize,
    edges: Vec<(usize, usize)>,
    laplacian: Laplacian,
    laplacian_frob: f64,
}

impl CostOperators {
    pub fn build(f: &Formation) -> Self {
        let d = f.graph().dim();
        let n = f.graph().node_count();
        let edges = f.graph().edge_pairs();
        let qs: Vec<DMatrix<f64>> = (0..edges.len()).map(|e| f.q(e)).collect();

        let mut diag = vec![DMatrix::<f64>::zeros(d, d); n];
        for (e, &(i, j)) in edges.iter().enumerate() {
            diag[i] += &qs[e];
            diag[j] += &qs[e];
        }

        let laplacian = if n <= DENSE_NODE_LIMIT {
            let mut l = DMatrix::zeros(d * n, d * n);
            for (i, b) in diag.iter().enumerate() {
                l.view_mut((i * d, i * d), (d, d)).copy_from(b);
            }
            for (e, &(i, j)) in edges.iter().enumerate() {
                let neg = -&qs[e];
                l.view_mut((i * d, j * d), (d, d)).copy_from(&neg);
                l.view_mut((j * d, i * d), (d, d)).copy_from(&neg);
            }
            Laplacian::Dense(l)
        } else {
            Laplacian::BlockSparse { diag, off: qs }
        };

        let mut ops = Self { d, n, edges, laplacian, laplacian_frob: 0.0 };
        ops.laplacian_frob = match &ops.laplacian {
            Laplacian::Dense(l) => l.norm(),
            Laplacian::BlockSparse { diag, off } => {
                let mut s = 0.0;
                for b in diag {
                    s += b.norm_squared();
                }
                for q in off {
                    s += 2.0 * q.norm_squared();
                }
                s.sqrt()
            }
        };
        ops
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

    /// Constraint edge index map: the `l`-th constraint operator `C^l`
    /// belongs to this endpoint pair.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn laplacian_frob_norm(&self) -> f64 {
        self.laplacian_frob
    }

    /// The Laplacian as a dense matrix (materialized if stored sparse).
    pub fn laplacian_dense(&self) -> DMatrix<f64> {
        match &self.laplacian {
            Laplacian::Dense(l) => l.clone(),
            Laplacian::BlockSparse { diag, off } => {
                let (d, n) = (self.d, self.n);
                let mut l = DMatrix::zeros(d * n, d * n);
                for (i, b) in diag.iter().enumerate() {
                    l.view_mut((i * d, i * d), (d, d)).copy_from(b);
                }
                for (e, &(i, j)) in self.edges.iter().enumerate() {
                    let neg = -&off[e];
                    l.view_mut((i * d, j * d), (d, d)).copy_from(&neg);
                    l.view_mut((j * d, i * d), (d, d)).copy_from(&neg);
                }
                l
            }
        }
    }

    /// `L v` for a stacked vector `v`.
    pub fn apply_laplacian(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.laplacian {
            Laplacian::Dense(l) => l * v,
            Laplacian::BlockSparse { diag, off } => {
                let d = self.d;
                let mut out = DVector::zeros(v.len());
                for (i, b) in diag.iter().enumerate() {
                    let vi = v.rows(i * d, d);
                    out.rows_mut(i * d, d).copy_from(&(b * vi));
                }
                for (e, &(i, j)) in self.edges.iter().enumerate() {
                    let qvj = &off[e] * v.rows(j * d, d);
                    let qvi = &off[e] * v.rows(i * d, d);
                    let mut oi = out.rows_mut(i * d, d);
                    oi -= qvj;
                    let mut oj = out.rows_mut(j * d, d);
                    oj -= qvi;
                }
                out
            }
        }
    }

    /// `Tr(L T)` for a symmetric `dn x dn` matrix `T`.
    pub fn trace_laplacian_product(&self, t: &DMatrix<f64>) -> f64 {
        match &self.laplacian {
            Laplacian::Dense(l) => l.dot(t),
            Laplacian::BlockSparse { diag, off } => {
                let d = self.d;
                let mut s = 0.0;
                for (i, b) in diag.iter().enumerate() {
                    s += b.dot(&t.view((i * d, i * d), (d, d)).into_owned());
                }
                for (e, &(i, j)) in self.edges.iter().enumerate() {
                    s -= 2.0 * off[e].dot(&t.view((i * d, j * d), (d, d)).into_owned());
                }
                s
            }
        }
    }

    /// `Tr(H T)` with `H = J_n (x) I_d`, i.e. the sum over coordinates `a`
    /// of `(1_n (x) e_a)^T T (1_n (x) e_a)`.
    pub fn trace_h(&self, t: &DMatrix<f64>) -> f64 {
        let (d, n) = (self.d, self.n);
        let mut s = 0.0;
        for a in 0..d {
            for i in 0..n {
                for j in 0..n {
                    s += t[(i * d + a, j * d + a)];
                }
            }
        }
        s
    }

    /// The `d` stacked translation directions `1_n (x) e_a`, unnormalized.
    pub fn translation_directions(&self) -> Vec<DVector<f64>> {
        let (d, n) = (self.d, self.n);
        (0..d)
            .map(|a| DVector::from_fn(d * n, |r, _| if r % d == a { 1.0 } else { 0.0 }))
            .collect()
    }
}
