//! Estimation of `n` locations in `R^d` (up to global translation, scale and
//! negation) from noisy measurements of unsigned pairwise lines.
//!
//! The crate is organized around a small pipeline:
//!
//! * [`graph`] — the measurement-graph data model: unit line directions per
//!   edge, the rank-1 projectors they induce, and the JSON dataset format.
//! * [`operators`] — the quadratic cost Laplacian and the per-edge constraint
//!   operators shared by all solvers.
//! * [`rigidity`] — generic parallel rigidity testing (randomized rank test
//!   plus a combinatorial certificate search for small graphs) and maximal
//!   rigid component extraction, which gate well-posedness.
//! * [`sdr`] — the semidefinite relaxation of the location estimation
//!   problem, solved by a specialized alternating-direction augmented
//!   Lagrangian method, with deterministic rounding, spectral-gap
//!   diagnostics, a least-squares baseline and stability bounds.
//! * [`distributed`] — divide-and-stitch solving for large graphs: spectral
//!   partitioning into parallel-rigid patches, per-patch solves, Z2 sign
//!   synchronization and global stitching.
//! * [`camera`] — the structure-from-motion front-end: epipolar subspace
//!   samples, robust rotation averaging and robust 2D-subspace line
//!   estimation (S-REAPER).
//! * [`bench`] — synthetic data generation, alignment/NRMSE metrics and the
//!   experiment harness.

pub mod bench;
pub mod camera;
pub mod distributed;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod rigidity;
pub mod rng;
pub mod sdr;

pub use graph::{Formation, GraphError, LocationSet, MeasurementGraph};
pub use operators::CostOperators;


