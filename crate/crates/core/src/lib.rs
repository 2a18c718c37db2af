//! Random geometric graph functionals, weighted Euclidean optimization
//! functionals, and Monte Carlo estimation of their limit constants.
//!
//! The crate is organized bottom-up:
//!
//! * [`pointproc`] samples binomial, Poisson and homogeneous point processes.
//! * [`geograph`] builds `G(X, r)` and exposes components, isolated vertices
//!   and boundary sets.
//! * [`invariants`] holds exact and heuristic solvers for the graph
//!   parameters together with the functional registry.
//! * [`euclid_opt`] implements weight functions and TSP, matching,
//!   bipartite matching and MST functionals.
//! * [`estimators`] runs Monte Carlo estimators and deterministic density
//!   constructions.
//! * [`propharness`] checks the structural properties on random instances.

pub mod error;
pub mod estimators;
pub mod euclid_opt;
pub mod geograph;
pub mod invariants;
pub mod lattice;
pub mod pointproc;
pub mod propharness;
pub mod rng;

pub use error::{Error, Result};
pub use geograph::GeometricGraph;
pub use pointproc::{Distribution, PointSet};
