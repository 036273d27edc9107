//! Uncertainty propagation on tensor-product quadrature grids with
//! dependency-aware graph evaluation.
//!
//! Models are written in a small expression language ([`dsl`]), lowered to a
//! bipartite computational graph ([`graph`]), optionally rewritten so each
//! operation only runs on the inputs it depends on ([`amtc`]), evaluated on a
//! full Gauss grid ([`engine`], [`quadrature`]) and post-processed into output
//! statistics ([`uq`]).

pub mod amtc;
pub mod basis;
pub mod distribution;
pub mod dsl;
pub mod engine;
pub mod graph;
pub mod quadrature;
pub mod signature;
pub mod uq;

pub use distribution::{Distribution, PolyFamily};
pub use graph::{Graph, OpId, VarId};
pub use signature::DependencySignature;
