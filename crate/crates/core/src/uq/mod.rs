//! Output statistics from model evaluations: projection and regression
//! polynomial chaos, stochastic collocation and Monte Carlo.

mod driver;
mod mc;
mod nipc;
mod sc;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

pub use driver::{run_method, Method, RunOutcome, RunSpec};
pub use mc::{monte_carlo, sample_inputs};
pub use nipc::{moments_from_pce, nipc_integration, nipc_regression, PceCoefficients, RegressionFit};
pub use sc::{sc_build, SurrogateSC};

use crate::amtc::AmtcError;
use crate::basis::BasisError;
use crate::engine::{DomainError, EngineError};
use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UqError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Amtc(#[from] AmtcError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("regression needs at least {needed} points (got {got})")]
    Underdetermined { needed: usize, got: usize },
    #[error("regression design matrix has rank {rank} < {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("Monte Carlo needs at least 2 samples (got {0})")]
    TooFewSamples(usize),
    #[error("model has no output named `{0}`")]
    UnknownOutput(String),
    #[error("model declares no outputs")]
    NoOutputs,
}

impl From<DomainError> for UqError {
    fn from(e: DomainError) -> Self {
        Self::Engine(EngineError::Domain(e))
    }
}

/// Summary statistics of one output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UqResult {
    pub method: String,
    pub mean: f64,
    pub stddev: f64,
    pub n_model_points: usize,
    pub details: Map<String, Value>,
}

/// Mean and sample standard deviation (`n - 1` divisor), two passes in index order.
pub fn sample_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Name of output `qoi`, or of the first declared output.
pub fn resolve_qoi(graph: &crate::graph::Graph, qoi: Option<&str>) -> Result<String, UqError> {
    match qoi {
        Some(name) => graph
            .output(name)
            .map(|o| o.name.clone())
            .ok_or_else(|| UqError::UnknownOutput(name.to_string())),
        None => graph
            .outputs()
            .first()
            .map(|o| o.name.clone())
            .ok_or(UqError::NoOutputs),
    }
}
