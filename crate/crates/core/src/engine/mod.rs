//! Graph interpreters: full-grid evaluation, signature-aware evaluation of
//! transformed graphs, and single-point evaluation.
//!
//! Cost is accounted in scalar applications of elementary operations, which
//! makes counts machine independent. Expansion copies are tallied
//! separately.

mod kernel;
mod scalar;
mod tensor;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::ThreadPool;
use serde::Serialize;
use thiserror::Error;

pub use kernel::apply;
pub use scalar::{evaluate_single_point, ScalarProgram};
pub use tensor::{expand_tensor, ValueTensor};

use crate::amtc::TransformedGraph;
use crate::graph::{topo_sort, CycleError, Graph, OpId, OpKind, VarKind};
use crate::quadrature::{grid_input_vector, TensorGrid};
use crate::signature::DependencySignature;

/// An elementary operation received an argument outside its domain.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[error("domain error in {op} ({kind}) at point {index}")]
pub struct DomainError {
    pub op: OpId,
    pub kind: &'static str,
    /// Flat index within the operation's evaluation set: the grid point for
    /// full-grid evaluation, the sub-grid point of the operation's signature
    /// for transformed graphs, the sample number for Monte Carlo.
    pub index: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("cannot expand {from} to {to}: not a subset")]
    SignatureNotSubset {
        from: DependencySignature,
        to: DependencySignature,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("grid does not match the graph inputs: {0}")]
    GridMismatch(String),
    #[error("full-grid evaluation cannot run expand operations (found {0})")]
    UnexpectedExpand(OpId),
    #[error("invalid thread count `{0}`")]
    InvalidThreads(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Worker configuration. Results never depend on the thread count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub threads: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { threads: 1 }
    }
}

impl EvalOptions {
    pub const THREADS_ENV: &'static str = "UQC_THREADS";

    /// Reads `UQC_THREADS`; unset means one thread.
    pub fn from_env() -> Result<Self, EngineError> {
        match std::env::var(Self::THREADS_ENV) {
            Err(_) => Ok(Self::default()),
            Ok(s) => match s.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Self { threads: n }),
                _ => Err(EngineError::InvalidThreads(s)),
            },
        }
    }

    fn pool(&self) -> Result<Option<ThreadPool>, EngineError> {
        if self.threads <= 1 {
            return Ok(None);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map(Some)
            .map_err(|e| EngineError::ThreadPool(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvaluationReport {
    /// Every output broadcast to the full grid.
    pub outputs: BTreeMap<String, ValueTensor>,
    /// Scalar evaluations per elementary operation, keyed by operation id.
    pub op_eval_counts: BTreeMap<usize, usize>,
    pub total_scalar_evals: usize,
    pub expansion_copies: usize,
    /// `total_scalar_evals` divided by the operations of one single-point evaluation.
    pub equivalent_model_evals: f64,
    pub wall_time_ms: f64,
}

impl PartialEq for EvaluationReport {
    fn eq(&self, other: &Self) -> bool {
        self.outputs == other.outputs
            && self.op_eval_counts == other.op_eval_counts
            && self.total_scalar_evals == other.total_scalar_evals
            && self.expansion_copies == other.expansion_copies
            && self.equivalent_model_evals == other.equivalent_model_evals
    }
}

impl EvaluationReport {
    pub fn output(&self, name: &str) -> Option<&ValueTensor> {
        self.outputs.get(name)
    }
}

fn check_grid(graph: &Graph, grid: &TensorGrid) -> Result<(), EngineError> {
    if grid.dims() != graph.dimension() {
        return Err(EngineError::GridMismatch(format!(
            "graph has {} uncertain inputs, grid has {} axes",
            graph.dimension(),
            grid.dims()
        )));
    }
    for (j, (u, rule)) in graph.uncertain_inputs().iter().zip(&grid.axes).enumerate() {
        if u.distribution != rule.distribution {
            return Err(EngineError::GridMismatch(format!(
                "axis {j}: graph input follows {}, grid rule {}",
                u.distribution, rule.distribution
            )));
        }
    }
    Ok(())
}

fn equivalent_evals(total: usize, graph: &Graph) -> f64 {
    match graph.elementary_op_count() {
        0 => 0.0,
        n => total as f64 / n as f64,
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Evaluates every operation at every grid point.
pub fn evaluate_naive(
    graph: &Graph,
    grid: &TensorGrid,
    opts: &EvalOptions,
) -> Result<EvaluationReport, EngineError> {
    let start = Instant::now();
    check_grid(graph, grid)?;
    if let Some(op) = graph.operations().iter().find(|o| o.kind.is_expand()) {
        return Err(EngineError::UnexpectedExpand(op.id));
    }
    let order = topo_sort(graph)?;
    let pool = opts.pool()?;
    let n = grid.total_points;

    let mut values: Vec<Option<Vec<f64>>> = vec![None; graph.variables().len()];
    for (axis, u) in graph.uncertain_inputs().iter().enumerate() {
        values[u.var.0] = Some(grid_input_vector(grid, axis).expect("axis checked"));
    }
    for v in graph.variables() {
        if let VarKind::Constant(c) = v.kind {
            values[v.id.0] = Some(vec![c; n]);
        }
    }

    let mut op_eval_counts = BTreeMap::new();
    let mut total = 0;
    for id in order {
        let op = graph.operation(id);
        let arg = |i: usize| values[op.inputs[i].0].as_deref().expect("topological order");
        let b = (op.kind.arity() == 2).then(|| arg(1));
        let out = kernel::run(op.kind, arg(0), b, pool.as_ref()).map_err(|index| DomainError {
            op: id,
            kind: op.kind.name(),
            index,
        })?;
        op_eval_counts.insert(id.0, n);
        total += n;
        values[op.output.0] = Some(out);
    }

    let full = DependencySignature::full(graph.dimension());
    let outputs = graph
        .outputs()
        .iter()
        .map(|o| {
            let data = values[o.var.0].clone().expect("outputs are defined");
            (o.name.clone(), ValueTensor { signature: full, data })
        })
        .collect();
    Ok(EvaluationReport {
        outputs,
        op_eval_counts,
        total_scalar_evals: total,
        expansion_copies: 0,
        equivalent_model_evals: equivalent_evals(total, graph),
        wall_time_ms: elapsed_ms(start),
    })
}

/// Evaluates each operation of a transformed graph only over the sub-grid
/// of its signature.
pub fn evaluate_amtc(
    tg: &TransformedGraph,
    grid: &TensorGrid,
    opts: &EvalOptions,
) -> Result<EvaluationReport, EngineError> {
    let start = Instant::now();
    let graph = &tg.graph;
    check_grid(graph, grid)?;
    if tg.signature_of.len() != graph.variables().len() {
        return Err(EngineError::SignatureMismatch(
            "signature table does not cover every variable".into(),
        ));
    }
    let order = topo_sort(graph)?;
    let pool = opts.pool()?;
    let sizes = grid.sizes();

    let mut values: Vec<Option<ValueTensor>> = vec![None; graph.variables().len()];
    for (axis, u) in graph.uncertain_inputs().iter().enumerate() {
        values[u.var.0] = Some(ValueTensor {
            signature: DependencySignature::single(axis),
            data: grid.axes[axis].nodes.clone(),
        });
    }
    for v in graph.variables() {
        if let VarKind::Constant(c) = v.kind {
            values[v.id.0] = Some(ValueTensor::scalar(c));
        }
    }

    let mut op_eval_counts = BTreeMap::new();
    let mut total = 0;
    let mut copies = 0;
    for id in order {
        let op = graph.operation(id);
        let target = tg.signature_of[op.output.0];
        let arg = |i: usize| values[op.inputs[i].0].as_ref().expect("topological order");
        let out = match op.kind {
            OpKind::Expand { from, to } => {
                let src = arg(0);
                if src.signature != from || to != target {
                    return Err(EngineError::SignatureMismatch(format!(
                        "{id} expands {from}->{to} but receives {} and is recorded as {target}",
                        src.signature
                    )));
                }
                let e = expand_tensor(src, to, &sizes)?;
                copies += e.len();
                e
            }
            kind => {
                for i in 0..op.inputs.len() {
                    if arg(i).signature != target {
                        return Err(EngineError::SignatureMismatch(format!(
                            "{id} has signature {target} but argument {i} carries {}",
                            arg(i).signature
                        )));
                    }
                }
                let b = (kind.arity() == 2).then(|| arg(1).data.as_slice());
                let data = kernel::run(kind, &arg(0).data, b, pool.as_ref()).map_err(|index| {
                    DomainError {
                        op: id,
                        kind: kind.name(),
                        index,
                    }
                })?;
                op_eval_counts.insert(id.0, data.len());
                total += data.len();
                ValueTensor {
                    signature: target,
                    data,
                }
            }
        };
        values[op.output.0] = Some(out);
    }

    let full = DependencySignature::full(graph.dimension());
    let mut outputs = BTreeMap::new();
    for o in graph.outputs() {
        let v = values[o.var.0].as_ref().expect("outputs are defined");
        let t = if v.signature == full {
            v.clone()
        } else {
            let e = expand_tensor(v, full, &sizes)?;
            copies += e.len();
            e
        };
        outputs.insert(o.name.clone(), t);
    }
    Ok(EvaluationReport {
        outputs,
        op_eval_counts,
        total_scalar_evals: total,
        expansion_copies: copies,
        equivalent_model_evals: equivalent_evals(total, graph),
        wall_time_ms: elapsed_ms(start),
    })
}
