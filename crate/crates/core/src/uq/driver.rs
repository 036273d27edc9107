use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map};

use super::{
    monte_carlo, moments_from_pce, nipc_integration, nipc_regression, resolve_qoi, sample_inputs,
    sc_build, UqError, UqResult,
};
use crate::amtc::transform;
use crate::basis::enumerate_basis;
use crate::engine::{
    evaluate_amtc, evaluate_naive, EngineError, EvalOptions, EvaluationReport, ScalarProgram,
};
use crate::graph::Graph;
use crate::quadrature::uniform_order_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    NipcFull,
    NipcFullAmtc,
    NipcReg,
    Sc,
    Mc,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::NipcFull,
        Method::NipcFullAmtc,
        Method::NipcReg,
        Method::Sc,
        Method::Mc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NipcFull => "nipc-full",
            Self::NipcFullAmtc => "nipc-full-amtc",
            Self::NipcReg => "nipc-reg",
            Self::Sc => "sc",
            Self::Mc => "mc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub method: Method,
    /// Quadrature points per axis.
    pub k: usize,
    pub pce_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
    /// Regression sample count as a multiple of the basis size.
    pub regression_factor: usize,
    /// Output to analyse; the first declared output when `None`.
    pub qoi: Option<String>,
    pub eval: EvalOptions,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            method: Method::NipcFull,
            k: 3,
            pce_order: 2,
            mc_samples: 10_000,
            seed: 0,
            regression_factor: 2,
            qoi: None,
            eval: EvalOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub result: UqResult,
    pub evaluation: EvaluationReport,
}

/// Cost report for `n` single-point evaluations, which carry no grid outputs.
fn pointwise_report(graph: &Graph, n: usize, start: Instant) -> EvaluationReport {
    let op_eval_counts: BTreeMap<usize, usize> = graph
        .operations()
        .iter()
        .filter(|o| !o.kind.is_expand())
        .map(|o| (o.id.0, n))
        .collect();
    let total = n * op_eval_counts.len();
    EvaluationReport {
        outputs: BTreeMap::new(),
        op_eval_counts,
        total_scalar_evals: total,
        expansion_copies: 0,
        equivalent_model_evals: if total == 0 { 0.0 } else { n as f64 },
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

pub fn run_method(graph: &Graph, spec: &RunSpec) -> Result<RunOutcome, UqError> {
    let start = Instant::now();
    let qoi = resolve_qoi(graph, spec.qoi.as_deref())?;
    let dists = graph.distributions();
    let mut details = Map::new();
    details.insert("output".into(), json!(qoi));

    let (result, evaluation) = match spec.method {
        Method::NipcFull | Method::NipcFullAmtc | Method::Sc => {
            let grid = uniform_order_grid(&dists, spec.k)?;
            let report = if spec.method == Method::NipcFullAmtc {
                evaluate_amtc(&transform(graph)?, &grid, &spec.eval)?
            } else {
                evaluate_naive(graph, &grid, &spec.eval)?
            };
            let values = report.output(&qoi).expect("resolved output");
            details.insert("k".into(), json!(spec.k));
            details.insert("total_scalar_evals".into(), json!(report.total_scalar_evals));
            details.insert("expansion_copies".into(), json!(report.expansion_copies));
            let (mean, stddev) = if spec.method == Method::Sc {
                sc_build(values, &grid)?.moments()
            } else {
                let basis = enumerate_basis(spec.pce_order, &dists)?;
                let c = nipc_integration(values, &grid, &basis)?;
                details.insert("pce_order".into(), json!(spec.pce_order));
                details.insert("basis_size".into(), json!(basis.len()));
                details.insert("coefficients".into(), json!(c.alpha));
                moments_from_pce(&c)
            };
            let result = UqResult {
                method: spec.method.name().into(),
                mean,
                stddev,
                n_model_points: grid.total_points,
                details,
            };
            (result, report)
        }
        Method::NipcReg => {
            let basis = enumerate_basis(spec.pce_order, &dists)?;
            let n = spec.regression_factor * basis.len();
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let points = sample_inputs(&dists, n, &mut rng);
            let prog = ScalarProgram::compile(graph).map_err(UqError::Engine)?;
            let slot = prog.output_var(prog.output_index(&qoi).expect("resolved output"));
            let mut scratch = prog.scratch();
            let mut values = Vec::with_capacity(n);
            for (i, u) in points.iter().enumerate() {
                prog.run(&mut scratch, u, i)
                    .map_err(|e| UqError::Engine(EngineError::Domain(e)))?;
                values.push(scratch[slot]);
            }
            let fit = nipc_regression(&points, &values, &basis)?;
            let (mean, stddev) = moments_from_pce(&fit.coefficients);
            details.insert("pce_order".into(), json!(spec.pce_order));
            details.insert("basis_size".into(), json!(basis.len()));
            details.insert("coefficients".into(), json!(fit.coefficients.alpha));
            details.insert("residual_norm".into(), json!(fit.residual_norm));
            details.insert("seed".into(), json!(spec.seed));
            let report = pointwise_report(graph, n, start);
            details.insert("total_scalar_evals".into(), json!(report.total_scalar_evals));
            let result = UqResult {
                method: spec.method.name().into(),
                mean,
                stddev,
                n_model_points: n,
                details,
            };
            (result, report)
        }
        Method::Mc => {
            let result = monte_carlo(graph, Some(&qoi), spec.mc_samples, spec.seed)?;
            (result, pointwise_report(graph, spec.mc_samples, start))
        }
    };
    Ok(RunOutcome { result, evaluation })
}
