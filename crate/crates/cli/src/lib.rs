//! Subcommand implementations for the `uqc` binary. Each command returns its
//! report as text; the binary decides where it goes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use uqc_core::amtc::{compute_influence_matrix, dot_after, dot_before, insert_expansions, scheduled_cost, transform};
use uqc_core::dsl::{builtin_model, builtin_source, parse_model, BUILTIN_NAMES};
use uqc_core::engine::{evaluate_amtc, evaluate_naive, EvalOptions, EvaluationReport};
use uqc_core::quadrature::{uniform_order_grid, MAX_ORDER};
use uqc_core::uq::{run_method, Method, RunSpec, UqResult};
use uqc_core::Graph;

/// A builtin model name, or a path to a `.uq` file.
pub fn load_model(model: &str) -> Result<Graph> {
    if BUILTIN_NAMES.contains(&model) {
        return Ok(builtin_model(model)?);
    }
    let path = Path::new(model);
    if path.is_file() {
        let src = fs::read_to_string(path).with_context(|| format!("reading {model}"))?;
        return parse_model(&src).with_context(|| format!("parsing {model}"));
    }
    // Surfaces the unknown-model error with the list of builtins.
    builtin_source(model)?;
    unreachable!("builtin_source accepted a name outside BUILTIN_NAMES")
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_k_range(s: &str) -> Result<Vec<usize>> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse::<usize>()?, b.trim().trim_start_matches('=').parse::<usize>()?),
        None => {
            let k = s.trim().parse::<usize>()?;
            (k, k)
        }
    };
    if lo == 0 || lo > hi || hi > MAX_ORDER {
        bail!("k range must satisfy 1 <= lo <= hi <= {MAX_ORDER} (got {s})");
    }
    Ok((lo..=hi).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: String,
    pub method: Method,
    pub k: usize,
    pub pce_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub qoi: Option<String>,
    pub format: Format,
    pub eval: EvalOptions,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        match self.method {
            Method::NipcFull | Method::NipcFullAmtc | Method::Sc => {
                if !(1..=MAX_ORDER).contains(&self.k) {
                    bail!("--k must be in 1..={MAX_ORDER} (got {})", self.k);
                }
            }
            Method::Mc => {
                if self.mc_samples < 2 {
                    bail!("--mc-samples must be at least 2 (got {})", self.mc_samples);
                }
            }
            Method::NipcReg => {}
        }
        Ok(())
    }

    fn spec(&self) -> RunSpec {
        RunSpec {
            method: self.method,
            k: self.k,
            pce_order: self.pce_order,
            mc_samples: self.mc_samples,
            seed: self.seed,
            qoi: self.qoi.clone(),
            eval: self.eval,
            ..RunSpec::default()
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    uq_result: &'a UqResult,
    evaluation: &'a EvaluationReport,
}

pub fn cmd_run(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let graph = load_model(&cfg.model)?;
    let outcome = run_method(&graph, &cfg.spec())?;
    let (r, e) = (&outcome.result, &outcome.evaluation);
    Ok(match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&RunReport {
                uq_result: r,
                evaluation: e,
            })?;
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "method,mean,stddev,n_model_points,total_scalar_evals,expansion_copies,wall_time_ms\n{},{},{},{},{},{},{}\n",
            r.method, r.mean, r.stddev, r.n_model_points, e.total_scalar_evals, e.expansion_copies, e.wall_time_ms
        ),
    })
}

/// One row of `bench` output.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub points: usize,
    pub naive_scalar_evals: usize,
    pub amtc_scalar_evals: usize,
    pub expansion_copies: usize,
    pub naive_ms: f64,
    pub amtc_ms: f64,
}

impl BenchRow {
    pub fn reduction(&self) -> f64 {
        1.0 - self.amtc_scalar_evals as f64 / self.naive_scalar_evals as f64
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub const BENCH_HEADER: &str =
    "k,points,naive_scalar_evals,amtc_scalar_evals,expansion_copies,naive_ms,amtc_ms,reduction";

/// Evaluates the model with both engines on every k and reports counts and
/// median wall times.
pub fn bench_rows(graph: &Graph, ks: &[usize], repeats: usize, eval: &EvalOptions) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        bail!("--repeats must be at least 1");
    }
    let tg = transform(graph)?;
    let mut rows = Vec::new();
    for &k in ks {
        let grid = uniform_order_grid(&graph.distributions(), k)?;
        let mut naive_t = Vec::new();
        let mut amtc_t = Vec::new();
        let mut last = None;
        for _ in 0..repeats {
            let t = Instant::now();
            let n = evaluate_naive(graph, &grid, eval).with_context(|| format!("naive evaluation at k={k}"))?;
            naive_t.push(t.elapsed().as_secs_f64() * 1e3);
            let t = Instant::now();
            let a = evaluate_amtc(&tg, &grid, eval).with_context(|| format!("AMTC evaluation at k={k}"))?;
            amtc_t.push(t.elapsed().as_secs_f64() * 1e3);
            last = Some((n, a));
        }
        let (n, a) = last.expect("at least one repeat");
        rows.push(BenchRow {
            k,
            points: grid.total_points,
            naive_scalar_evals: n.total_scalar_evals,
            amtc_scalar_evals: a.total_scalar_evals,
            expansion_copies: a.expansion_copies,
            naive_ms: median(naive_t),
            amtc_ms: median(amtc_t),
        });
    }
    Ok(rows)
}

pub fn cmd_bench(model: &str, k_range: &str, repeats: usize, eval: &EvalOptions) -> Result<String> {
    let graph = load_model(model)?;
    let rows = bench_rows(&graph, &parse_k_range(k_range)?, repeats, eval)?;
    let mut s = String::from(BENCH_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.3},{:.3},{}",
            r.k,
            r.points,
            r.naive_scalar_evals,
            r.amtc_scalar_evals,
            r.expansion_copies,
            r.naive_ms,
            r.amtc_ms,
            r.reduction()
        );
    }
    Ok(s)
}

/// Scheduled operation counts per k, without evaluating the model.
pub fn cmd_counts(model: &str, k_range: &str) -> Result<String> {
    let graph = load_model(model)?;
    let tg = transform(&graph)?;
    let mut s = String::from("k,points,naive_scalar_evals,amtc_scalar_evals,expansion_copies,reduction\n");
    for k in parse_k_range(k_range)? {
        let sizes = vec![k; graph.dimension()];
        let c = scheduled_cost(&tg, &sizes);
        let points: usize = sizes.iter().product();
        let _ = writeln!(
            s,
            "{k},{points},{},{},{},{}",
            c.naive_scalar_evals,
            c.amtc_scalar_evals,
            c.expansion_copies,
            c.reduction()
        );
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct ConvergenceConfig {
    pub model: String,
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    /// Reference grid order for nipc-full; the largest of `ks` when `None`.
    pub reference_k: Option<usize>,
    pub pce_order: usize,
    pub seeds: Vec<u64>,
    pub eval: EvalOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub method: Method,
    pub k: usize,
    pub n_model_points: usize,
    pub mean: f64,
    /// Percent relative error of `mean`; for Monte Carlo the average over seeds.
    pub error_vs_reference: f64,
}

pub fn convergence_rows(cfg: &ConvergenceConfig) -> Result<(f64, Vec<ConvergenceRow>)> {
    let graph = load_model(&cfg.model)?;
    if cfg.ks.is_empty() {
        bail!("empty k range");
    }
    let ref_k = cfg.reference_k.unwrap_or(*cfg.ks.iter().max().expect("nonempty"));
    let base = RunSpec {
        pce_order: cfg.pce_order,
        eval: cfg.eval,
        ..RunSpec::default()
    };
    let reference = run_method(&graph, &RunSpec { method: Method::NipcFull, k: ref_k, ..base.clone() })
        .with_context(|| format!("reference nipc-full at k={ref_k}"))?
        .result
        .mean;
    let pct = |m: f64| 100.0 * (m - reference).abs() / reference.abs();

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &k in &cfg.ks {
            let budget = k.pow(graph.dimension() as u32);
            let row = match method {
                Method::Mc => {
                    if cfg.seeds.is_empty() {
                        bail!("Monte Carlo needs at least one seed");
                    }
                    let mut means = Vec::new();
                    for &seed in &cfg.seeds {
                        let spec = RunSpec { method, mc_samples: budget.max(2), seed, ..base.clone() };
                        means.push(run_method(&graph, &spec)?.result.mean);
                    }
                    let n = means.len() as f64;
                    ConvergenceRow {
                        method,
                        k,
                        n_model_points: budget.max(2),
                        mean: means.iter().sum::<f64>() / n,
                        error_vs_reference: means.iter().map(|&m| pct(m)).sum::<f64>() / n,
                    }
                }
                Method::NipcReg => {
                    let spec = RunSpec {
                        method,
                        pce_order: k.saturating_sub(1),
                        seed: cfg.seeds.first().copied().unwrap_or(0),
                        ..base.clone()
                    };
                    let r = run_method(&graph, &spec)?.result;
                    ConvergenceRow { method, k, n_model_points: r.n_model_points, mean: r.mean, error_vs_reference: pct(r.mean) }
                }
                _ => {
                    let r = run_method(&graph, &RunSpec { method, k, ..base.clone() })
                        .with_context(|| format!("{} at k={k}", method.name()))?
                        .result;
                    ConvergenceRow { method, k, n_model_points: r.n_model_points, mean: r.mean, error_vs_reference: pct(r.mean) }
                }
            };
            rows.push(row);
        }
    }
    Ok((reference, rows))
}

pub fn cmd_convergence(cfg: &ConvergenceConfig) -> Result<String> {
    let (_, rows) = convergence_rows(cfg)?;
    let mut s = String::from("method,n_model_points,mean,error_vs_reference,k\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.method.name(), r.n_model_points, r.mean, r.error_vs_reference, r.k);
    }
    Ok(s)
}

/// DOT text of the model before and after the transformation, and the
/// influence matrix as CSV.
pub struct GraphDump {
    pub before: String,
    pub after: String,
    pub influence_csv: String,
}

pub fn cmd_graph(model: &str, k: usize) -> Result<GraphDump> {
    let graph = load_model(model)?;
    let matrix = compute_influence_matrix(&graph)?;
    let tg = insert_expansions(&graph, &matrix)?;
    let sizes = vec![k; graph.dimension()];
    Ok(GraphDump {
        before: dot_before(&graph, &sizes),
        after: dot_after(&tg, &sizes),
        influence_csv: matrix.to_csv(&graph),
    })
}

/// Writes `text` to `out`, or returns it for stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<Option<String>> {
    match out {
        Some(p) => {
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}
