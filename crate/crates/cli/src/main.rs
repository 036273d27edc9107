use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand, ValueEnum};

use uqc::{
    cmd_bench, cmd_convergence, cmd_counts, cmd_graph, cmd_run, emit, parse_k_range, ConvergenceConfig, Format,
    RunConfig,
};
use uqc_core::engine::EvalOptions;
use uqc_core::uq::Method;

#[derive(Parser)]
#[command(name = "uqc", version, about = "Uncertainty propagation on tensor-product quadrature grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    NipcFull,
    NipcFullAmtc,
    NipcReg,
    Sc,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::NipcFull => Method::NipcFull,
            MethodArg::NipcFullAmtc => Method::NipcFullAmtc,
            MethodArg::NipcReg => Method::NipcReg,
            MethodArg::Sc => Method::Sc,
            MethodArg::Mc => Method::Mc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run one UQ method and write its result and evaluation report.
    Run {
        /// Builtin model name (simple, piston, multipoint) or path to a .uq file.
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, default_value = "nipc-full")]
        method: MethodArg,
        /// Quadrature points per input.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        pce_order: usize,
        #[arg(long, default_value_t = 10_000)]
        mc_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output to analyse (default: first declared output).
        #[arg(long)]
        qoi: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Compare full-grid and AMTC evaluation over a range of k.
    Bench {
        #[arg(long)]
        model: String,
        /// Inclusive range such as 3..7, or a single value.
        #[arg(long, default_value = "3..7")]
        k: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scheduled operation counts over a range of k, without evaluating.
    Counts {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "3..7")]
        k: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error of each method's mean against a high-order full-grid reference.
    Convergence {
        #[arg(long)]
        model: String,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "nipc-full,mc")]
        methods: Vec<MethodArg>,
        #[arg(long, default_value = "2..7")]
        k: String,
        /// Reference k for nipc-full (default: the largest k).
        #[arg(long)]
        reference_k: Option<usize>,
        #[arg(long, default_value_t = 4)]
        pce_order: usize,
        /// Monte Carlo seeds, averaged per budget.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        seeds: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write DOT graphs of the model before and after the transformation.
    Graph {
        #[arg(long)]
        model: String,
        /// k used for the data-size edge labels.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        out_before: PathBuf,
        #[arg(long)]
        out_after: PathBuf,
        /// Also write the influence matrix as CSV.
        #[arg(long)]
        influence: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Option<String>> {
    let eval = EvalOptions::from_env()?;
    match cli.command {
        Command::Run { model, method, k, pce_order, mc_samples, seed, qoi, out, format } => {
            let cfg = RunConfig {
                model,
                method: method.into(),
                k,
                pce_order,
                mc_samples,
                seed,
                qoi,
                format: match format {
                    FormatArg::Json => Format::Json,
                    FormatArg::Csv => Format::Csv,
                },
                eval,
            };
            emit(&cmd_run(&cfg)?, out.as_deref())
        }
        Command::Bench { model, k, repeats, out } => emit(&cmd_bench(&model, &k, repeats, &eval)?, out.as_deref()),
        Command::Counts { model, k, out } => emit(&cmd_counts(&model, &k)?, out.as_deref()),
        Command::Convergence { model, methods, k, reference_k, pce_order, seeds, out } => {
            let cfg = ConvergenceConfig {
                model,
                methods: methods.into_iter().map(Method::from).collect(),
                ks: parse_k_range(&k)?,
                reference_k,
                pce_order,
                seeds,
                eval,
            };
            emit(&cmd_convergence(&cfg)?, out.as_deref())
        }
        Command::Graph { model, k, out_before, out_after, influence } => {
            if k == 0 {
                return Err(anyhow!("--k must be at least 1"));
            }
            let dump = cmd_graph(&model, k)?;
            emit(&dump.before, Some(&out_before))?;
            emit(&dump.after, Some(&out_after))?;
            if let Some(p) = influence {
                emit(&dump.influence_csv, Some(&p))?;
            }
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
