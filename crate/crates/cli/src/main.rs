use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbm_cli::config::{ConfigLayer, ExperimentConfig, Mode, Model};
use sbm_cli::experiments::{grid_csv, run_distinguish, run_grid, run_table1, table1_csv};
use sbm_cli::format::{emit, to_json};
use sbm_cli::CliError;
use sbm_core::graphgen::{sample_er, sample_planted};
use sbm_core::partition::{exhaustive_detect, DetectOptions};
use sbm_core::secondmoment::{max_phi_with, second_moment_estimate};
use sbm_core::thresholds::threshold_report;
use sbm_core::{Graph, RandomStream};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "sbmcond", version, about = "Detectability thresholds and experiments for the symmetric stochastic block model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Root seed; every random draw derives from it
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file of settings; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct Params {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "c-in", conflicts_with_all = ["d", "lambda"], allow_negative_numbers = true)]
    c_in: Option<f64>,
    #[arg(long = "c-out", conflicts_with_all = ["d", "lambda"], allow_negative_numbers = true)]
    c_out: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold report for one (k, lambda) as JSON
    Thresholds {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        common: Common,
    },
    /// lambda* for the tabulated values of k, as CSV
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// Threshold reports over a (k, lambda) grid, as CSV
    Grid {
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated list of k values
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda_to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample a planted or null graph as an edge list
    Generate {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum)]
        model: Option<Model>,
        /// Planted partition file (default: <out>.partition)
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive search for a good partition of an edge-list graph
    Detect {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Largest k^n the search may enumerate
        #[arg(long)]
        budget: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Maximize Phi over doubly stochastic matrices; prints the report as JSON
    Phi {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        restarts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the second moment of P/Q
    Secondmoment {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        common: Common,
    },
    /// Good-partition rates on planted versus null graphs
    Distinguish {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        budget: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn base_layer(params: Option<&Params>, common: &Common) -> ConfigLayer {
    let mut l = ConfigLayer {
        seed: common.seed,
        trials: common.trials,
        output_path: common.out.clone(),
        ..Default::default()
    };
    if let Some(p) = params {
        l.k = p.k;
        l.n = p.n;
        l.c_in = p.c_in;
        l.c_out = p.c_out;
        l.d = p.d;
        l.lambda = p.lambda;
    }
    l
}

fn resolve(mode: Mode, common: &Common, flags: ConfigLayer) -> Result<ExperimentConfig, CliError> {
    let file = common.config.as_deref().map(ConfigLayer::from_file).transpose()?;
    ExperimentConfig::resolve(mode, file, flags)
}

#[derive(Serialize)]
struct SecondMomentOutput {
    k: usize,
    d: f64,
    lambda: f64,
    n: usize,
    trials: usize,
    mean: f64,
    std_error: f64,
}

fn out_path(cfg: &ExperimentConfig) -> Option<&Path> {
    cfg.output_path.as_deref()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Thresholds { params, common } => {
            let cfg = resolve(Mode::Thresholds, &common, base_layer(Some(&params), &common))?;
            let report = threshold_report(cfg.require_k()?, cfg.lambda()?)?;
            emit(&cfg, out_path(&cfg), &to_json(&report)?)
        }
        Command::Table1 { common } => {
            let cfg = resolve(Mode::Table1, &common, base_layer(None, &common))?;
            let rows = run_table1(None)?;
            emit(&cfg, out_path(&cfg), &table1_csv(&rows)?)
        }
        Command::Grid { k, ks, lambda_from, lambda_to, steps, common } => {
            let flags = ConfigLayer { k, ks, lambda_from, lambda_to, steps, ..base_layer(None, &common) };
            let cfg = resolve(Mode::Grid, &common, flags)?;
            let reports = run_grid(&cfg)?;
            emit(&cfg, out_path(&cfg), &grid_csv(&reports)?)
        }
        Command::Generate { params, model, sidecar, common } => {
            let flags = ConfigLayer { model, sidecar, ..base_layer(Some(&params), &common) };
            let cfg = resolve(Mode::Generate, &common, flags)?;
            generate(&cfg)
        }
        Command::Detect { params, graph, budget, common } => {
            let flags = ConfigLayer { graph, budget, ..base_layer(Some(&params), &common) };
            let cfg = resolve(Mode::Detect, &common, flags)?;
            detect(&cfg)
        }
        Command::Phi { params, restarts, common } => {
            let flags = ConfigLayer { restarts, ..base_layer(Some(&params), &common) };
            let cfg = resolve(Mode::Phi, &common, flags)?;
            let (k, d, lambda) = cfg.k_d_lambda()?;
            let report = max_phi_with(k, d, lambda, cfg.restarts, RandomStream::from_seed(cfg.seed))?;
            emit(&cfg, out_path(&cfg), &to_json(&report)?)
        }
        Command::Secondmoment { params, common } => {
            let cfg = resolve(Mode::Secondmoment, &common, base_layer(Some(&params), &common))?;
            let (k, d, lambda) = cfg.k_d_lambda()?;
            let n = cfg.require_n()?;
            let est = second_moment_estimate(k, d, lambda, n, cfg.trials, RandomStream::from_seed(cfg.seed))?;
            let out = SecondMomentOutput { k, d, lambda, n, trials: est.trials, mean: est.mean, std_error: est.std_error };
            emit(&cfg, out_path(&cfg), &to_json(&out)?)
        }
        Command::Distinguish { params, budget, common } => {
            let flags = ConfigLayer { budget, ..base_layer(Some(&params), &common) };
            let cfg = resolve(Mode::Distinguish, &common, flags)?;
            let result = run_distinguish(&cfg)?;
            emit(&cfg, out_path(&cfg), &to_json(&result)?)
        }
    }
}

/// Edge-list and partition files carry no header so they stay in the plain
/// interchange format.
fn generate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let p = cfg.model_params()?;
    let stream = RandomStream::from_seed(cfg.seed);
    let (graph, sigma) = match cfg.model {
        Model::Sbm => {
            let (sigma, g) = sample_planted(&p, stream)?;
            (g, Some(sigma))
        }
        Model::Er => (sample_er(p.n, p.average_degree(), stream)?, None),
    };
    let sidecar = cfg.sidecar.clone().or_else(|| {
        cfg.output_path.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".partition");
            PathBuf::from(s)
        })
    });
    match &cfg.output_path {
        Some(path) => std::fs::write(path, graph.to_edge_list())?,
        None => print!("{}", graph.to_edge_list()),
    }
    if let (Some(sigma), Some(path)) = (sigma, sidecar) {
        std::fs::write(path, sigma.to_text())?;
    }
    Ok(())
}

fn detect(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let path = cfg.graph.as_ref().ok_or_else(|| CliError::Config("missing --graph".into()))?;
    let graph = Graph::parse_edge_list(&std::fs::read_to_string(path)?)?;
    if let Some(n) = cfg.n {
        if n != graph.n() {
            return Err(CliError::Config(format!("--n {n} but the graph has {} vertices", graph.n())));
        }
    }
    let cfg = ExperimentConfig { n: Some(graph.n()), ..cfg.clone() };
    let p = cfg.model_params()?;
    let found = exhaustive_detect(&graph, &p, DetectOptions { budget: cfg.budget, parallel: true })?;
    let body = found.map_or_else(|| "none\n".to_string(), |t| t.to_text());
    match &cfg.output_path {
        Some(out) => std::fs::write(out, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
