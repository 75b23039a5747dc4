use std::path::Path;

use rayon::prelude::*;
use sbm_core::graphgen::{sample_er, sample_sbm};
use sbm_core::params::lambda_min;
use sbm_core::partition::{exhaustive_detect, overlap, DetectOptions};
use sbm_core::thresholds::{lambda_star, threshold_report};
use sbm_core::{ModelParams, Partition, RandomStream, ThresholdReport};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::format::{csv_records, csv_text, fmt_bool, fmt_f64, parse_bool, parse_f64};

pub const TABLE1_KS: [usize; 11] = [5, 6, 7, 8, 9, 10, 11, 20, 100, 1000, 10_000];
pub const TABLE1_COLUMNS: [&str; 2] = ["k", "lambda_star"];
pub const GRID_COLUMNS: [&str; 6] = ["k", "lambda", "d_lower", "d_ks", "d_upper", "below_ks_detectable"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguishResult {
    pub n: usize,
    pub k: usize,
    pub d: f64,
    pub lambda: f64,
    pub trials: usize,
    /// Fraction of planted graphs with a good partition.
    pub p_good_sbm: f64,
    /// Fraction of Erdős–Rényi graphs with a good partition.
    pub p_good_er: f64,
    /// Mean overlap of the detected partition with the planted one, over
    /// planted trials where detection succeeded.
    pub mean_overlap: Option<f64>,
}

struct TrialOutcome {
    sbm_overlap: Option<f64>,
    er_good: bool,
}

fn run_trial(p: &ModelParams, options: DetectOptions, stream: RandomStream) -> Result<TrialOutcome, CliError> {
    let sigma = Partition::random_balanced(p.n, p.k, &mut stream.child(0).rng())?;
    let g = sample_sbm(p, &sigma, stream.child(1))?;
    let sbm_overlap = match exhaustive_detect(&g, p, options)? {
        Some(tau) => Some(overlap(&sigma, &tau)?),
        None => None,
    };
    let h = sample_er(p.n, p.average_degree(), stream.child(2))?;
    let er_good = exhaustive_detect(&h, p, options)?.is_some();
    Ok(TrialOutcome { sbm_overlap, er_good })
}

/// Trial `t` uses `RandomStream::from_seed(seed).child(t)`: the planted
/// partition (uniform among balanced ones), the planted graph and the null
/// graph come from its children 0, 1 and 2. Trials run in parallel and are
/// aggregated in trial order.
pub fn run_distinguish(cfg: &ExperimentConfig) -> Result<DistinguishResult, CliError> {
    let p = cfg.model_params()?;
    let (_, d, lambda) = cfg.k_d_lambda()?;
    if cfg.trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    let root = RandomStream::from_seed(cfg.seed);
    let options = DetectOptions { budget: cfg.budget, parallel: false };
    let outcomes = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(&p, options, root.child(t as u64)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut good_sbm = 0usize;
    let mut good_er = 0usize;
    let mut overlap_sum = 0.0;
    for o in &outcomes {
        if let Some(b) = o.sbm_overlap {
            good_sbm += 1;
            overlap_sum += b;
        }
        good_er += usize::from(o.er_good);
    }
    let trials = cfg.trials as f64;
    Ok(DistinguishResult {
        n: p.n,
        k: p.k,
        d,
        lambda,
        trials: cfg.trials,
        p_good_sbm: good_sbm as f64 / trials,
        p_good_er: good_er as f64 / trials,
        mean_overlap: (good_sbm > 0).then(|| overlap_sum / good_sbm as f64),
    })
}

/// `(k, λ*)` rows for the Table 1 values of `k`; written as CSV to `out`
/// when given.
pub fn run_table1(out: Option<&Path>) -> Result<Vec<(usize, f64)>, CliError> {
    let rows = TABLE1_KS.iter().map(|&k| Ok((k, lambda_star(k)?))).collect::<Result<Vec<_>, CliError>>()?;
    if let Some(path) = out {
        std::fs::write(path, table1_csv(&rows)?)?;
    }
    Ok(rows)
}

pub fn table1_csv(rows: &[(usize, f64)]) -> Result<String, CliError> {
    csv_text(&TABLE1_COLUMNS, rows.iter().map(|(k, l)| vec![k.to_string(), fmt_f64(*l)]))
}

pub fn parse_table1_csv(text: &str) -> Result<Vec<(usize, f64)>, CliError> {
    csv_records(text, &TABLE1_COLUMNS)?
        .iter()
        .map(|r| Ok((parse_usize(&r[0])?, parse_f64(&r[1])?)))
        .collect()
}

fn parse_usize(s: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Format(format!("not an integer: {s:?}")))
}

/// `λ` values of the grid for one `k`: `steps` equally spaced points from
/// `lambda_from` to `lambda_to`, clipped to `[-1/(k-1), 1]` so one range
/// can serve several `k`.
pub fn grid_lambdas(cfg: &ExperimentConfig, k: usize) -> Vec<f64> {
    let lo = cfg.lambda_from.map_or(lambda_min(k), |l| l.max(lambda_min(k)));
    let hi = cfg.lambda_to.map_or(1.0, |l| l.min(1.0));
    match cfg.steps {
        _ if lo > hi => Vec::new(),
        0 => Vec::new(),
        1 => vec![lo],
        s => (0..s).map(|i| lo + (hi - lo) * i as f64 / (s - 1) as f64).collect(),
    }
}

/// Threshold reports over the `(k, λ)` grid, in `k`-major order.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<ThresholdReport>, CliError> {
    let ks = match (&cfg.ks, cfg.k) {
        (Some(ks), _) => ks.clone(),
        (None, Some(k)) => vec![k],
        (None, None) => return Err(CliError::Config("grid needs --k or --ks".into())),
    };
    let cells: Vec<(usize, f64)> = ks.iter().flat_map(|&k| grid_lambdas(cfg, k).into_iter().map(move |l| (k, l))).collect();
    let reports = cells
        .par_iter()
        .map(|&(k, l)| threshold_report(k, l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reports)
}

pub fn grid_csv(reports: &[ThresholdReport]) -> Result<String, CliError> {
    grid_rows_csv(&reports.iter().map(GridRow::from).collect::<Vec<_>>())
}

/// One parsed grid row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub k: usize,
    pub lambda: f64,
    pub d_lower: f64,
    pub d_ks: f64,
    pub d_upper: f64,
    pub below_ks_detectable: bool,
}

impl From<&ThresholdReport> for GridRow {
    fn from(r: &ThresholdReport) -> Self {
        Self {
            k: r.k,
            lambda: r.lambda,
            d_lower: r.d_lower,
            d_ks: r.d_ks,
            d_upper: r.d_upper,
            below_ks_detectable: r.below_ks_detectable,
        }
    }
}

pub fn parse_grid_csv(text: &str) -> Result<Vec<GridRow>, CliError> {
    csv_records(text, &GRID_COLUMNS)?
        .iter()
        .map(|r| {
            Ok(GridRow {
                k: parse_usize(&r[0])?,
                lambda: parse_f64(&r[1])?,
                d_lower: parse_f64(&r[2])?,
                d_ks: parse_f64(&r[3])?,
                d_upper: parse_f64(&r[4])?,
                below_ks_detectable: parse_bool(&r[5])?,
            })
        })
        .collect()
}

pub fn grid_rows_csv(rows: &[GridRow]) -> Result<String, CliError> {
    csv_text(
        &GRID_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.k.to_string(),
                fmt_f64(r.lambda),
                fmt_f64(r.d_lower),
                fmt_f64(r.d_ks),
                fmt_f64(r.d_upper),
                fmt_bool(r.below_ks_detectable).to_string(),
            ]
        }),
    )
}
