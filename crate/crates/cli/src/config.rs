//! Experiment configuration: built from defaults, then a JSON config file,
//! then command-line flags, each layer overriding the one before.

use std::path::{Path, PathBuf};

use sbm_core::partition::DEFAULT_SEARCH_BUDGET;
use sbm_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_STEPS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Thresholds,
    Table1,
    Grid,
    Generate,
    Detect,
    Phi,
    Secondmoment,
    Distinguish,
}

/// Which ensemble `generate` samples from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[default]
    Sbm,
    Er,
}

/// One layer of settings. Every field is optional so layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub mode: Option<Mode>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub c_in: Option<f64>,
    pub c_out: Option<f64>,
    pub d: Option<f64>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub restarts: Option<usize>,
    pub budget: Option<f64>,
    pub ks: Option<Vec<usize>>,
    pub lambda_from: Option<f64>,
    pub lambda_to: Option<f64>,
    pub steps: Option<usize>,
    pub graph: Option<PathBuf>,
    pub model: Option<Model>,
    #[serde(alias = "out")]
    pub output_path: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn has_rates(&self) -> bool {
        self.c_in.is_some() || self.c_out.is_some()
    }

    fn has_d_lambda(&self) -> bool {
        self.d.is_some() || self.lambda.is_some()
    }

    fn check_single_form(&self, origin: &str) -> Result<(), CliError> {
        if self.has_rates() && self.has_d_lambda() {
            return Err(CliError::Config(format!(
                "{origin} mixes (c_in, c_out) with (d, lambda); give exactly one form"
            )));
        }
        Ok(())
    }

    /// `self` overridden by `upper`. A layer that names either parameter form
    /// replaces both forms from the layers below it.
    pub fn overlay(mut self, upper: ConfigLayer) -> Self {
        if upper.has_rates() || upper.has_d_lambda() {
            self.c_in = None;
            self.c_out = None;
            self.d = None;
            self.lambda = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if upper.$f.is_some() { self.$f = upper.$f; } )* };
        }
        take!(mode, k, n, c_in, c_out, d, lambda, seed, trials, restarts, budget, ks, lambda_from, lambda_to, steps, graph, model, output_path, sidecar);
        self
    }
}

/// Rates in either accepted form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rates {
    Explicit { c_in: f64, c_out: f64 },
    Reparametrized { d: f64, lambda: f64 },
    /// `λ` without a degree; enough for the threshold formulas.
    Lambda { lambda: f64 },
}

/// Fully resolved settings; echoed into the header of every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", flatten)]
    pub rates: Option<Rates>,
    pub seed: u64,
    pub trials: usize,
    pub restarts: usize,
    pub budget: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_to: Option<f64>,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    pub model: Model,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Resolves `defaults < file < flags` for the given subcommand.
    pub fn resolve(mode: Mode, file: Option<ConfigLayer>, flags: ConfigLayer) -> Result<Self, CliError> {
        let file = file.unwrap_or_default();
        file.check_single_form("config file")?;
        flags.check_single_form("command line")?;
        if let Some(m) = file.mode {
            if m != mode {
                return Err(CliError::Config(format!("config file is for mode {m:?}, command is {mode:?}")));
            }
        }
        Self::from_layer(mode, file.overlay(flags))
    }

    pub fn from_layer(mode: Mode, l: ConfigLayer) -> Result<Self, CliError> {
        l.check_single_form("configuration")?;
        let rates = match (l.c_in, l.c_out, l.d, l.lambda) {
            (Some(c_in), Some(c_out), None, None) => Some(Rates::Explicit { c_in, c_out }),
            (None, None, Some(d), Some(lambda)) => Some(Rates::Reparametrized { d, lambda }),
            (None, None, None, Some(lambda)) if mode == Mode::Thresholds => Some(Rates::Lambda { lambda }),
            (None, None, None, None) => None,
            _ => return Err(CliError::Config("incomplete parameters: give both c_in and c_out, or both d and lambda".into())),
        };
        Ok(Self {
            mode,
            k: l.k,
            n: l.n,
            rates,
            seed: l.seed.unwrap_or(DEFAULT_SEED),
            trials: l.trials.unwrap_or(DEFAULT_TRIALS),
            restarts: l.restarts.unwrap_or(DEFAULT_RESTARTS),
            budget: l.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
            ks: l.ks,
            lambda_from: l.lambda_from,
            lambda_to: l.lambda_to,
            steps: l.steps.unwrap_or(DEFAULT_STEPS),
            graph: l.graph,
            model: l.model.unwrap_or_default(),
            output_path: l.output_path,
            sidecar: l.sidecar,
        })
    }

    pub fn require_k(&self) -> Result<usize, CliError> {
        self.k.ok_or_else(|| CliError::Config("missing --k".into()))
    }

    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Config("missing --n".into()))
    }

    fn require_rates(&self) -> Result<Rates, CliError> {
        self.rates
            .ok_or_else(|| CliError::Config("missing parameters: give --c-in/--c-out or --d/--lambda".into()))
    }

    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let (k, n) = (self.require_k()?, self.require_n()?);
        Ok(match self.require_rates()? {
            Rates::Explicit { c_in, c_out } => ModelParams::new(k, n, c_in, c_out)?,
            Rates::Reparametrized { d, lambda } => ModelParams::from_d_lambda(k, n, d, lambda)?,
            Rates::Lambda { .. } => return Err(missing_degree()),
        })
    }

    /// `(k, d, λ)` for commands that do not involve `n`. With explicit rates
    /// and `d = 0`, `λ` is undefined and reported as 0.
    pub fn k_d_lambda(&self) -> Result<(usize, f64, f64), CliError> {
        let k = self.require_k()?;
        Ok(match self.require_rates()? {
            Rates::Reparametrized { d, lambda } => (k, d, lambda),
            Rates::Lambda { .. } => return Err(missing_degree()),
            Rates::Explicit { c_in, c_out } => {
                let p = ModelParams::new(k, 1, c_in, c_out)?;
                let d = p.average_degree();
                (k, d, if d > 0.0 { p.second_eigenvalue()? } else { 0.0 })
            }
        })
    }

    /// `λ` alone, for `thresholds`: either given directly or derived.
    pub fn lambda(&self) -> Result<f64, CliError> {
        match self.require_rates()? {
            Rates::Lambda { lambda } => Ok(lambda),
            _ => Ok(self.k_d_lambda()?.2),
        }
    }
}

fn missing_degree() -> CliError {
    CliError::Config("missing --d".into())
}
