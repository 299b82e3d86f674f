//! Experiment files, named presets, the sweep driver and CSV output.

mod config;
mod output;
mod presets;

pub use config::{apply_overrides, parse_config, parse_values, EXPERIMENT_KEYS};
pub use output::{format_sig, read_csv_rows, write_rows, CSV_HEADER};
pub use presets::{preset, presets, Preset};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{asymptotic_cm_outage, asymptotic_sic_best_outage, cm_outage, sic_best_outage, AnalyticSettings};
use crate::error::{ConfigError, Result};
use crate::montecarlo::{point_seed, simulate_schemes, Scheme};
use crate::system::{derive_constants, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    MonteCarlo,
    Analytic,
    Asymptotic,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::MonteCarlo => "montecarlo",
            Engine::Analytic => "analytic",
            Engine::Asymptotic => "asymptotic",
        })
    }
}

impl FromStr for Engine {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "montecarlo" | "mc" => Ok(Engine::MonteCarlo),
            "analytic" => Ok(Engine::Analytic),
            "asymptotic" => Ok(Engine::Asymptotic),
            _ => Err(ConfigError::Type {
                key: "engines".into(),
                value: s.into(),
                expected: "montecarlo, analytic or asymptotic",
            }),
        }
    }
}

/// One sweep over a single scenario field.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    pub sweep_param: String,
    pub sweep_values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub engines: Vec<Engine>,
    pub realizations: usize,
    pub seed: u64,
    pub output_path: PathBuf,
    pub analytic: AnalyticSettings,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base: SystemConfig::default(),
            sweep_param: "P_u_dBm".into(),
            sweep_values: vec![4.0],
            schemes: vec![Scheme::Cm, Scheme::Sic],
            engines: vec![Engine::MonteCarlo],
            realizations: 100_000,
            seed: 1,
            output_path: PathBuf::from("outage.csv"),
            analytic: AnalyticSettings::default(),
        }
    }
}

impl ExperimentSpec {
    /// Checks every sweep point, not only the base scenario.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sweep_values.is_empty() {
            return Err(ConfigError::invalid("sweep_values", "no values given"));
        }
        if self.schemes.is_empty() {
            return Err(ConfigError::invalid("schemes", "no scheme given"));
        }
        if self.engines.is_empty() {
            return Err(ConfigError::invalid("engines", "no engine given"));
        }
        if self.engines.contains(&Engine::MonteCarlo) && self.realizations == 0 {
            return Err(ConfigError::invalid("L", "must be at least 1"));
        }
        if !(self.analytic.quad.rel_tol > 0.0) {
            return Err(ConfigError::invalid("quad_rel_tol", "must be positive"));
        }
        self.analytic.validate()?;
        for &v in &self.sweep_values {
            self.point_config(v)?;
        }
        Ok(())
    }

    pub fn point_config(&self, value: f64) -> Result<SystemConfig, ConfigError> {
        let mut cfg = self.base.clone();
        cfg.set_param(&self.sweep_param, value)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One CSV line. `user_order == None` is the average over users.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub engine: Engine,
    pub user_order: Option<usize>,
    pub op: f64,
    pub stderr: Option<f64>,
    pub visibility_factor: f64,
    pub seed: u64,
}

fn run_point(spec: &ExperimentSpec, index: usize) -> Result<Vec<Row>> {
    let value = spec.sweep_values[index];
    let cfg = spec.point_config(value)?;
    let seed = point_seed(spec.seed, index);
    let row = |scheme, engine, user_order, op, stderr, visibility_factor| Row {
        sweep_param: spec.sweep_param.clone(),
        sweep_value: value,
        scheme,
        engine,
        user_order,
        op,
        stderr,
        visibility_factor,
        seed,
    };
    let mut rows = Vec::new();
    for &engine in &spec.engines {
        match engine {
            Engine::MonteCarlo => {
                let (cm, sic) = simulate_schemes(&cfg, spec.realizations, seed)?;
                for &scheme in &spec.schemes {
                    let r = if scheme == Scheme::Cm { &cm } else { &sic };
                    for (l, (&op, &se)) in r.per_user_op.iter().zip(&r.stderr).enumerate() {
                        rows.push(row(scheme, engine, Some(l + 1), op, Some(se), r.visibility_factor));
                    }
                    rows.push(row(scheme, engine, None, r.average_op, Some(r.average_stderr), r.visibility_factor));
                }
            }
            Engine::Analytic | Engine::Asymptotic => {
                let consts = derive_constants(&cfg);
                let settings = AnalyticSettings { seed, ..spec.analytic };
                for &scheme in &spec.schemes {
                    let asym = engine == Engine::Asymptotic;
                    let (out, order) = match scheme {
                        Scheme::Cm if asym => (asymptotic_cm_outage(&cfg, &consts, &settings)?, None),
                        Scheme::Cm => (cm_outage(&cfg, &consts, &settings)?, None),
                        Scheme::Sic if asym => (asymptotic_sic_best_outage(&cfg, &consts, &settings)?, Some(1)),
                        Scheme::Sic => (sic_best_outage(&cfg, &consts, &settings)?, Some(1)),
                    };
                    rows.push(row(scheme, engine, order, out.op, None, out.visibility_factor));
                }
            }
        }
    }
    Ok(rows)
}

/// Runs every sweep point in parallel. Rows come back in canonical order:
/// sweep value, scheme, engine, decoding order with the average last.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    spec.validate()?;
    let per_point = (0..spec.sweep_values.len())
        .into_par_iter()
        .map(|i| run_point(spec, i).map(|rows| (i, rows)))
        .collect::<Result<Vec<_>>>()?;
    let mut keyed: Vec<_> = per_point.into_iter().flat_map(|(i, rows)| rows.into_iter().map(move |r| (i, r))).collect();
    keyed.sort_by_key(|(i, r)| (*i, r.scheme, r.engine, r.user_order.unwrap_or(usize::MAX)));
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}
