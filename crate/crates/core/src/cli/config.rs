use std::collections::HashSet;
use std::path::PathBuf;

use super::{Engine, ExperimentSpec};
use crate::channel::ShadowedRicianParams;
use crate::error::ConfigError;
use crate::montecarlo::Scheme;
use crate::numerics::EulerInversionSpec;
use crate::system::{SicInterferenceModel, NUMERIC_KEYS};

/// Keys other than the numeric scenario fields.
pub const EXPERIMENT_KEYS: &[&str] = &[
    "sweep_param",
    "sweep_values",
    "schemes",
    "engines",
    "L",
    "seed",
    "output",
    "uplink_fading",
    "downlink_fading",
    "sic_model",
    "gs_average_samples",
    "quad_rel_tol",
    "euler_D",
    "euler_N",
    "euler_Q",
    "clamp_to_unit",
];

fn type_error(key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::Type { key: key.into(), value: value.into(), expected }
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| type_error(key, value, "number"))
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| type_error(key, value, "non-negative integer"))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// `a, b, c` or the inclusive range `start:stop:step`.
pub fn parse_values(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(type_error(key, value, "start:stop:step"));
        }
        let (start, stop, step) = (number(key, parts[0])?, number(key, parts[1])?, number(key, parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(ConfigError::invalid(key, "range needs step > 0 and stop ≥ start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    let values = list(value).map(|v| number(key, v)).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(ConfigError::invalid(key, "no values given"));
    }
    Ok(values)
}

fn fading(key: &str, value: &str) -> Result<ShadowedRicianParams<f64>, ConfigError> {
    match value {
        "average" => Ok(ShadowedRicianParams::average()),
        "heavy" => Ok(ShadowedRicianParams::heavy()),
        _ => Err(type_error(key, value, "average or heavy")),
    }
}

fn tokens(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        }
        if !NUMERIC_KEYS.contains(&key) && !EXPERIMENT_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::invalid(key, "given more than once"));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Applies a key-value document on top of `spec`.
pub fn apply_overrides(text: &str, mut spec: ExperimentSpec) -> Result<ExperimentSpec, ConfigError> {
    let mut inversion = spec.analytic.inversion;
    let mut pairs = tokens(text)?;
    // Named fading presets first so that explicit uplink_m etc. refine them.
    pairs.sort_by_key(|(k, _)| !k.ends_with("_fading"));
    for (key, value) in pairs {
        let (k, v) = (key.as_str(), value.as_str());
        match k {
            "sweep_param" => {
                if !NUMERIC_KEYS.contains(&v) {
                    return Err(ConfigError::invalid(k, format!("`{v}` is not a numeric scenario field")));
                }
                spec.sweep_param = v.to_string();
            }
            "sweep_values" => spec.sweep_values = parse_values(k, v)?,
            "schemes" => spec.schemes = list(v).map(str::parse::<Scheme>).collect::<Result<_, _>>()?,
            "engines" => spec.engines = list(v).map(str::parse::<Engine>).collect::<Result<_, _>>()?,
            "L" => spec.realizations = integer(k, v)?,
            "seed" => spec.seed = integer(k, v)?,
            "output" => spec.output_path = PathBuf::from(v),
            "uplink_fading" => spec.base.uplink_fading = fading(k, v)?,
            "downlink_fading" => spec.base.downlink_fading = fading(k, v)?,
            "sic_model" => {
                spec.base.sic_model = match v {
                    "as_printed" => SicInterferenceModel::AsPrinted,
                    "decrementing" => SicInterferenceModel::Decrementing,
                    _ => return Err(type_error(k, v, "as_printed or decrementing")),
                }
            }
            "gs_average_samples" => spec.analytic.gs_average_samples = integer(k, v)?,
            "quad_rel_tol" => spec.analytic.quad.rel_tol = number(k, v)?,
            "euler_D" => inversion.d = number(k, v)?,
            "euler_N" => inversion.n = integer(k, v)?,
            "euler_Q" => inversion.q = integer(k, v)?,
            "clamp_to_unit" => {
                spec.analytic.clamp_to_unit = v.parse().map_err(|_| type_error(k, v, "true or false"))?;
            }
            _ => spec.base.set_param(k, number(k, v)?)?,
        }
    }
    spec.analytic.inversion =
        EulerInversionSpec::new(inversion.d, inversion.n, inversion.q).map_err(|e| ConfigError::invalid("euler_D", e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

/// Parses a stand-alone experiment document. `U`, `S` (unless swept),
/// `sweep_param` and `sweep_values` are required.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let given: HashSet<String> = tokens(text)?.into_iter().map(|(k, _)| k).collect();
    for key in ["sweep_param", "sweep_values"] {
        if !given.contains(key) {
            return Err(ConfigError::Missing(key.into()));
        }
    }
    let spec = apply_overrides(text, ExperimentSpec::default())?;
    for key in ["U", "S"] {
        if !given.contains(key) && spec.sweep_param != key {
            return Err(ConfigError::Missing(key.into()));
        }
    }
    Ok(spec)
}
