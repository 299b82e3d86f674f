use std::path::PathBuf;

use super::config::parse_values;
use super::{Engine, ExperimentSpec};
use crate::error::ConfigError;
use crate::montecarlo::Scheme;

/// A named figure setup. Most presets run one sweep per curve family
/// member; each variant writes `<stem>_<label>.csv`.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub variants: Vec<(String, ExperimentSpec)>,
}

impl Preset {
    /// Output file of one variant given the chosen base path.
    pub fn variant_path(&self, base: &std::path::Path, label: &str) -> PathBuf {
        if self.variants.len() == 1 {
            return base.to_path_buf();
        }
        let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let name = match base.extension() {
            Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
            None => format!("{stem}_{label}"),
        };
        base.with_file_name(name)
    }
}

/// Downlink samples for the SIC best-user average in presets.
const PRESET_GS_SAMPLES: usize = 2_000;

fn sweep(name: &str, param: &str, range: &str, set: &[(&str, f64)]) -> ExperimentSpec {
    let mut spec = ExperimentSpec {
        sweep_param: param.into(),
        sweep_values: parse_values("sweep_values", range).expect("preset range"),
        output_path: PathBuf::from(format!("{name}.csv")),
        ..ExperimentSpec::default()
    };
    spec.analytic.gs_average_samples = PRESET_GS_SAMPLES;
    for &(k, v) in set {
        spec.base.set_param(k, v).expect("preset key");
    }
    spec
}

fn family(name: &str, param: &str, range: &str, fixed: &[(&str, f64)], key: &str, members: &[f64]) -> Vec<(String, ExperimentSpec)> {
    members
        .iter()
        .map(|&m| {
            let mut set = fixed.to_vec();
            set.push((key, m));
            (format!("{key}{m}"), sweep(name, param, range, &set))
        })
        .collect()
}

pub fn presets() -> Vec<Preset> {
    let mut out = Vec::new();

    let mut fig5 = family("fig5_validation", "P_u_dBm", "4:20:2", &[("U", 5.0)], "S", &[3.0, 5.0]);
    for (_, spec) in &mut fig5 {
        spec.engines = vec![Engine::MonteCarlo, Engine::Analytic];
    }
    out.push(Preset {
        name: "fig5_validation",
        description: "OP vs P_u, U=5, S in {3,5}, Monte Carlo and analytic",
        variants: fig5,
    });
    out.push(Preset {
        name: "fig6_satellites",
        description: "OP vs S=1..8 at P_u=4 dBm, U in {5,10,15}",
        variants: family("fig6_satellites", "S", "1:8:1", &[], "U", &[5.0, 10.0, 15.0]),
    });
    out.push(Preset {
        name: "fig7_users",
        description: "OP vs U=2..15 at P_u=4 dBm, S in {2,3,4}",
        variants: family("fig7_users", "U", "2:15:1", &[], "S", &[2.0, 3.0, 4.0]),
    });
    out.push(Preset {
        name: "fig8_altitude",
        description: "OP vs altitude 600..1800 km, U=15, S in {5,10,15}",
        variants: family("fig8_altitude", "altitude_km", "600:1800:100", &[("U", 15.0)], "S", &[5.0, 10.0, 15.0]),
    });
    out.push(Preset {
        name: "fig9_mask_angle",
        description: "OP vs mask angle 0..80 deg, S=3, U in {5,10,15}",
        variants: family("fig9_mask_angle", "mask_angle_deg", "0:80:5", &[("S", 3.0)], "U", &[5.0, 10.0, 15.0]),
    });
    out.push(Preset {
        name: "fig10_order",
        description: "per-order OP vs P_u, U=5, S=2",
        variants: vec![("ordered".into(), sweep("fig10_order", "P_u_dBm", "4:20:2", &[("U", 5.0), ("S", 2.0)]))],
    });

    let icsi = |label: &str, phi: f64, chi: f64, xi: f64| {
        let set = [("U", 5.0), ("S", 3.0), ("phi", phi), ("chi", chi), ("xi", xi)];
        (label.to_string(), sweep("fig11_icsi", "P_u_dBm", "0:30:2", &set))
    };
    out.push(Preset {
        name: "fig11_icsi",
        description: "OP vs P_u, U=5, S=3, perfect and mismatched CSI",
        variants: vec![
            icsi("perfect", 0.0, 0.0, 0.0),
            icsi("phi0.001_chi0", 0.001, 0.0, 0.0),
            icsi("phi0.01_chi0", 0.01, 0.0, 0.0),
            icsi("phi1_chi0.1", 1.0, 0.1, 0.0),
            icsi("phi1_chi0.2", 1.0, 0.2, 0.0),
            icsi("phi0.01_chi0_xi0.01", 0.01, 0.0, 0.01),
        ],
    });
    for p in &mut out {
        for (_, spec) in &mut p.variants {
            spec.schemes = vec![Scheme::Cm, Scheme::Sic];
        }
    }
    out
}

pub fn preset(name: &str) -> Result<Preset, ConfigError> {
    presets().into_iter().find(|p| p.name == name).ok_or_else(|| ConfigError::UnknownPreset(name.into()))
}
