//! Scenario configuration, link-budget constants and instantaneous SINRs.

use crate::channel::{sr_mean, CsiMismatch, ShadowedRicianParams};
use crate::error::ConfigError;
use crate::geometry::{mean_range_power, GeometryParams};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const M_PER_KM: f64 = 1_000.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

/// Interference term used by the analytic SIC chain at decoding order l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SicInterferenceModel {
    /// (U−1)Ī at every order, plus (l−1)Ē₃.
    #[default]
    AsPrinted,
    /// (U−l)Ī, plus (l−1)Ē₃.
    Decrementing,
}

/// Full scenario. Powers in dBm, gains in dBi, frequencies in Hz, rates in bit/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub users: usize,
    pub satellites_used: usize,
    pub geometry: GeometryParams<f64>,
    pub uplink_fading: ShadowedRicianParams<f64>,
    pub downlink_fading: ShadowedRicianParams<f64>,
    pub user_power_dbm: f64,
    pub sat_power_dbm: f64,
    pub sat_noise_dbm: f64,
    pub gs_noise_dbm: f64,
    pub user_gain_dbi: f64,
    pub sat_gain_dbi: f64,
    pub gs_gain_dbi: f64,
    pub carrier_hz: f64,
    pub alpha: f64,
    pub rate_bps: f64,
    pub bandwidth_hz: f64,
    pub csi: CsiMismatch<f64>,
    pub sic_model: SicInterferenceModel,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            users: 5,
            satellites_used: 3,
            geometry: GeometryParams { earth_radius_km: 6371.0, altitude_km: 1200.0, mask_angle_deg: 10.0, satellites: 720 },
            uplink_fading: ShadowedRicianParams::average(),
            downlink_fading: ShadowedRicianParams::average(),
            user_power_dbm: 4.0,
            sat_power_dbm: 40.0,
            sat_noise_dbm: -128.0,
            gs_noise_dbm: -98.0,
            user_gain_dbi: 0.0,
            sat_gain_dbi: 30.0,
            gs_gain_dbi: 0.0,
            carrier_hz: 2.0e9,
            alpha: 2.0,
            rate_bps: 10_000.0,
            bandwidth_hz: 125_000.0,
            csi: CsiMismatch::perfect(),
            sic_model: SicInterferenceModel::AsPrinted,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.geometry.validate()?;
        if self.users == 0 {
            return Err(ConfigError::invalid("U", "need at least one user"));
        }
        if self.satellites_used == 0 || self.satellites_used > self.geometry.satellites {
            return Err(ConfigError::invalid("S", "must lie in 1..=K"));
        }
        if !(self.rate_bps >= 0.0) || !self.rate_bps.is_finite() {
            return Err(ConfigError::invalid("rate_bps", "must be non-negative and finite"));
        }
        for (key, v) in [("bandwidth_hz", self.bandwidth_hz), ("alpha", self.alpha), ("carrier_hz", self.carrier_hz)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ConfigError::invalid(key, "must be positive and finite"));
            }
        }
        for (key, v) in [
            ("P_u_dBm", self.user_power_dbm),
            ("P_s_dBm", self.sat_power_dbm),
            ("sigma_n2_dBm", self.sat_noise_dbm),
            ("sigma_w2_dBm", self.gs_noise_dbm),
            ("G_u_dBi", self.user_gain_dbi),
            ("G_sat_dBi", self.sat_gain_dbi),
            ("G_gs_dBi", self.gs_gain_dbi),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::invalid(key, "must be finite"));
            }
        }
        self.uplink_fading.validate()?;
        self.downlink_fading.validate()?;
        self.csi.validate()
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// (λ/4π)^α.
    pub fn free_space_factor(&self) -> f64 {
        (self.wavelength_m() / (4.0 * std::f64::consts::PI)).powf(self.alpha)
    }

    /// η_u = (P_u/σ_n²) 𝒢_u 𝒢_s (λ/4π)^α.
    pub fn eta_u(&self) -> f64 {
        dbm_to_watts(self.user_power_dbm) / dbm_to_watts(self.sat_noise_dbm)
            * db_to_linear(self.user_gain_dbi + self.sat_gain_dbi)
            * self.free_space_factor()
    }

    /// η_s = (P_s/σ_w²) 𝒢_s 𝒢_GS (λ/4π)^α.
    pub fn eta_s(&self) -> f64 {
        dbm_to_watts(self.sat_power_dbm) / dbm_to_watts(self.gs_noise_dbm)
            * db_to_linear(self.sat_gain_dbi + self.gs_gain_dbi)
            * self.free_space_factor()
    }

    /// r^{−α} with r given in km and the path loss evaluated in metres.
    pub fn path_gain(&self, r_km: f64) -> f64 {
        (r_km * M_PER_KM).powf(-self.alpha)
    }

    /// Uplink fading law with its link scale η_u.
    pub fn uplink(&self) -> ShadowedRicianParams<f64> {
        self.uplink_fading.with_eta(self.eta_u())
    }

    /// Downlink fading law with its link scale η_s.
    pub fn downlink(&self) -> ShadowedRicianParams<f64> {
        self.downlink_fading.with_eta(self.eta_s())
    }
}

/// Numeric keys accepted by [`SystemConfig::set_param`].
pub const NUMERIC_KEYS: &[&str] = &[
    "U",
    "S",
    "K",
    "altitude_km",
    "earth_radius_km",
    "mask_angle_deg",
    "P_u_dBm",
    "P_s_dBm",
    "sigma_n2_dBm",
    "sigma_w2_dBm",
    "G_u_dBi",
    "G_sat_dBi",
    "G_gs_dBi",
    "carrier_hz",
    "alpha",
    "rate_bps",
    "bandwidth_hz",
    "phi",
    "chi",
    "xi",
    "uplink_m",
    "uplink_b",
    "uplink_omega",
    "downlink_m",
    "downlink_b",
    "downlink_omega",
];

fn count(key: &str, value: f64) -> Result<usize, ConfigError> {
    if value.fract() != 0.0 || !(value >= 0.0) || value > u32::MAX as f64 {
        return Err(ConfigError::Type { key: key.into(), value: value.to_string(), expected: "non-negative integer" });
    }
    Ok(value as usize)
}

impl SystemConfig {
    /// Sets one numeric field by its configuration key. Does not validate.
    pub fn set_param(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        match key {
            "U" => self.users = count(key, value)?,
            "S" => self.satellites_used = count(key, value)?,
            "K" => self.geometry.satellites = count(key, value)?,
            "altitude_km" => self.geometry.altitude_km = value,
            "earth_radius_km" => self.geometry.earth_radius_km = value,
            "mask_angle_deg" => self.geometry.mask_angle_deg = value,
            "P_u_dBm" => self.user_power_dbm = value,
            "P_s_dBm" => self.sat_power_dbm = value,
            "sigma_n2_dBm" => self.sat_noise_dbm = value,
            "sigma_w2_dBm" => self.gs_noise_dbm = value,
            "G_u_dBi" => self.user_gain_dbi = value,
            "G_sat_dBi" => self.sat_gain_dbi = value,
            "G_gs_dBi" => self.gs_gain_dbi = value,
            "carrier_hz" => self.carrier_hz = value,
            "alpha" => self.alpha = value,
            "rate_bps" => self.rate_bps = value,
            "bandwidth_hz" => self.bandwidth_hz = value,
            "phi" => self.csi.phi = value,
            "chi" => self.csi.chi = value,
            "xi" => self.csi.xi = value,
            "uplink_m" => self.uplink_fading.m = count(key, value)? as u32,
            "uplink_b" => self.uplink_fading.b = value,
            "uplink_omega" => self.uplink_fading.omega = value,
            "downlink_m" => self.downlink_fading.m = count(key, value)? as u32,
            "downlink_b" => self.downlink_fading.b = value,
            "downlink_omega" => self.downlink_fading.omega = value,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }
}

/// γ_th = 2^{2R/B} − 1.
pub fn sinr_threshold(rate_bps: f64, bandwidth_hz: f64) -> f64 {
    (2.0 * rate_bps / bandwidth_hz * std::f64::consts::LN_2).exp_m1()
}

/// Fixed AF gain β_AF (linear amplitude factor).
pub fn af_gain_factor(cfg: &SystemConfig) -> f64 {
    af_gain_squared(cfg, cfg.users).sqrt()
}

fn af_gain_squared(cfg: &SystemConfig, users: usize) -> f64 {
    let ps = dbm_to_watts(cfg.sat_power_dbm);
    let pu = dbm_to_watts(cfg.user_power_dbm);
    let sn = dbm_to_watts(cfg.sat_noise_dbm);
    let gains = db_to_linear(cfg.user_gain_dbi + cfg.sat_gain_dbi);
    let sigma_e2 = cfg.csi.error_variance(cfg.eta_u());
    let received = users as f64 * pu * gains * cfg.free_space_factor() * mean_path_gain(cfg) * (sr_mean(&cfg.uplink_fading) + sigma_e2);
    ps / (received + sn)
}

/// E[r^{−α}] in m^{−α}.
pub fn mean_path_gain(cfg: &SystemConfig) -> f64 {
    mean_range_power(cfg.alpha, &cfg.geometry) * M_PER_KM.powf(-cfg.alpha)
}

/// Scenario constants shared by simulation and analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub users: usize,
    pub eta_u: f64,
    pub eta_s: f64,
    pub gamma_th: f64,
    pub beta_af2: f64,
    /// E[r^{−α}], m^{−α}.
    pub mean_path_gain: f64,
    /// E|ĥ|² of the uplink fading at unit η.
    pub mean_fading_u: f64,
    pub sigma_e2_u: f64,
    pub sigma_e2_s: f64,
    pub ibar: f64,
    pub e1bar: f64,
    pub e2bar: f64,
    pub e3bar: f64,
    pub c_hat: f64,
    pub a_const: f64,
    pub c_const: f64,
    pub sic_model: SicInterferenceModel,
}

impl DerivedConstants {
    /// Slope constant a of the analytic chain at SIC decoding order l ≥ 1.
    pub fn a_for_order(&self, l: usize) -> f64 {
        let l = l.max(1);
        let residual = (l - 1) as f64 * self.e3bar;
        match self.sic_model {
            SicInterferenceModel::AsPrinted => self.a_const + residual,
            SicInterferenceModel::Decrementing => {
                self.users.saturating_sub(l) as f64 * self.ibar + self.users as f64 * self.e1bar + residual + 1.0
            }
        }
    }
}

pub fn derive_constants(cfg: &SystemConfig) -> DerivedConstants {
    let eta_u = cfg.eta_u();
    let eta_s = cfg.eta_s();
    let u = cfg.users as f64;
    let er = mean_path_gain(cfg);
    let mean_fading_u = sr_mean(&cfg.uplink_fading);
    let sigma_e2_u = cfg.csi.error_variance(eta_u);
    let sigma_e2_s = cfg.csi.error_variance(eta_s);
    let ibar = er * eta_u * mean_fading_u;
    let e1bar = eta_u * sigma_e2_u * er;
    let e2bar = eta_s * sigma_e2_s * u * (ibar + e1bar);
    let e3bar = eta_u * cfg.csi.xi * er;
    let r_min_m = cfg.geometry.altitude_km * M_PER_KM;
    let c_hat = r_min_m.powf(cfg.alpha) * (1.0 + u * (ibar + e1bar));
    DerivedConstants {
        users: cfg.users,
        eta_u,
        eta_s,
        gamma_th: sinr_threshold(cfg.rate_bps, cfg.bandwidth_hz),
        beta_af2: af_gain_squared(cfg, cfg.users),
        mean_path_gain: er,
        mean_fading_u,
        sigma_e2_u,
        sigma_e2_s,
        ibar,
        e1bar,
        e2bar,
        e3bar,
        c_hat,
        a_const: (u - 1.0) * ibar + u * e1bar + 1.0,
        c_const: e2bar + c_hat,
        sic_model: cfg.sic_model,
    }
}

/// Per-satellite quantities that do not depend on which user is decoded.
#[derive(Debug, Clone, Copy)]
pub struct SatelliteLink {
    /// Σ_i r_i^{−α} H_i over all users.
    pub total_interference: f64,
    /// Σ_i η_u r_i^{−α} σ²_e.
    pub error_sum: f64,
    /// η_s σ²_{e,s} (Σ_i r_i^{−α}(H_i + η_u σ²_e) + 1) + Ĉ.
    pub relay_noise: f64,
}

impl SatelliteLink {
    /// `path_gain[i]` = r_i^{−α} (m^{−α}), `h[i]` = H_i.
    pub fn new(h: &[f64], path_gain: &[f64], consts: &DerivedConstants) -> Self {
        let mut total = 0.0;
        let mut rsum = 0.0;
        for (&hi, &gi) in h.iter().zip(path_gain) {
            total += gi * hi;
            rsum += gi;
        }
        let err_u = consts.eta_u * consts.sigma_e2_u;
        let error_sum = err_u * rsum;
        let relay_noise = consts.eta_s * consts.sigma_e2_s * (total + error_sum + 1.0) + consts.c_hat;
        Self { total_interference: total, error_sum, relay_noise }
    }

    /// SINR of user u given the interference already removed and the
    /// number of completed cancellations.
    #[inline]
    pub fn sinr(&self, own: f64, removed: f64, cancellations: usize, g: f64, consts: &DerivedConstants) -> f64 {
        let interference = (self.total_interference - removed - own).max(0.0);
        let denom = g * (interference + self.error_sum + cancellations as f64 * consts.e3bar + 1.0) + self.relay_noise;
        g * own / denom
    }
}

/// End-to-end SINR of user `u` through one satellite (exact, per realization).
/// `h`, `r_km` and `cancelled` are indexed by user; `g` is the downlink SNR G_s.
pub fn per_link_sinr(
    h: &[f64],
    g: f64,
    r_km: &[f64],
    u: usize,
    cancelled: &[bool],
    cfg: &SystemConfig,
    consts: &DerivedConstants,
) -> f64 {
    assert!(!cancelled[u], "user {u} is already cancelled");
    let gains: Vec<f64> = r_km.iter().map(|&r| cfg.path_gain(r)).collect();
    let link = SatelliteLink::new(h, &gains, consts);
    let mut removed = 0.0;
    let mut count = 0;
    for (i, &c) in cancelled.iter().enumerate() {
        if c {
            removed += gains[i] * h[i];
            count += 1;
        }
    }
    link.sinr(gains[u] * h[u], removed, count, g, consts)
}

/// MRC output SINR.
pub fn mrc_combine(per_sat: &[f64]) -> f64 {
    per_sat.iter().sum()
}
