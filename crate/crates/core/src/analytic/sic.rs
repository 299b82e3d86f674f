use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AnalyticOutage, AnalyticSettings, SrSeries};
use crate::channel::{sr_quantile, ShadowedRicianParams};
use crate::error::{NumericError, Result};
use crate::geometry::{prob_at_least_visible, GeometryParams};
use crate::numerics::{cdf_from_mgf, euler_sum, factorial, hyp2f1_complex, scaled_lower_gamma};
use crate::scalar::Cplx;
use crate::system::{DerivedConstants, SystemConfig};

/// Tables for the law of H̃ = r^{−α}H and its slope-scaled MGF.
pub(super) struct SicKernel {
    up: SrSeries,
    eta: f64,
    alpha: f64,
    r_lo: f64,
    r_hi: f64,
}

impl SicKernel {
    pub(super) fn new(fading: &ShadowedRicianParams<f64>, geom: &GeometryParams<f64>, alpha: f64) -> Self {
        Self { up: SrSeries::new(fading), eta: fading.eta, alpha, r_lo: geom.r_min(), r_hi: geom.r_max() }
    }

    fn span(&self) -> f64 {
        self.r_hi * self.r_hi - self.r_lo * self.r_lo
    }

    fn range_power(&self, r_km: f64) -> f64 {
        (r_km * 1000.0).powf(self.alpha)
    }

    pub(super) fn cdf(&self, z: f64) -> Result<f64, NumericError> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        let a = self.up.rate;
        let w_hi = z * self.range_power(self.r_hi) / self.eta;
        let w_lo = z * self.range_power(self.r_lo) / self.eta;
        let mut survival = 0.0;
        for (p, &cp) in self.up.survival.iter().enumerate() {
            let v = p as f64 + 2.0 / self.alpha;
            let hi = self.r_hi * self.r_hi * w_hi.powi(p as i32) * scaled_lower_gamma(v, a * w_hi)?;
            let lo = self.r_lo * self.r_lo * w_lo.powi(p as i32) * scaled_lower_gamma(v, a * w_lo)?;
            survival += cp * (hi - lo);
        }
        Ok(1.0 - 2.0 / (self.alpha * self.span()) * survival)
    }

    /// Flipped MGF of H̃-based SINR with threshold map x ↦ x·slope.
    pub(super) fn mgf(&self, t: Cplx<f64>, slope: f64) -> Result<Cplx<f64>, NumericError> {
        let a = self.up.rate;
        let k = a * slope / self.eta;
        let u_hi = k * self.range_power(self.r_hi);
        let u_lo = k * self.range_power(self.r_lo);
        let one = Cplx::new(1.0, 0.0);
        let mut sum = Cplx::new(0.0, 0.0);
        for (p, &cp) in self.up.survival.iter().enumerate() {
            let v = p as f64 + 2.0 / self.alpha;
            let pf = (p + 1) as f64;
            let j = |u: f64| -> Result<Cplx<f64>, NumericError> {
                let ut = t + u;
                let f = hyp2f1_complex(1.0, pf, v + 1.0, Cplx::new(u, 0.0) / ut)?;
                Ok(f * u.powf(v) / (ut.powf(pf) * v))
            };
            let scale = factorial::<f64>(p) * self.r_hi * self.r_hi * u_hi.powf(-2.0 / self.alpha) * a.powi(-(p as i32));
            let diff = if t.norm() < 1e-10 * u_lo {
                // ∫ v^{V−p−2} dv over [υ₂, υ₁]; relative error O(t/υ₂)
                let e = v - pf;
                let d = if e.abs() < 1e-12 { (u_hi / u_lo).ln() } else { (u_hi.powf(e) - u_lo.powf(e)) / e };
                Cplx::new(d, 0.0)
            } else {
                j(u_hi)? - j(u_lo)?
            };
            sum += diff * (cp * scale);
        }
        let m = one - t * sum * (2.0 / (self.alpha * self.span()));
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(NumericError::not_finite("sic_conditional_mgf", format!("t = {t}, slope = {slope}")));
        }
        Ok(m)
    }
}

/// F_{H̃}(z) for H̃ = r^{−α}H, H drawn from `fading` (with its η), r in metres.
pub fn sic_htilde_cdf(z: f64, fading: &ShadowedRicianParams<f64>, geom: &GeometryParams<f64>, alpha: f64) -> Result<f64> {
    Ok(SicKernel::new(fading, geom, alpha).cdf(z)?)
}

fn slope(consts: &DerivedConstants, g_s: f64) -> f64 {
    consts.a_const + if g_s.is_infinite() { 0.0 } else { consts.c_const / g_s }
}

/// M_{γ_us^{(1)} | G_s}(−t). `g_s` may be +∞.
pub fn sic_conditional_mgf(t: Cplx<f64>, g_s: f64, cfg: &SystemConfig, consts: &DerivedConstants) -> Result<Cplx<f64>> {
    if !(t.re > 0.0) || !(g_s > 0.0) {
        return Err(NumericError::domain("sic_conditional_mgf", format!("need Re(t) > 0 and g_s > 0, got t = {t}, g_s = {g_s}")).into());
    }
    let k = SicKernel::new(&cfg.uplink(), &cfg.geometry, cfg.alpha);
    Ok(k.mgf(t, slope(consts, g_s))?)
}

fn user_cdf(kernel: &SicKernel, x: f64, gs: &[f64], consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<f64, NumericError> {
    let slopes: Vec<f64> = gs.iter().map(|&g| slope(consts, g)).collect();
    cdf_from_mgf(
        |t| {
            let mut m = Cplx::new(1.0, 0.0);
            for &s in &slopes {
                m *= kernel.mgf(t, s)?;
            }
            Ok(m)
        },
        x,
        &settings.inversion,
    )
}

/// F_{γ_u^{(1)} | G}(x) for one set of downlink SNRs, one per satellite.
pub fn sic_user_cdf_given_g(x: f64, gs: &[f64], cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<f64> {
    let k = SicKernel::new(&cfg.uplink(), &cfg.geometry, cfg.alpha);
    Ok(user_cdf(&k, x, gs, consts, settings)?)
}

/// Centered Latin-hypercube levels of G_s: every satellite uses the same
/// `n` stratum midpoints, paired across satellites by seeded permutations.
fn downlink_levels(cfg: &SystemConfig, n: usize, seed: u64) -> (Vec<f64>, Vec<Vec<usize>>) {
    let down = cfg.downlink_fading.with_eta(1.0);
    let eta_s = cfg.eta_s();
    let levels = (0..n).map(|j| eta_s * sr_quantile((j as f64 + 0.5) / n as f64, &down)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms = (0..cfg.satellites_used)
        .map(|_| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    (levels, perms)
}

/// Outage of the first-decoded (best) user under SIC.
pub fn sic_best_outage(cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<AnalyticOutage> {
    cfg.validate()?;
    settings.validate()?;
    let kernel = SicKernel::new(&cfg.uplink(), &cfg.geometry, cfg.alpha);
    let x = consts.gamma_th;
    let nodes = settings.inversion.nodes(x);
    let (levels, perms) = downlink_levels(cfg, settings.gs_average_samples, settings.seed);
    let table: Vec<Vec<Cplx<f64>>> = levels
        .par_iter()
        .map(|&g| nodes.iter().map(|&t| kernel.mgf(t, slope(consts, g))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    let users = cfg.users as i32;
    let values: Vec<f64> = (0..levels.len())
        .into_par_iter()
        .map(|i| {
            let re: Vec<f64> = nodes
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let m = perms.iter().fold(Cplx::new(1.0, 0.0), |acc, p| acc * table[p[i]][k]);
                    (m / t).re
                })
                .collect();
            euler_sum(&re, x, &settings.inversion).clamp(0.0, 1.0).powi(users)
        })
        .collect();
    let f = values.iter().sum::<f64>() / values.len() as f64;
    let vis = prob_at_least_visible(cfg.satellites_used, &cfg.geometry)?;
    Ok(AnalyticOutage::new(f, vis, settings))
}
