use super::{AnalyticOutage, AnalyticSettings, SrSeries, Trap};
use crate::error::{NumericError, Result};
use crate::geometry::prob_at_least_visible;
use crate::numerics::{bessel_k_scaled, binomial, cdf_from_mgf, factorial, gamma_hyperu, integrate};
use crate::scalar::Cplx;
use crate::system::{DerivedConstants, SystemConfig};

/// Per-scenario tables for the conditional CDF/MGF of one satellite branch.
pub(super) struct CmKernel {
    up: SrSeries,
    down: SrSeries,
    a: f64,
    c: f64,
    eta_u: f64,
    eta_s: f64,
    alpha: f64,
}

impl CmKernel {
    pub(super) fn new(cfg: &SystemConfig, consts: &DerivedConstants) -> Self {
        Self {
            up: SrSeries::new(&cfg.uplink_fading),
            down: SrSeries::new(&cfg.downlink_fading),
            a: consts.a_const,
            c: consts.c_const,
            eta_u: consts.eta_u,
            eta_s: consts.eta_s,
            alpha: cfg.alpha,
        }
    }

    /// (a r^α/η_u, C r^α/(η_u η_s)), the unit-scale slopes at range r.
    fn slopes(&self, r_km: f64) -> (f64, f64) {
        let ra = (r_km * 1000.0).powf(self.alpha);
        (self.a * ra / self.eta_u, self.c * ra / (self.eta_u * self.eta_s))
    }

    fn cdf(&self, x: f64, r_km: f64) -> Result<f64, NumericError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let (ka, kc) = self.slopes(r_km);
        let (a1, a2) = (self.up.rate, self.down.rate);
        let (xa, xc) = (x * ka, x * kc);
        let arg = 2.0 * (a1 * a2 * xc).sqrt();
        let mut survival = 0.0;
        for (p, &cp) in self.up.survival.iter().enumerate() {
            for (k, &dk) in self.down.density.iter().enumerate() {
                if cp == 0.0 || dk == 0.0 {
                    continue;
                }
                for z in 0..=p {
                    let n = k as f64 + 1.0 - z as f64;
                    let kn = bessel_k_scaled(n, arg)?;
                    let ln = binomial::<f64>(p, z).ln() + (p - z) as f64 * xa.ln() + z as f64 * xc.ln() - a1 * xa
                        + std::f64::consts::LN_2
                        + 0.5 * n * (a1 * xc / a2).ln()
                        + kn.ln()
                        - arg;
                    survival += cp * dk * ln.exp();
                }
            }
        }
        Ok(1.0 - survival)
    }

    fn mgf(&self, t: Cplx<f64>, r_km: f64) -> Result<Cplx<f64>, NumericError> {
        let (ka, kc) = self.slopes(r_km);
        let (a1, a2) = (self.up.rate, self.down.rate);
        let eps = t + a1 * ka;
        let ln_eps = eps.ln();
        let y = a1 * a2 * kc / eps;
        let mut sum = Cplx::new(0.0, 0.0);
        for (p, &cp) in self.up.survival.iter().enumerate() {
            for (k, &dk) in self.down.density.iter().enumerate() {
                if cp == 0.0 || dk == 0.0 {
                    continue;
                }
                for z in 0..=p {
                    let au = (p + 2 + k - z) as f64;
                    let bu = (2 + k) as f64 - z as f64;
                    let gu = gamma_hyperu(au, bu, y)?;
                    let ln = binomial::<f64>(p, z).ln()
                        + factorial::<f64>(p).ln()
                        + (p - z) as f64 * ka.ln()
                        + (k + 1) as f64 * kc.ln()
                        + (k + 1 - z) as f64 * a1.ln();
                    sum += gu * (Cplx::new(ln, 0.0) - ln_eps * au).exp() * (cp * dk);
                }
            }
        }
        let m = Cplx::new(1.0, 0.0) - t * sum;
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(NumericError::not_finite("cm_conditional_mgf", format!("t = {t}, r = {r_km} km")));
        }
        Ok(m)
    }

    pub(super) fn marginal_mgf(&self, t: Cplx<f64>, cfg: &SystemConfig, settings: &AnalyticSettings) -> Result<Cplx<f64>, NumericError> {
        let (lo, hi) = (cfg.geometry.r_min(), cfg.geometry.r_max());
        let span = hi * hi - lo * lo;
        if span <= 0.0 {
            return self.mgf(t, lo);
        }
        let mut trap = Trap::new();
        let res = integrate(|r: f64| trap.catch(self.mgf(t, r)) * (2.0 * r / span), lo, hi, &settings.quad)?;
        trap.check()?;
        Ok(res.value)
    }
}

/// F_{γ_us | r_us}(x): one branch, conditioned on the user range (km).
pub fn cm_conditional_cdf(x: f64, r_km: f64, cfg: &SystemConfig, consts: &DerivedConstants) -> Result<f64> {
    Ok(CmKernel::new(cfg, consts).cdf(x, r_km)?)
}

/// M_{γ_us | r_us}(−t).
pub fn cm_conditional_mgf(t: Cplx<f64>, r_km: f64, cfg: &SystemConfig, consts: &DerivedConstants) -> Result<Cplx<f64>> {
    if !(t.re > 0.0) {
        return Err(NumericError::domain("cm_conditional_mgf", format!("Re(t) = {} must be positive", t.re)).into());
    }
    Ok(CmKernel::new(cfg, consts).mgf(t, r_km)?)
}

/// M_{γ_us}(−t), averaged over the range law.
pub fn cm_marginal_mgf(t: Cplx<f64>, cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<Cplx<f64>> {
    if !(t.re > 0.0) {
        return Err(NumericError::domain("cm_marginal_mgf", format!("Re(t) = {} must be positive", t.re)).into());
    }
    Ok(CmKernel::new(cfg, consts).marginal_mgf(t, cfg, settings)?)
}

/// F_{γ_u}(x) of the MRC output over S branches (raw inversion output).
pub fn cm_user_cdf(x: f64, cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<f64> {
    let kernel = CmKernel::new(cfg, consts);
    let s = cfg.satellites_used as i32;
    Ok(cdf_from_mgf(|t| Ok(kernel.marginal_mgf(t, cfg, settings)?.powi(s)), x, &settings.inversion)?)
}

/// Outage of a generic user under capture-model decoding.
pub fn cm_outage(cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<AnalyticOutage> {
    cfg.validate()?;
    settings.validate()?;
    let f = cm_user_cdf(consts.gamma_th, cfg, consts, settings)?;
    let vis = prob_at_least_visible(cfg.satellites_used, &cfg.geometry)?;
    Ok(AnalyticOutage::new(f, vis, settings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sr_cdf, sr_pdf, CsiMismatch};
    use crate::system::derive_constants;

    fn simpson<V>(f: impl Fn(f64) -> V, a: f64, b: f64, n: usize) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V> + Copy,
    {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            acc = acc + f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * (h / 3.0)
    }

    fn setup(users: usize) -> (SystemConfig, DerivedConstants) {
        let mut cfg = SystemConfig::default();
        cfg.users = users;
        let c = derive_constants(&cfg);
        (cfg, c)
    }

    // F(x|r) = ∫ F_H(x a r^α + x C r^α / g) f_G(g) dg with g = s/(1−s)·scale
    fn cdf_oracle(x: f64, r_km: f64, cfg: &SystemConfig, c: &DerivedConstants) -> f64 {
        let up = cfg.uplink();
        let down = cfg.downlink();
        let ra = (r_km * 1000.0).powf(cfg.alpha);
        let scale = c.eta_s;
        let f = |s: f64| {
            if s <= 0.0 || s >= 1.0 {
                return 0.0;
            }
            let g = scale * s / (1.0 - s);
            let jac = scale / (1.0 - s).powi(2);
            sr_cdf(x * c.a_const * ra + x * c.c_const * ra / g, &up) * sr_pdf(g, &down) * jac
        };
        // split to resolve the density near the origin
        simpson(f, 0.0, 1e-3, 20_000) + simpson(f, 1e-3, 0.05, 20_000) + simpson(f, 0.05, 1.0, 20_000)
    }

    #[test]
    fn conditional_cdf_limits() {
        let (cfg, c) = setup(5);
        assert_eq!(cm_conditional_cdf(0.0, 2000.0, &cfg, &c).unwrap(), 0.0);
        assert!(cm_conditional_cdf(1e-12, 2000.0, &cfg, &c).unwrap() < 1e-6);
        assert!(cm_conditional_cdf(1e4, 2000.0, &cfg, &c).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn conditional_cdf_matches_quadrature() {
        let (cfg, c) = setup(5);
        for &(x, r) in &[(c.gamma_th, 2000.0), (0.05, 1300.0), (0.5, 3000.0)] {
            let got = cm_conditional_cdf(x, r, &cfg, &c).unwrap();
            let want = cdf_oracle(x, r, &cfg, &c);
            assert!((got - want).abs() < 1e-6, "x={x} r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn conditional_cdf_heavy_shadowing() {
        let mut cfg = SystemConfig::default();
        cfg.uplink_fading = crate::channel::ShadowedRicianParams::heavy();
        cfg.downlink_fading = crate::channel::ShadowedRicianParams::heavy();
        cfg.csi = CsiMismatch::new(0.01, 0.0, 0.0).unwrap();
        let c = derive_constants(&cfg);
        let got = cm_conditional_cdf(c.gamma_th, 2000.0, &cfg, &c).unwrap();
        let want = cdf_oracle(c.gamma_th, 2000.0, &cfg, &c);
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    fn mgf_oracle(t: Cplx<f64>, r: f64, cfg: &SystemConfig, c: &DerivedConstants) -> Cplx<f64> {
        // 1 − t ∫ e^{−tx} (1 − F(x|r)) dx with x = s/(1−s)
        let f = |s: f64| {
            if s >= 1.0 {
                return Cplx::new(0.0, 0.0);
            }
            let x = s / (1.0 - s);
            let surv = 1.0 - cm_conditional_cdf(x, r, cfg, c).unwrap();
            (-t * x).exp() * (surv / (1.0 - s).powi(2))
        };
        let n = 4000;
        Cplx::new(1.0, 0.0) - t * (simpson(f, 0.0, 0.2, n) + simpson(f, 0.2, 0.9, n) + simpson(f, 0.9, 1.0, n))
    }

    #[test]
    fn conditional_mgf_matches_definition() {
        let (cfg, c) = setup(5);
        let d = 10.0 * std::f64::consts::LN_10;
        for t in [Cplx::new(1.0, 0.0), Cplx::new(d, 2.0 * std::f64::consts::PI) / (2.0 * c.gamma_th)] {
            let got = cm_conditional_mgf(t, 2000.0, &cfg, &c).unwrap();
            let want = mgf_oracle(t, 2000.0, &cfg, &c);
            assert!((got - want).norm() < 1e-6, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn mgf_normalization() {
        let (cfg, c) = setup(5);
        let s = AnalyticSettings::default();
        let t = Cplx::new(1e-9, 0.0);
        assert!((cm_conditional_mgf(t, 1500.0, &cfg, &c).unwrap() - 1.0).norm() < 1e-6);
        assert!((cm_marginal_mgf(t, &cfg, &c, &s).unwrap() - 1.0).norm() < 1e-6);
        assert!(cm_conditional_mgf(Cplx::new(0.0, 1.0), 1500.0, &cfg, &c).is_err());
    }

    #[test]
    fn marginal_mgf_matches_range_average() {
        let (cfg, c) = setup(5);
        let s = AnalyticSettings::default();
        let (lo, hi) = (cfg.geometry.r_min(), cfg.geometry.r_max());
        for t in [Cplx::new(1.0, 0.0), Cplx::new(98.0, 60.0)] {
            let got = cm_marginal_mgf(t, &cfg, &c, &s).unwrap();
            let want = simpson(|r| cm_conditional_mgf(t, r, &cfg, &c).unwrap() * (2.0 * r), lo, hi, 400) / (hi * hi - lo * lo);
            assert!((got - want).norm() < 1e-4 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn marginal_mgf_point_support() {
        let (mut cfg, _) = setup(5);
        cfg.geometry.mask_angle_deg = 89.999_999_9;
        let c = derive_constants(&cfg);
        let s = AnalyticSettings::default();
        let t = Cplx::new(5.0, 3.0);
        let got = cm_marginal_mgf(t, &cfg, &c, &s).unwrap();
        let want = cm_conditional_mgf(t, cfg.geometry.r_min(), &cfg, &c).unwrap();
        assert!((got - want).norm() < 1e-6);
    }

    #[test]
    fn no_power_gives_visibility() {
        let (mut cfg, _) = setup(5);
        cfg.user_power_dbm = -200.0;
        let c = derive_constants(&cfg);
        let r = cm_outage(&cfg, &c, &AnalyticSettings::default()).unwrap();
        assert!((r.op - r.visibility_factor).abs() < 1e-6, "{r:?}");
    }
}
