use super::sic::SicKernel;
use super::{AnalyticOutage, AnalyticSettings};
use crate::error::{NumericError, Result};
use crate::geometry::prob_at_least_visible;
use crate::numerics::{cdf_from_mgf, ln_gamma};
use crate::scalar::Cplx;
use crate::system::{DerivedConstants, SystemConfig};

const REL_TOL: f64 = 1e-10;
const MAX_TERMS: usize = 200;

/// Power-series form of the high-SNR branch law: 1 − Σ_p̄ b_p̄ x^p̄.
enum Asymptotic {
    /// `kernel` at slope `snr` carries the same law as `coef` and continues
    /// the MGF inside the radius of convergence of the term-wise series.
    Series { coef: Vec<f64>, min_order: usize, kernel: SicKernel, snr: f64 },
    /// No interference or CSI error: the law of r^{−α}H itself.
    InterferenceFree(SicKernel),
}

impl Asymptotic {
    fn new(cfg: &SystemConfig, consts: &DerivedConstants) -> Result<Self, NumericError> {
        let u = cfg.users as f64;
        let interference = ((u - 1.0) * consts.ibar + u * consts.e1bar) / consts.eta_u;
        if interference <= 0.0 {
            return Ok(Asymptotic::InterferenceFree(SicKernel::new(&cfg.uplink(), &cfg.geometry, cfg.alpha)));
        }
        let fading = cfg.uplink_fading.with_eta(1.0);
        let m = fading.m as usize;
        let rate = fading.beta() - fading.delta();
        let alpha = cfg.alpha;
        let (lo, hi) = (cfg.geometry.r_min(), cfg.geometry.r_max());
        let rho = lo / hi;
        let span = hi * hi / (hi * hi - lo * lo);
        let ln_i = (interference * (hi * 1000.0).powf(alpha)).ln();
        let snr_i = interference * consts.eta_u;
        let ln_fact = |n: usize| ln_gamma(n as f64 + 1.0).expect("positive argument");
        let mut coef = vec![0.0; MAX_TERMS + m];
        for k in 0..m {
            let zeta = fading.zeta(k as u32);
            if zeta == 0.0 {
                continue;
            }
            for p in 0..=k {
                for q in 0..MAX_TERMS {
                    let pb = p + q;
                    let pbf = pb as f64;
                    let ln = std::f64::consts::LN_2 + ln_fact(k) + zeta.abs().ln() + fading.alpha().ln() + pbf * ln_i
                        - ln_fact(p)
                        - ln_fact(q)
                        - (alpha * pbf + 2.0).ln()
                        + (pbf - k as f64 - 1.0) * rate.ln();
                    let sign = if q % 2 == 0 { 1.0 } else { -1.0 } * zeta.signum();
                    let geo = span * (1.0 - rho.powf(alpha * pbf + 2.0));
                    coef[pb] += sign * ln.exp() * geo * (1.0 + pbf / snr_i);
                }
            }
        }
        if coef.iter().any(|c| !c.is_finite()) {
            return Err(NumericError::not_finite("asymptotic series", "coefficient overflow"));
        }
        let kernel = SicKernel::new(&cfg.uplink(), &cfg.geometry, alpha);
        Ok(Asymptotic::Series { coef, min_order: m, kernel, snr: snr_i })
    }

    fn cdf(&self, x: f64) -> Result<f64, NumericError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        match self {
            Asymptotic::InterferenceFree(k) => k.cdf(x),
            Asymptotic::Series { coef, min_order, .. } => {
                let terms = coef.iter().enumerate().map(|(n, c)| Cplx::new(c * x.powi(n as i32), 0.0));
                Ok(1.0 - sum_series(terms, *min_order, "asymptotic_user_cdf")?.re)
            }
        }
    }

    fn mgf(&self, t: Cplx<f64>) -> Result<Cplx<f64>, NumericError> {
        match self {
            Asymptotic::InterferenceFree(k) => k.mgf(t, 1.0),
            Asymptotic::Series { coef, min_order, kernel, snr } => {
                let ln_t = t.ln();
                let terms = coef.iter().enumerate().map(|(n, &c)| {
                    let mag = (ln_gamma(n as f64 + 1.0).expect("positive argument") - ln_t * n as f64).exp();
                    mag * c
                });
                match sum_series(terms, *min_order, "asymptotic_user_mgf") {
                    Ok(sum) => Ok(Cplx::new(1.0, 0.0) - sum),
                    // F = G + x G'/snr with G the kernel law, so M = M_G − t M_G'/snr.
                    Err(NumericError::NonConvergence { .. }) => {
                        let eps = 1e-4;
                        let m = kernel.mgf(t, *snr)?;
                        let dm = (kernel.mgf(t * (1.0 + eps), *snr)? - kernel.mgf(t * (1.0 - eps), *snr)?) / (2.0 * eps);
                        Ok(m - dm / *snr)
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }
}

fn sum_series(terms: impl Iterator<Item = Cplx<f64>>, min_order: usize, name: &'static str) -> Result<Cplx<f64>, NumericError> {
    let mut sum = Cplx::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for (n, term) in terms.enumerate() {
        sum += term;
        if !(sum.re.is_finite() && sum.im.is_finite()) {
            break;
        }
        let mag = term.norm();
        if n >= min_order && mag <= REL_TOL * sum.norm() && mag <= prev {
            return Ok(sum);
        }
        prev = mag;
    }
    Err(NumericError::NonConvergence {
        function: name,
        iterations: MAX_TERMS,
        detail: format!("partial sum {sum}"),
    })
}

/// F^∞_{γ_us}(x), the high-SNR single-branch CDF.
pub fn asymptotic_user_cdf(x: f64, cfg: &SystemConfig, consts: &DerivedConstants) -> Result<f64> {
    Ok(Asymptotic::new(cfg, consts)?.cdf(x)?)
}

/// M^∞_{γ_us}(−t).
pub fn asymptotic_user_mgf(t: Cplx<f64>, cfg: &SystemConfig, consts: &DerivedConstants) -> Result<Cplx<f64>> {
    Ok(Asymptotic::new(cfg, consts)?.mgf(t)?)
}

fn combined_cdf(cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<(f64, bool)> {
    cfg.validate()?;
    let law = Asymptotic::new(cfg, consts)?;
    let s = cfg.satellites_used as i32;
    let f = cdf_from_mgf(|t| Ok(law.mgf(t)?.powi(s)), consts.gamma_th, &settings.inversion)?;
    Ok((f, matches!(law, Asymptotic::InterferenceFree(_))))
}

pub fn asymptotic_cm_outage(cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<AnalyticOutage> {
    let (f, degenerate) = combined_cdf(cfg, consts, settings)?;
    let vis = prob_at_least_visible(cfg.satellites_used, &cfg.geometry)?;
    Ok(AnalyticOutage { degenerate, ..AnalyticOutage::new(f, vis, settings) })
}

pub fn asymptotic_sic_best_outage(cfg: &SystemConfig, consts: &DerivedConstants, settings: &AnalyticSettings) -> Result<AnalyticOutage> {
    let (f, degenerate) = combined_cdf(cfg, consts, settings)?;
    let vis = prob_at_least_visible(cfg.satellites_used, &cfg.geometry)?;
    let best = f.clamp(0.0, 1.0).powi(cfg.users as i32);
    Ok(AnalyticOutage { op: best * vis, raw_cdf: f, visibility_factor: vis, degenerate })
}
