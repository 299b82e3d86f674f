//! Semi-analytic outage probability: the capture-model MGF chain, the SIC
//! best-user chain and the high-SNR asymptotics.

mod asymptotic;
mod cm;
mod sic;

pub use asymptotic::{asymptotic_cm_outage, asymptotic_sic_best_outage, asymptotic_user_cdf, asymptotic_user_mgf};
pub use cm::{cm_conditional_cdf, cm_conditional_mgf, cm_marginal_mgf, cm_outage, cm_user_cdf};
pub use sic::{sic_best_outage, sic_conditional_mgf, sic_htilde_cdf, sic_user_cdf_given_g};

use crate::channel::ShadowedRicianParams;
use crate::error::{ConfigError, NumericError};
use crate::numerics::{factorial, EulerInversionSpec, QuadratureSpec};
use crate::scalar::Cplx;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSettings {
    /// Range averaging of the conditional MGF.
    pub quad: QuadratureSpec<f64>,
    pub inversion: EulerInversionSpec<f64>,
    /// Downlink draws for the SIC best-user average.
    pub gs_average_samples: usize,
    pub clamp_to_unit: bool,
    pub seed: u64,
}

impl Default for AnalyticSettings {
    fn default() -> Self {
        Self {
            quad: QuadratureSpec::default(),
            inversion: EulerInversionSpec::default(),
            gs_average_samples: 10_000,
            clamp_to_unit: true,
            seed: 0x5eed,
        }
    }
}

impl AnalyticSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.gs_average_samples == 0 {
            return Err(ConfigError::invalid("gs_average_samples", "must be at least 1"));
        }
        Ok(())
    }
}

/// Outage value with the unclamped inversion output kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticOutage {
    /// F(γ_th)·P[K_vis ≥ S], clamped if requested.
    pub op: f64,
    /// F(γ_th) as returned by the inversion (or average of inversions).
    pub raw_cdf: f64,
    pub visibility_factor: f64,
    /// Set when the asymptotic chain fell back to the interference-free law.
    pub degenerate: bool,
}

impl AnalyticOutage {
    fn new(raw_cdf: f64, visibility_factor: f64, settings: &AnalyticSettings) -> Self {
        let f = if settings.clamp_to_unit { raw_cdf.clamp(0.0, 1.0) } else { raw_cdf };
        Self { op: f * visibility_factor, raw_cdf, visibility_factor, degenerate: false }
    }
}

/// Unit-scale SR power |h|² written as gamma-type sums:
/// survival Σ_p c_p w^p e^{−A w}, density Σ_k d_k g^k e^{−A g}.
#[derive(Debug, Clone)]
struct SrSeries {
    rate: f64,
    survival: Vec<f64>,
    density: Vec<f64>,
}

impl SrSeries {
    fn new(p: &ShadowedRicianParams<f64>) -> Self {
        let unit = p.with_eta(1.0);
        let m = unit.m as usize;
        let rate = unit.beta() - unit.delta();
        let alpha = unit.alpha();
        let zeta: Vec<f64> = (0..m).map(|k| unit.zeta(k as u32)).collect();
        let survival = (0..m)
            .map(|p| {
                (p..m)
                    .map(|k| alpha * factorial::<f64>(k) * zeta[k] / factorial::<f64>(p) * rate.powi(-((k + 1 - p) as i32)))
                    .sum()
            })
            .collect();
        let density = zeta.iter().map(|z| alpha * z).collect();
        Self { rate, survival, density }
    }
}

/// Collects the first error raised inside a quadrature integrand.
struct Trap(Option<NumericError>);

impl Trap {
    fn new() -> Self {
        Self(None)
    }

    fn catch(&mut self, r: Result<Cplx<f64>, NumericError>) -> Cplx<f64> {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.get_or_insert(e);
                Cplx::new(0.0, 0.0)
            }
        }
    }

    fn check(self) -> Result<(), NumericError> {
        self.0.map_or(Ok(()), Err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sr_cdf;

    #[test]
    fn series_reproduces_sr_law() {
        for p in [ShadowedRicianParams::average(), ShadowedRicianParams::heavy()] {
            let s = SrSeries::new(&p);
            assert!((s.survival[0] - 1.0).abs() < 1e-12);
            for &w in &[0.01_f64, 0.1, 0.5, 2.0] {
                let surv: f64 = s.survival.iter().enumerate().map(|(k, c)| c * w.powi(k as i32)).sum::<f64>() * (-s.rate * w).exp();
                assert!((1.0 - surv - sr_cdf(w, &p)).abs() < 1e-12);
            }
        }
    }
}
