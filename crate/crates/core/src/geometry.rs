//! Slant-range statistics of a binomial point process of satellites on a
//! sphere, seen from a ground user with an elevation mask.

use rand::Rng;

use crate::error::{ConfigError, NumericError};
use crate::numerics::gamma::ln_gamma_unchecked;
use crate::scalar::Real;

/// Constellation geometry. Lengths in km, the mask angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams<T> {
    pub earth_radius_km: T,
    pub altitude_km: T,
    pub mask_angle_deg: T,
    pub satellites: usize,
}

impl<T: Real> GeometryParams<T> {
    pub fn new(earth_radius_km: T, altitude_km: T, mask_angle_deg: T, satellites: usize) -> Result<Self, ConfigError> {
        let p = Self { earth_radius_km, altitude_km, mask_angle_deg, satellites };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.earth_radius_km > T::zero()) || !self.earth_radius_km.is_finite() {
            return Err(ConfigError::invalid("earth_radius_km", "must be positive"));
        }
        if !(self.altitude_km > T::zero()) || !self.altitude_km.is_finite() {
            return Err(ConfigError::invalid("altitude_km", "must be positive"));
        }
        if !(self.mask_angle_deg >= T::zero() && self.mask_angle_deg < T::lit(90.0)) {
            return Err(ConfigError::invalid("mask_angle_deg", "must lie in [0, 90)"));
        }
        if self.satellites == 0 {
            return Err(ConfigError::invalid("satellites", "constellation needs at least one satellite"));
        }
        if !(self.r_max() > self.r_min()) {
            return Err(ConfigError::invalid("mask_angle_deg", "maximum slant range collapses onto the altitude"));
        }
        Ok(())
    }

    /// Shortest slant range (zenith pass), equal to the altitude.
    pub fn r_min(&self) -> T {
        self.altitude_km
    }

    pub fn r_max(&self) -> T {
        max_slant_range(self)
    }
}

/// Largest slant range at which a satellite clears the mask angle.
pub fn max_slant_range<T: Real>(p: &GeometryParams<T>) -> T {
    let re = p.earth_radius_km;
    let rs = re * p.mask_angle_deg.to_radians().sin();
    let orbit = re + p.altitude_km;
    (rs * rs + orbit * orbit - re * re).sqrt() - rs
}

/// CDF of the slant range to a visible satellite.
pub fn range_cdf<T: Real>(r: T, p: &GeometryParams<T>) -> T {
    let (lo, hi) = (p.r_min(), p.r_max());
    if r <= lo {
        T::zero()
    } else if r >= hi {
        T::one()
    } else {
        (r * r - lo * lo) / (hi * hi - lo * lo)
    }
}

/// Density of the slant range to a visible satellite, per km.
pub fn range_pdf<T: Real>(r: T, p: &GeometryParams<T>) -> T {
    let (lo, hi) = (p.r_min(), p.r_max());
    if r < lo || r > hi {
        T::zero()
    } else {
        T::lit(2.0) * r / (hi * hi - lo * lo)
    }
}

/// Inverse of [`range_cdf`] for u ∈ [0, 1].
pub fn range_quantile<T: Real>(u: T, p: &GeometryParams<T>) -> T {
    let (lo, hi) = (p.r_min(), p.r_max());
    let u = u.max(T::zero()).min(T::one());
    (lo * lo + u * (hi * hi - lo * lo)).sqrt()
}

/// i.i.d. slant ranges by inverse-CDF sampling.
pub fn sample_ranges<T: Real, R: Rng + ?Sized>(n: usize, p: &GeometryParams<T>, rng: &mut R) -> Vec<T> {
    (0..n).map(|_| range_quantile(T::lit(rng.random::<f64>()), p)).collect()
}

/// Probability that a given satellite of the constellation is visible.
pub fn visibility_probability<T: Real>(p: &GeometryParams<T>) -> T {
    let (lo, hi) = (p.r_min(), p.r_max());
    let re = p.earth_radius_km;
    ((hi * hi - lo * lo) / (T::lit(4.0) * re * (re + lo))).max(T::zero())
}

/// P[K_vis ≥ S] for K_vis ~ Binomial(K, P).
pub fn prob_at_least_visible<T: Real>(s: usize, p: &GeometryParams<T>) -> Result<T, NumericError> {
    binomial_upper_tail(p.satellites, visibility_probability(p), s)
}

/// P[X ≥ s] for X ~ Binomial(n, prob), summing the shorter side in log space.
pub fn binomial_upper_tail<T: Real>(n: usize, prob: T, s: usize) -> Result<T, NumericError> {
    if s > n {
        return Err(NumericError::domain("prob_at_least_visible", format!("S = {s} exceeds K = {n}")));
    }
    if !(prob >= T::zero() && prob <= T::one()) {
        return Err(NumericError::domain("prob_at_least_visible", format!("probability {prob} outside [0, 1]")));
    }
    if s == 0 || prob == T::one() {
        return Ok(T::one());
    }
    if prob == T::zero() {
        return Ok(T::zero());
    }
    let ln_p = prob.ln();
    let ln_q = (-prob).ln_1p();
    let ln_nf = ln_gamma_unchecked(T::of(n + 1));
    let term = |j: usize| {
        (ln_nf - ln_gamma_unchecked(T::of(j + 1)) - ln_gamma_unchecked(T::of(n - j + 1)) + T::of(j) * ln_p + T::of(n - j) * ln_q)
            .exp()
    };
    let mean = T::of(n) * prob;
    if T::of(s) <= mean {
        let lower: T = (0..s).map(term).sum();
        Ok((T::one() - lower).max(T::zero()))
    } else {
        let upper: T = (s..=n).map(term).sum();
        Ok(upper.min(T::one()))
    }
}

/// E[r^{−α}] over the visible slant-range law, in km^{−α}.
pub fn mean_range_power<T: Real>(alpha: T, p: &GeometryParams<T>) -> T {
    let lo = p.r_min();
    let hi = p.r_max();
    let l = (hi / lo).ln();
    if !(l > T::zero()) {
        return lo.powf(-alpha);
    }
    let two = T::lit(2.0);
    let k = two - alpha;
    // (r_max^{2−α} − r_min^{2−α}) / (2−α), relative to r_min^{2−α}
    let integral = if k == T::zero() { l } else { (k * l).exp_m1() / k };
    two * lo.powf(-alpha) * integral / (two * l).exp_m1()
}
