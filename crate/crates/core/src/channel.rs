//! Shadowed-Rician fading and the channel-estimation error model.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::error::ConfigError;
use crate::numerics::gamma::{factorial, pochhammer};
use crate::scalar::Real;

/// Shadowed-Rician parameters (m, b, Ω) and the link scale η of H = η|h|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowedRicianParams<T> {
    pub m: u32,
    pub b: T,
    pub omega: T,
    pub eta: T,
}

impl<T: Real> ShadowedRicianParams<T> {
    pub fn new(m: u32, b: T, omega: T, eta: T) -> Result<Self, ConfigError> {
        let p = Self { m, b, omega, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m == 0 {
            return Err(ConfigError::invalid("m", "must be a positive integer"));
        }
        if !(self.b > T::zero()) || !self.b.is_finite() {
            return Err(ConfigError::invalid("b", "must be positive"));
        }
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return Err(ConfigError::invalid("omega", "must be non-negative"));
        }
        if !(self.eta > T::zero()) || !self.eta.is_finite() {
            return Err(ConfigError::invalid("eta", "must be positive and finite"));
        }
        if !(self.beta() - self.delta() > T::zero()) {
            return Err(ConfigError::invalid("omega", "β − δ must be positive"));
        }
        Ok(())
    }

    /// "Average shadowing" (2, 0.063, 0.0005), unit η.
    pub fn average() -> Self {
        Self { m: 2, b: T::lit(0.063), omega: T::lit(0.0005), eta: T::one() }
    }

    /// "Heavy shadowing" (5, 0.251, 0.279), unit η.
    pub fn heavy() -> Self {
        Self { m: 5, b: T::lit(0.251), omega: T::lit(0.279), eta: T::one() }
    }

    pub fn with_eta(self, eta: T) -> Self {
        Self { eta, ..self }
    }

    pub fn alpha(&self) -> T {
        let two_bm = T::lit(2.0) * self.b * T::of(self.m as usize);
        (two_bm / (two_bm + self.omega)).powi(self.m as i32) / (T::lit(2.0) * self.b)
    }

    pub fn beta(&self) -> T {
        T::one() / (T::lit(2.0) * self.b)
    }

    pub fn delta(&self) -> T {
        let two_b = T::lit(2.0) * self.b;
        self.omega / (two_b * (two_b * T::of(self.m as usize) + self.omega))
    }

    /// ζ(κ) = (−1)^κ (1−m)_κ δ^κ / (κ!)².
    pub fn zeta(&self, kappa: u32) -> T {
        let k = kappa as usize;
        let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
        let f = factorial::<T>(k);
        sign * pochhammer(T::one() - T::of(self.m as usize), k) * self.delta().powi(kappa as i32) / (f * f)
    }

    /// Exponential rate (β − δ)/η of H.
    pub fn rate(&self) -> T {
        (self.beta() - self.delta()) / self.eta
    }
}

/// Density of H = η|h|².
pub fn sr_pdf<T: Real>(x: T, p: &ShadowedRicianParams<T>) -> T {
    if x < T::zero() {
        return T::zero();
    }
    let a = p.rate();
    let mut acc = T::zero();
    for k in 0..p.m {
        acc += p.zeta(k) / p.eta.powi(k as i32 + 1) * x.powi(k as i32);
    }
    p.alpha() * acc * (-a * x).exp()
}

/// Distribution function of H = η|h|².
pub fn sr_cdf<T: Real>(x: T, p: &ShadowedRicianParams<T>) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let a = p.rate();
    let mut acc = T::zero();
    for k in 0..p.m {
        let kf = factorial::<T>(k as usize);
        let mut inner = T::zero();
        for q in 0..=k {
            inner += kf / factorial::<T>(q as usize) * a.powi(-((k + 1 - q) as i32)) * x.powi(q as i32);
        }
        acc += p.zeta(k) / p.eta.powi(k as i32 + 1) * inner;
    }
    let v = T::one() - p.alpha() * acc * (-a * x).exp();
    v.max(T::zero()).min(T::one())
}

/// E[H] = Σ_κ α ζ(κ) η Γ(κ+2) / (β−δ)^{κ+2}.
pub fn sr_mean<T: Real>(p: &ShadowedRicianParams<T>) -> T {
    let bd = p.beta() - p.delta();
    let mut acc = T::zero();
    for k in 0..p.m {
        acc += p.zeta(k) * factorial::<T>(k as usize + 1) / bd.powi(k as i32 + 2);
    }
    p.alpha() * p.eta * acc
}

/// Quantile of H by safeguarded Newton iteration on [`sr_cdf`].
pub fn sr_quantile<T: Real>(u: T, p: &ShadowedRicianParams<T>) -> T {
    if !(u > T::zero()) {
        return T::zero();
    }
    let u = u.min(T::one() - T::epsilon());
    let mut lo = T::zero();
    let mut hi = sr_mean(p);
    while sr_cdf(hi, p) < u {
        lo = hi;
        hi *= T::lit(2.0);
    }
    let mut x = T::lit(0.5) * (lo + hi);
    for _ in 0..200 {
        let f = sr_cdf(x, p) - u;
        if f.abs() <= T::epsilon() * u || (hi - lo) <= T::lit(4.0) * T::epsilon() * hi {
            break;
        }
        if f > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let d = sr_pdf(x, p);
        let newton = x - f / d;
        x = if d > T::zero() && newton > lo && newton < hi { newton } else { T::lit(0.5) * (lo + hi) };
    }
    x
}

/// Draws H = η|√Γ e^{jθ} + X + jY|², Γ ~ Gamma(m, Ω/m), X, Y ~ N(0, b).
pub struct SrSampler {
    eta: f64,
    los: Option<Gamma<f64>>,
    diffuse: Normal<f64>,
}

impl SrSampler {
    pub fn new<T: Real>(p: &ShadowedRicianParams<T>) -> Self {
        let m = p.m as f64;
        let omega = p.omega.to_f64().unwrap_or(0.0);
        let b = p.b.to_f64().unwrap_or(0.0);
        let los = if omega > 0.0 { Gamma::new(m, omega / m).ok() } else { None };
        Self {
            eta: p.eta.to_f64().unwrap_or(1.0),
            los,
            diffuse: Normal::new(0.0, b.sqrt()).expect("b validated positive"),
        }
    }

    /// One draw of |h|² (unit η).
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.diffuse.sample(rng);
        let y = self.diffuse.sample(rng);
        let (re, im) = match &self.los {
            Some(g) => {
                let amp = g.sample(rng).sqrt();
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                (amp * theta.cos() + x, amp * theta.sin() + y)
            }
            None => (x, y),
        };
        re * re + im * im
    }

    /// One draw of H = η|h|².
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.eta * self.sample_power(rng)
    }
}

/// n i.i.d. draws of H.
pub fn sample_sr<T: Real, R: Rng + ?Sized>(n: usize, p: &ShadowedRicianParams<T>, rng: &mut R) -> Vec<T> {
    let s = SrSampler::new(p);
    (0..n).map(|_| T::lit(s.sample(rng))).collect()
}

/// Channel-estimation mismatch: σ²_e = φ η^{−χ}; ξ scales the residual left
/// by each cancellation step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsiMismatch<T> {
    pub phi: T,
    pub chi: T,
    pub xi: T,
}

impl<T: Real> CsiMismatch<T> {
    pub fn new(phi: T, chi: T, xi: T) -> Result<Self, ConfigError> {
        let c = Self { phi, chi, xi };
        c.validate()?;
        Ok(c)
    }

    pub fn perfect() -> Self {
        Self { phi: T::zero(), chi: T::zero(), xi: T::zero() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("phi", self.phi), ("chi", self.chi), ("xi", self.xi)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(ConfigError::invalid(key, "must be non-negative and finite"));
            }
        }
        Ok(())
    }

    pub fn error_variance(&self, eta: T) -> T {
        csi_error_variance(self.phi, self.chi, eta)
    }
}

/// σ²_e = φ η^{−χ}.
pub fn csi_error_variance<T: Real>(phi: T, chi: T, eta: T) -> T {
    if phi == T::zero() {
        return T::zero();
    }
    phi * eta.powf(-chi)
}
