//! Numerical inverse Laplace transform by Euler summation of the Fourier
//! series (binomially averaged partial sums).

use crate::error::NumericError;
use crate::numerics::gamma::binomial;
use crate::scalar::{cplx, Cplx, Real};

/// Damping D, series length N and averaging order Q of the Euler inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerInversionSpec<T> {
    pub d: T,
    pub n: usize,
    pub q: usize,
}

impl<T: Real> EulerInversionSpec<T> {
    pub fn new(d: T, n: usize, q: usize) -> Result<Self, NumericError> {
        if !(d > T::zero()) || !d.is_finite() {
            return Err(NumericError::domain("EulerInversionSpec", format!("D = {d} must be positive")));
        }
        if n == 0 || q == 0 {
            return Err(NumericError::domain("EulerInversionSpec", "N and Q must be at least 1"));
        }
        Ok(Self { d, n, q })
    }

    /// Number of distinct transform evaluations per inversion.
    pub fn evaluations(&self) -> usize {
        self.n + self.q + 2
    }

    /// Abscissae t_k = (D + 2πjk)/(2x), k = 0..=N+Q+1.
    pub fn nodes(&self, x: T) -> Vec<Cplx<T>> {
        let two_x = T::lit(2.0) * x;
        (0..self.evaluations())
            .map(|k| cplx(self.d / two_x, T::lit(2.0) * T::PI() * T::of(k) / two_x))
            .collect()
    }
}

impl<T: Real> Default for EulerInversionSpec<T> {
    fn default() -> Self {
        Self { d: T::lit(10.0) * T::LN_10(), n: 21, q: 15 }
    }
}

/// Inverts the Laplace transform `transform(t)` at x > 0, including the
/// discretization and truncation correction terms. The raw sum is returned.
pub fn invert_laplace_euler<T, F>(mut transform: F, x: T, spec: &EulerInversionSpec<T>) -> Result<T, NumericError>
where
    T: Real,
    F: FnMut(Cplx<T>) -> Result<Cplx<T>, NumericError>,
{
    if !(x > T::zero()) || !x.is_finite() {
        return Err(NumericError::domain("invert_laplace_euler", format!("x = {x} must be positive")));
    }
    let mut values = Vec::with_capacity(spec.evaluations());
    for t in spec.nodes(x) {
        let v = transform(t)?.re;
        if !v.is_finite() {
            return Err(NumericError::not_finite("invert_laplace_euler", format!("transform at t = {t} is {v}")));
        }
        values.push(v);
    }
    Ok(euler_sum(&values, x, spec))
}

/// Same as [`invert_laplace_euler`] but for a vector of precomputed
/// Re F̂(t_k) at the nodes returned by [`EulerInversionSpec::nodes`].
pub fn euler_sum<T: Real>(re_values: &[T], x: T, spec: &EulerInversionSpec<T>) -> T {
    let pref = T::lit(2.0).powi(-(spec.q as i32)) * (spec.d / T::lit(2.0)).exp() / x;
    let alt = |k: usize| if k.is_multiple_of(2) { T::one() } else { -T::one() };
    let mut main = T::zero();
    let mut tail = T::zero();
    for q in 0..=spec.q {
        let weight = binomial::<T>(spec.q, q);
        let mut partial = T::zero();
        for (k, &v) in re_values.iter().enumerate().take(spec.n + q + 1) {
            let delta = if k == 0 { T::lit(2.0) } else { T::one() };
            partial += alt(k) * v / delta;
        }
        main += weight * partial;
        let k = spec.n + q + 1;
        tail += alt(k) * weight * re_values[k];
    }
    let damp = (-spec.d).exp();
    pref * main + damp / (T::one() - damp) + pref * tail
}

/// CDF at x from a flipped MGF M(−t): inverts M(−t)/t.
pub fn cdf_from_mgf<T, F>(mut mgf: F, x: T, spec: &EulerInversionSpec<T>) -> Result<T, NumericError>
where
    T: Real,
    F: FnMut(Cplx<T>) -> Result<Cplx<T>, NumericError>,
{
    invert_laplace_euler(|t| Ok(mgf(t)? / t), x, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Cplx<f64> {
        Cplx::new(1.0, 0.0)
    }

    #[test]
    fn exponential_cdf() {
        let spec = EulerInversionSpec::default();
        let f = cdf_from_mgf(|t| Ok(one() / (one() + t)), 1.0, &spec).unwrap();
        assert!((f - (1.0 - (-1.0_f64).exp())).abs() < 1e-8, "{f}");
    }

    #[test]
    fn degenerate_cdf() {
        let spec = EulerInversionSpec::default();
        let f = cdf_from_mgf(|_| Ok(one()), 1.0, &spec).unwrap();
        assert!((f - 1.0).abs() < 1e-8, "{f}");
    }

    #[test]
    fn erlang_two_cdf() {
        let spec = EulerInversionSpec::default();
        let f = cdf_from_mgf(|t| Ok(one() / ((one() + t) * (one() + t))), 2.0, &spec).unwrap();
        let exact = 1.0 - (-2.0_f64).exp() * 3.0;
        assert!((exact - 0.593_994_150_290_161_9).abs() < 1e-15);
        assert!((f - exact).abs() < 1e-8, "{f}");
    }

    #[test]
    fn node_count_and_spec_validation() {
        let spec = EulerInversionSpec::<f64>::default();
        assert_eq!(spec.nodes(0.5).len(), 38);
        assert!(EulerInversionSpec::new(0.0, 21, 15).is_err());
        assert!(EulerInversionSpec::new(5.0, 0, 15).is_err());
        assert!(invert_laplace_euler(|t| Ok(t), -1.0, &spec).is_err());
    }

    #[test]
    fn nan_transform_is_reported() {
        let spec = EulerInversionSpec::default();
        let r = invert_laplace_euler(|_| Ok(Cplx::new(f64::NAN, 0.0)), 1.0, &spec);
        assert!(matches!(r, Err(NumericError::NotFinite { .. })));
    }
}
