//! Gamma function family: Γ, ln Γ, ψ, the lower incomplete gamma and the
//! Pochhammer symbol.

use crate::error::NumericError;
use crate::scalar::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const SERIES_MAX_ITER: usize = 10_000;

fn lanczos_sum<T: Real>(x: T) -> T {
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::of(i));
    }
    acc
}

/// Γ(x) for x > 0.
pub fn gamma_fn<T: Real>(x: T) -> Result<T, NumericError> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(NumericError::domain("gamma_fn", format!("x = {x} must be positive and finite")));
    }
    Ok(gamma_unchecked(x))
}

/// Γ(x) for any real x off the poles (reflection below one half).
pub(crate) fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    // small positive integers are returned exactly
    if x <= T::lit(20.0) && x.fract() == T::zero() {
        let n = x.to_usize().unwrap_or(1);
        let mut f = T::one();
        for k in 2..n {
            f *= T::of(k);
        }
        return f;
    }
    let y = x - T::one();
    let t = y + T::lit(LANCZOS_G) + half;
    let two_pi = T::lit(2.0) * T::PI();
    two_pi.sqrt() * t.powf(y + half) * (-t).exp() * lanczos_sum(y)
}

/// 1/Γ(x) for any real x, zero at the poles.
pub fn rgamma<T: Real>(x: T) -> T {
    if x <= T::zero() && x.fract() == T::zero() {
        return T::zero();
    }
    if x > T::lit(170.0) {
        return (-ln_gamma_unchecked(x)).exp();
    }
    T::one() / gamma_unchecked(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma<T: Real>(x: T) -> Result<T, NumericError> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(NumericError::domain("ln_gamma", format!("x = {x} must be positive and finite")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma_unchecked(T::one() - x);
    }
    let y = x - T::one();
    let t = y + T::lit(LANCZOS_G) + half;
    let two_pi = T::lit(2.0) * T::PI();
    half * two_pi.ln() + (y + half) * t.ln() - t + lanczos_sum(y).ln()
}

/// Digamma ψ(x) for real x that is not a non-positive integer.
pub fn digamma<T: Real>(x: T) -> Result<T, NumericError> {
    if !x.is_finite() || (x <= T::zero() && x.fract() == T::zero()) {
        return Err(NumericError::domain("digamma", format!("pole at x = {x}")));
    }
    if x < T::zero() {
        let pi = T::PI();
        return Ok(digamma(T::one() - x)? - pi / (pi * x).tan());
    }
    let mut x = x;
    let mut acc = T::zero();
    while x < T::lit(14.0) {
        acc -= T::one() / x;
        x += T::one();
    }
    let inv2 = T::one() / (x * x);
    let series = inv2
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 120.0)
                    - inv2 * (T::lit(1.0 / 252.0) - inv2 * (T::lit(1.0 / 240.0) - inv2 * T::lit(1.0 / 132.0)))));
    Ok(acc + x.ln() - T::lit(0.5) / x - series)
}

/// Pochhammer symbol (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1.
pub fn pochhammer<T: Real>(x: T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (x + T::of(i)))
}

/// Binomial coefficient as a floating point value.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| acc * T::of(n - i) / T::of(i + 1))
}

/// n! as a floating point value.
pub fn factorial<T: Real>(n: usize) -> T {
    (2..=n).fold(T::one(), |acc, i| acc * T::of(i))
}

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^(s-1) e^(-t) dt.
pub fn lower_incomplete_gamma<T: Real>(s: T, x: T) -> Result<T, NumericError> {
    check_incomplete_args("lower_incomplete_gamma", s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    Ok(scaled_lower_gamma(s, x)? * x.powf(s))
}

/// Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s).
pub fn regularized_lower_gamma<T: Real>(s: T, x: T) -> Result<T, NumericError> {
    check_incomplete_args("regularized_lower_gamma", s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        let series = lower_series(s, x)?;
        Ok((s * x.ln() - x - ln_gamma_unchecked(s)).exp() * series)
    } else {
        let q = upper_fraction(s, x)? * (s * x.ln() - x - ln_gamma_unchecked(s)).exp();
        Ok(T::one() - q)
    }
}

/// γ(s, x) / x^s, finite and smooth as x → 0 where it tends to 1/s.
pub fn scaled_lower_gamma<T: Real>(s: T, x: T) -> Result<T, NumericError> {
    check_incomplete_args("scaled_lower_gamma", s, x)?;
    if x == T::zero() {
        return Ok(T::one() / s);
    }
    if x < s + T::one() {
        Ok((-x).exp() * lower_series(s, x)?)
    } else {
        // γ = Γ(s) - Γ(s, x)
        let upper = upper_fraction(s, x)? * (s * x.ln() - x).exp();
        Ok((gamma_unchecked(s) - upper) / x.powf(s))
    }
}

fn check_incomplete_args<T: Real>(function: &'static str, s: T, x: T) -> Result<(), NumericError> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(NumericError::domain(function, format!("s = {s} must be positive")));
    }
    if !(x >= T::zero()) || x.is_nan() {
        return Err(NumericError::domain(function, format!("x = {x} must be non-negative")));
    }
    Ok(())
}

/// Σ_{n≥0} xⁿ / (s (s+1) ... (s+n)), so that γ(s,x) = e^(-x) x^s · series.
fn lower_series<T: Real>(s: T, x: T) -> Result<T, NumericError> {
    let mut term = T::one() / s;
    let mut sum = term;
    let mut a = s;
    for _ in 0..SERIES_MAX_ITER {
        a += T::one();
        term *= x / a;
        sum += term;
        if term.abs() < sum.abs() * T::epsilon() {
            return Ok(sum);
        }
    }
    Err(NumericError::NonConvergence {
        function: "lower_incomplete_gamma",
        iterations: SERIES_MAX_ITER,
        detail: format!("series at s = {s}, x = {x}"),
    })
}

/// Continued fraction for Γ(s, x) e^x x^(-s) (modified Lentz).
fn upper_fraction<T: Real>(s: T, x: T) -> Result<T, NumericError> {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - s;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..SERIES_MAX_ITER {
        let an = -T::of(i) * (T::of(i) - s);
        b += T::lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h *= delta;
        if (delta - T::one()).abs() < T::epsilon() {
            return Ok(h);
        }
    }
    Err(NumericError::NonConvergence {
        function: "lower_incomplete_gamma",
        iterations: SERIES_MAX_ITER,
        detail: format!("continued fraction at s = {s}, x = {x}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_at_integers() {
        assert_eq!(gamma_fn(1.0_f64).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0_f64).unwrap(), 24.0);
        assert_relative_eq!(gamma_fn(10.5_f64).unwrap(), 1_133_278.388_948_441_3, max_relative = 1e-12);
    }

    #[test]
    fn gamma_half_integer() {
        // Γ(5/2) = 3√π/4
        let exact = 0.75 * std::f64::consts::PI.sqrt();
        assert_relative_eq!(gamma_fn(2.5_f64).unwrap(), exact, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(2.5_f64).unwrap(), 1.329_340_388_179_137, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(0.5_f64).unwrap(), std::f64::consts::PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn gamma_rejects_non_positive() {
        assert!(gamma_fn(0.0_f64).is_err());
        assert!(gamma_fn(-1.5_f64).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1_f64, 0.7, 1.3, 4.2, 17.9, 60.0] {
            assert_relative_eq!(ln_gamma(x).unwrap(), gamma_fn(x).unwrap().ln(), max_relative = 1e-11, epsilon = 1e-13);
        }
    }

    #[test]
    fn digamma_values() {
        let g = 0.577_215_664_901_532_9;
        assert_relative_eq!(digamma(1.0_f64).unwrap(), -g, max_relative = 1e-13);
        assert_relative_eq!(digamma(0.5_f64).unwrap(), -g - 2.0 * 2.0_f64.ln(), max_relative = 1e-13);
        assert_relative_eq!(digamma(4.0_f64).unwrap(), 1.0 + 0.5 + 1.0 / 3.0 - g, max_relative = 1e-13);
        assert!(digamma(-2.0_f64).is_err());
    }

    #[test]
    fn lower_incomplete_gamma_values() {
        assert_relative_eq!(lower_incomplete_gamma(1.0, 1.0_f64).unwrap(), 1.0 - (-1.0_f64).exp(), max_relative = 1e-14);
        assert_eq!(lower_incomplete_gamma(3.7, 0.0_f64).unwrap(), 0.0);
        // saturation to Γ(2.5)
        assert_relative_eq!(lower_incomplete_gamma(2.5, 50.0_f64).unwrap(), 1.329_340_388_179_137, max_relative = 1e-12);
        // γ(2, x) = 1 - (1 + x) e^(-x)
        for &x in &[0.3, 2.9, 3.1, 12.0] {
            let exact = 1.0 - (1.0 + x) * (-x as f64).exp();
            assert_relative_eq!(lower_incomplete_gamma(2.0, x).unwrap(), exact, max_relative = 1e-13);
        }
        assert!(lower_incomplete_gamma(0.0, 1.0_f64).is_err());
        assert!(lower_incomplete_gamma(1.0, -1.0_f64).is_err());
    }

    #[test]
    fn scaled_lower_gamma_small_argument() {
        assert_relative_eq!(scaled_lower_gamma(2.0, 1e-12_f64).unwrap(), 0.5, max_relative = 1e-10);
        let x: f64 = 7.0;
        assert_relative_eq!(
            scaled_lower_gamma(1.5, x).unwrap() * x.powf(1.5),
            lower_incomplete_gamma(1.5, x).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(3.0_f64, 4), 360.0);
        assert_eq!(pochhammer(0.3_f64, 0), 1.0);
        assert_eq!(pochhammer(1.0 - 2.0_f64, 1), -1.0);
        assert_eq!(binomial::<f64>(10, 5), 252.0);
        assert_eq!(factorial::<f64>(6), 720.0);
    }

    #[test]
    fn single_precision_instantiation() {
        assert!((gamma_fn(5.0_f32).unwrap() - 24.0).abs() < 1e-4);
        assert!((lower_incomplete_gamma(1.0_f32, 1.0).unwrap() - 0.632_120_6).abs() < 1e-5);
    }
}
