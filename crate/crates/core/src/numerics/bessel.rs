//! Modified Bessel function of the second kind for real order.

use crate::error::NumericError;
use crate::scalar::Real;

const MAX_ITER: usize = 10_000;

// Power series of 1/Γ(z) about 0: 1/Γ(z) = Σ c_k z^k, k ≥ 1.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Returns (Γ₁, Γ₂, 1/Γ(1+μ), 1/Γ(1−μ)) for |μ| ≤ 1/2, with
/// Γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ)) / 2μ and Γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2.
fn temme_gammas<T: Real>(mu: T) -> (T, T, T, T) {
    let mut even = T::zero();
    let mut odd = T::zero();
    let mu2 = mu * mu;
    let mut pw = T::one();
    for k in 0..RGAMMA.len() / 2 {
        odd += T::lit(RGAMMA[2 * k]) * pw;
        even += T::lit(RGAMMA[2 * k + 1]) * pw;
        pw *= mu2;
    }
    let gam1 = -even;
    let gam2 = odd;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// K_ν(x) for real ν and x > 0. Negative orders use K_ν = K_{−ν}.
pub fn bessel_k<T: Real>(nu: T, x: T) -> Result<T, NumericError> {
    let (k, _) = bessel_k_pair(nu.abs(), x)?;
    Ok(k)
}

/// e^x K_ν(x), which stays representable for large x.
pub fn bessel_k_scaled<T: Real>(nu: T, x: T) -> Result<T, NumericError> {
    let (k, _) = bessel_k_pair_scaled(nu.abs(), x)?;
    Ok(k)
}

fn bessel_k_pair<T: Real>(nu: T, x: T) -> Result<(T, T), NumericError> {
    let (k0, k1) = bessel_k_pair_scaled(nu, x)?;
    let damp = (-x).exp();
    Ok((k0 * damp, k1 * damp))
}

/// Scaled (K_ν, K_{ν+1}) by Temme's series (x < 2) or Steed's continued
/// fraction, followed by forward recurrence in the order.
fn bessel_k_pair_scaled<T: Real>(nu: T, x: T) -> Result<(T, T), NumericError> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(NumericError::domain("bessel_k", format!("x = {x} must be positive and finite")));
    }
    if !nu.is_finite() {
        return Err(NumericError::domain("bessel_k", format!("order {nu} must be finite")));
    }
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let nl = (nu + half).floor().to_usize().unwrap_or(0);
    let mu = nu - T::of(nl);
    let mu2 = mu * mu;
    let xi = T::one() / x;
    let xi2 = two * xi;
    let eps = T::epsilon();

    let (mut kmu, mut k1) = if x < two {
        let x2 = half * x;
        let pimu = T::PI() * mu;
        let fact = if pimu.abs() < eps { T::one() } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < eps { T::one() } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = half * ee / gampl;
        let mut q = half / (ee * gammi);
        let mut c = T::one();
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = T::of(i);
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(NumericError::NonConvergence {
                function: "bessel_k",
                iterations: MAX_ITER,
                detail: format!("series at nu = {nu}, x = {x}"),
            });
        }
        let scale = x.exp();
        (sum * scale, sum1 * xi2 * scale)
    } else {
        let mut b = two * (T::one() + x);
        let mut d = T::one() / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = T::zero();
        let mut q2 = T::one();
        let a1 = T::lit(0.25) - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = T::one() + q * delh;
        let mut converged = false;
        for i in 2..MAX_ITER {
            let fi = T::of(i);
            a -= two * (fi - T::one());
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += two;
            d = T::one() / (b + a * d);
            delh = (b * d - T::one()) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(NumericError::NonConvergence {
                function: "bessel_k",
                iterations: MAX_ITER,
                detail: format!("continued fraction at nu = {nu}, x = {x}"),
            });
        }
        h = a1 * h;
        let kmu = (T::PI() / (two * x)).sqrt() / s;
        (kmu, kmu * (mu + x + half - h) * xi)
    };

    for i in 1..=nl {
        let next = (mu + T::of(i)) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    if !kmu.is_finite() {
        return Err(NumericError::not_finite("bessel_k", format!("overflow at nu = {nu}, x = {x}")));
    }
    Ok((kmu, k1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k_half(x: f64) -> f64 {
        (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp()
    }

    #[test]
    fn half_order_closed_form() {
        assert_relative_eq!(bessel_k(0.5, 1.0_f64).unwrap(), 0.461_068_504_447_894_4, max_relative = 1e-13);
        for &x in &[0.01, 0.3, 1.9, 2.0, 2.1, 7.5, 40.0] {
            assert_relative_eq!(bessel_k(0.5, x).unwrap(), k_half(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn recurrence_oracle() {
        // K_{3/2}(x) = K_{-1/2}(x) + (1/x) K_{1/2}(x)
        for &x in &[0.2, 2.0, 9.0] {
            let expected = k_half(x) * (1.0 + 1.0 / x);
            assert_relative_eq!(bessel_k(1.5, x).unwrap(), expected, max_relative = 1e-13);
        }
        let x = 2.0;
        let k5_2 = bessel_k(0.5, x).unwrap() + 3.0 / x * bessel_k(1.5, x).unwrap();
        assert_relative_eq!(bessel_k(2.5, x).unwrap(), k5_2, max_relative = 1e-13);
    }

    #[test]
    fn integer_orders_reference() {
        assert_relative_eq!(bessel_k(0.0, 1.0_f64).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(1.0, 1.0_f64).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_k(2.0, 3.0_f64).unwrap(), 0.061_510_458_471_742_2, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(-2.0, 3.0_f64).unwrap(), bessel_k(2.0, 3.0).unwrap());
    }

    #[test]
    fn integral_representation_oracle() {
        // K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt
        for &(nu, x) in &[(0.3_f64, 0.7_f64), (3.0, 1.5), (1.7, 4.0)] {
            let n = 200_000;
            let h = 12.0 / n as f64;
            let mut s = 0.0;
            for i in 0..=n {
                let t = i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                s += w * (-x * t.cosh()).exp() * (nu * t).cosh();
            }
            assert_relative_eq!(bessel_k(nu, x).unwrap(), s * h, max_relative = 1e-9);
        }
    }

    #[test]
    fn scaled_matches_unscaled() {
        assert_relative_eq!(bessel_k_scaled(1.0, 5.0_f64).unwrap() * (-5.0_f64).exp(), bessel_k(1.0, 5.0).unwrap(), max_relative = 1e-14);
        assert!(bessel_k_scaled(2.0, 800.0_f64).unwrap().is_finite());
    }

    #[test]
    fn rejects_non_positive_argument() {
        assert!(bessel_k(1.0, 0.0_f64).is_err());
        assert!(bessel_k(1.0, -2.0_f64).is_err());
    }

    #[test]
    fn decays_monotonically() {
        for &nu in &[0.0, 0.5, 1.0, 2.5] {
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let x = 10f64.powf(-3.0 + i as f64 * 0.08);
                let k = bessel_k(nu, x).unwrap();
                assert!(k > 0.0 && k < prev, "nu {nu} x {x}");
                prev = k;
            }
        }
    }
}
