//! Confluent hypergeometric U, Whittaker W and Gauss ₂F₁.

use num_complex::ComplexFloat;

use crate::error::NumericError;
use crate::numerics::gamma::{binomial, digamma, gamma_unchecked, rgamma};
use crate::numerics::quadrature::{integrate, integrate_to_infinity, QuadratureSpec};
use crate::scalar::{cplx, real, Cplx, Real};

const SERIES_MAX_TERMS: usize = 5_000;
const SERIES_RADIUS: f64 = 0.9;

fn tight_spec<T: Real>() -> QuadratureSpec<T> {
    let rel = (T::epsilon() * T::lit(1e3)).max(T::lit(1e-13));
    QuadratureSpec { rel_tol: rel, abs_tol: T::zero(), max_subdivisions: 2_000 }
}

fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x.fract() == T::zero()
}

/// Γ(a)·U(a, b, y) = ∫₀^∞ e^{−ys} s^{a−1} (1+s)^{b−a−1} ds for a > 0 and
/// Re y > 0, integrated along the ray on which e^{−ys} is real.
pub fn gamma_hyperu<T: Real>(a: T, b: T, y: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    if !(a > T::zero()) {
        return Err(NumericError::domain("gamma_hyperu", format!("a = {a} must be positive")));
    }
    let r = y.norm();
    if !(y.re > T::zero()) || !r.is_finite() {
        return Err(NumericError::domain("gamma_hyperu", format!("argument {y} must have positive real part")));
    }
    let theta = y.arg();
    let rot = cplx(theta.cos(), -theta.sin());
    let c = b - a - T::one();
    let spec = tight_spec::<T>();
    let inv_r = T::one() / r;
    // integrand in u = r·τ without the u^{a−1} e^{−u} weight
    let shape = |u: T| (real::<T>(T::one()) + rot * (u * inv_r)).powf(c);

    let mut total = Cplx::new(T::zero(), T::zero());
    let split = if r < T::one() { r } else { T::one() };
    if a < T::one() {
        // u = v^{1/a} removes the endpoint singularity
        let inv_a = T::one() / a;
        let v_split = split.powf(a);
        let head = integrate(
            |v: T| {
                let u = v.powf(inv_a);
                shape(u) * ((-u).exp() * inv_a)
            },
            T::zero(),
            v_split,
            &spec,
        )?;
        total += head.value;
    } else {
        let head = integrate(|u: T| shape(u) * (u.powf(a - T::one()) * (-u).exp()), T::zero(), split, &spec)?;
        total += head.value;
    }
    if split < T::one() {
        let (w0, w1) = (split.ln(), T::zero());
        let mid = integrate(
            |w: T| {
                let u = w.exp();
                shape(u) * (u.powf(a) * (-u).exp())
            },
            w0,
            w1,
            &spec,
        )?;
        total += mid.value;
    }
    let tail = integrate_to_infinity(
        |u: T| {
            let g = u.powf(a - T::one()) * (-u).exp();
            if g == T::zero() {
                Cplx::new(T::zero(), T::zero())
            } else {
                shape(u) * g
            }
        },
        T::one(),
        &spec,
    )?;
    total += tail.value;
    // e^{−iaθ} r^{−a}
    let phase = cplx((a * theta).cos(), -(a * theta).sin()) * r.powf(-a);
    let out = total * phase;
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(NumericError::not_finite("gamma_hyperu", format!("a = {a}, b = {b}, y = {y}")));
    }
    Ok(out)
}

/// Tricomi's confluent hypergeometric function U(a, b, x) for real a, b and x > 0.
pub fn hyperu<T: Real>(a: T, b: T, x: T) -> Result<T, NumericError> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(NumericError::domain("hyperu", format!("x = {x} must be positive")));
    }
    if is_nonpositive_integer(a) {
        // U(−n, b, x) = (−1)^n Σ_s C(n,s) (b+s)_{n−s} (−x)^s
        let n = (-a).to_usize().unwrap_or(0);
        let mut sum = T::zero();
        for s in 0..=n {
            let mut poch = T::one();
            for i in 0..(n - s) {
                poch *= b + T::of(s + i);
            }
            sum += binomial::<T>(n, s) * poch * (-x).powi(s as i32);
        }
        return Ok(if n.is_multiple_of(2) { sum } else { -sum });
    }
    if a > T::zero() {
        let g = gamma_hyperu(a, b, real(x))?;
        return Ok(g.re * rgamma(a));
    }
    let a2 = a - b + T::one();
    if a2 > T::zero() || is_nonpositive_integer(a2) {
        return Ok(x.powf(T::one() - b) * hyperu(a2, T::lit(2.0) - b, x)?);
    }
    // downward recurrence in a from the positive half line:
    // U(a−1) = −(b − 2a − x) U(a) − a(a − b + 1) U(a+1)
    let steps = (-a).floor().to_usize().unwrap_or(0) + 1;
    let top = a + T::of(steps);
    let mut u_hi = hyperu(top + T::one(), b, x)?;
    let mut u_cur = hyperu(top, b, x)?;
    let mut ak = top;
    for _ in 0..steps {
        let u_lo = -(b - T::lit(2.0) * ak - x) * u_cur - ak * (ak - b + T::one()) * u_hi;
        u_hi = u_cur;
        u_cur = u_lo;
        ak -= T::one();
    }
    Ok(u_cur)
}

/// Whittaker function W_{μ,ν}(x) = e^{−x/2} x^{ν+1/2} U(ν−μ+1/2, 1+2ν, x), x > 0.
pub fn whittaker_w<T: Real>(mu: T, nu: T, x: T) -> Result<T, NumericError> {
    let half = T::lit(0.5);
    let u = hyperu(nu - mu + half, T::one() + T::lit(2.0) * nu, x)?;
    let w = (-half * x).exp() * x.powf(nu + half) * u;
    if !w.is_finite() {
        return Err(NumericError::not_finite("whittaker_w", format!("mu = {mu}, nu = {nu}, x = {x}")));
    }
    Ok(w)
}

/// Whittaker W_{μ,ν}(y) for complex y with Re y > 0, provided ν−μ+1/2 > 0.
pub fn whittaker_w_complex<T: Real>(mu: T, nu: T, y: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    let half = T::lit(0.5);
    let a = nu - mu + half;
    let g = gamma_hyperu(a, T::one() + T::lit(2.0) * nu, y)?;
    Ok((-y * half).exp() * y.powf(nu + half) * g * rgamma(a))
}

/// Gauss hypergeometric ₂F₁(a, b; c; z) for real z < 1.
pub fn hyp2f1<T: Real>(a: T, b: T, c: T, z: T) -> Result<T, NumericError> {
    if z == T::one() {
        let s = c - a - b;
        if s > T::zero() && !is_nonpositive_integer(c) {
            return Ok(gamma_unchecked(c) * gamma_unchecked(s) * rgamma(c - a) * rgamma(c - b));
        }
        return Err(NumericError::domain("hyp2f1", "divergent at z = 1 with c − a − b ≤ 0"));
    }
    if z > T::one() {
        return Err(NumericError::domain("hyp2f1", format!("z = {z} lies on the branch cut")));
    }
    Ok(hyp2f1_complex(a, b, c, real(z))?.re)
}

/// Gauss hypergeometric ₂F₁(a, b; c; z) for real parameters and complex z
/// off the cut [1, ∞).
pub fn hyp2f1_complex<T: Real>(a: T, b: T, c: T, z: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    if is_nonpositive_integer(c) {
        return Err(NumericError::domain("hyp2f1", format!("c = {c} is a non-positive integer")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(NumericError::domain("hyp2f1", format!("z = {z} is not finite")));
    }
    let one = real::<T>(T::one());
    if z.norm() == T::zero() {
        return Ok(one);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return polynomial(a, b, c, z);
    }
    let radius = T::lit(SERIES_RADIUS);
    let w_direct = z.norm();
    let w_pfaff = (z / (z - one)).norm();
    let w_reflect = (one - z).norm();
    let near_axis = z.im == T::zero() && z.re >= T::one();
    if near_axis {
        return Err(NumericError::domain("hyp2f1", format!("z = {z} lies on the branch cut")));
    }

    if w_direct <= w_pfaff.min(w_reflect) && w_direct <= radius {
        return series(a, b, c, z);
    }
    if w_pfaff <= w_reflect && w_pfaff <= radius {
        // Pfaff: (1−z)^{−a} F(a, c−b; c; z/(z−1))
        let w = z / (z - one);
        return Ok((one - z).powf(-a) * series(a, c - b, c, w)?);
    }
    if w_reflect <= radius {
        if let Some(v) = reflect(a, b, c, z)? {
            return Ok(v);
        }
    }
    euler_integral(a, b, c, z)
}

fn polynomial<T: Real>(a: T, b: T, c: T, z: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    let n = if is_nonpositive_integer(a) { (-a).to_usize().unwrap_or(0) } else { (-b).to_usize().unwrap_or(0) };
    let mut term = real::<T>(T::one());
    let mut sum = term;
    for k in 0..n {
        let fk = T::of(k);
        term = term * z * ((a + fk) * (b + fk) / ((c + fk) * (fk + T::one())));
        sum += term;
    }
    Ok(sum)
}

fn series<T: Real>(a: T, b: T, c: T, z: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    let mut term = real::<T>(T::one());
    let mut sum = term;
    let mut small = 0;
    for k in 0..SERIES_MAX_TERMS {
        let fk = T::of(k);
        term = term * z * ((a + fk) * (b + fk) / ((c + fk) * (fk + T::one())));
        sum += term;
        if term.norm() <= T::epsilon() * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(NumericError::NonConvergence {
        function: "hyp2f1",
        iterations: SERIES_MAX_TERMS,
        detail: format!("power series at a = {a}, b = {b}, c = {c}, z = {z}"),
    })
}

/// Power series Σ_n coef_n · w^n where coef_n is generated by `next`.
fn series_with<T: Real, F>(w: Cplx<T>, mut next: F, what: &str) -> Result<Cplx<T>, NumericError>
where
    F: FnMut(usize) -> Cplx<T>,
{
    let mut sum = Cplx::new(T::zero(), T::zero());
    let mut wp = real::<T>(T::one());
    let mut small = 0;
    for n in 0..SERIES_MAX_TERMS {
        let t = next(n) * wp;
        sum += t;
        if n > 2 && t.norm() <= T::epsilon() * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        wp *= w;
    }
    Err(NumericError::NonConvergence {
        function: "hyp2f1",
        iterations: SERIES_MAX_TERMS,
        detail: format!("{what} series at w = {w}"),
    })
}

/// Connection formulas about z = 1. Returns `None` when c−a−b is so close to
/// an integer that neither the generic nor the logarithmic form is reliable.
fn reflect<T: Real>(a: T, b: T, c: T, z: Cplx<T>) -> Result<Option<Cplx<T>>, NumericError> {
    let one = real::<T>(T::one());
    let w = one - z;
    let s = c - a - b;
    let m_round = s.round();
    let gap = (s - m_round).abs();
    if gap > T::lit(1e-6) {
        // generic case
        let g1 = gamma_unchecked(c) * gamma_unchecked(s) * rgamma(c - a) * rgamma(c - b);
        let g2 = gamma_unchecked(c) * gamma_unchecked(-s) * rgamma(a) * rgamma(b);
        let f1 = if g1 == T::zero() { Cplx::new(T::zero(), T::zero()) } else { series(a, b, a + b - c + T::one(), w)? };
        let f2 = if g2 == T::zero() { Cplx::new(T::zero(), T::zero()) } else { series(c - a, c - b, s + T::one(), w)? };
        return Ok(Some(f1 * g1 + w.powf(s) * f2 * g2));
    }
    if gap != T::zero() {
        return Ok(None);
    }
    let ln_w = w.ln();
    let m_int = m_round.to_i64().unwrap_or(0);
    if m_int == 0 {
        let pref = gamma_unchecked(a + b) * rgamma(a) * rgamma(b);
        let mut coef = T::one();
        let v = series_with(
            w,
            |n| {
                let fnn = T::of(n);
                if n > 0 {
                    coef *= (a + fnn - T::one()) * (b + fnn - T::one()) / (fnn * fnn);
                }
                let psi = T::lit(2.0) * digamma(fnn + T::one()).unwrap_or(T::nan())
                    - digamma(a + fnn).unwrap_or(T::nan())
                    - digamma(b + fnn).unwrap_or(T::nan());
                (real::<T>(psi) - ln_w) * coef
            },
            "logarithmic",
        )?;
        return Ok(Some(v * pref));
    }
    if m_int > 0 {
        let m = m_int as usize;
        let fm = T::of(m);
        // finite part
        let pre1 = gamma_unchecked(fm) * gamma_unchecked(a + b + fm) * rgamma(a + fm) * rgamma(b + fm);
        let mut finite = Cplx::new(T::zero(), T::zero());
        let mut coef = T::one();
        let mut wp = real::<T>(T::one());
        for n in 0..m {
            let fnn = T::of(n);
            if n > 0 {
                coef *= (a + fnn - T::one()) * (b + fnn - T::one()) / (fnn * (T::one() - fm + fnn - T::one()));
            }
            finite += wp * coef;
            wp *= w;
        }
        let pre2 = gamma_unchecked(a + b + fm) * rgamma(a) * rgamma(b);
        let mut coef = T::one() / gamma_unchecked(fm + T::one());
        let tail = series_with(
            w,
            |n| {
                let fnn = T::of(n);
                if n > 0 {
                    coef *= (a + fm + fnn - T::one()) * (b + fm + fnn - T::one()) / (fnn * (fnn + fm));
                }
                let psi = -digamma(fnn + T::one()).unwrap_or(T::nan()) - digamma(fnn + fm + T::one()).unwrap_or(T::nan())
                    + digamma(a + fnn + fm).unwrap_or(T::nan())
                    + digamma(b + fnn + fm).unwrap_or(T::nan());
                (ln_w + real::<T>(psi)) * coef
            },
            "logarithmic",
        )?;
        let zm1_m = (-w).powi(m as i32);
        return Ok(Some(finite * pre1 - zm1_m * tail * pre2));
    }
    let m = (-m_int) as usize;
    let fm = T::of(m);
    let pre1 = gamma_unchecked(fm) * gamma_unchecked(a + b - fm) * rgamma(a) * rgamma(b);
    let mut finite = Cplx::new(T::zero(), T::zero());
    let mut coef = T::one();
    let mut wp = real::<T>(T::one());
    for n in 0..m {
        let fnn = T::of(n);
        if n > 0 {
            coef *= (a - fm + fnn - T::one()) * (b - fm + fnn - T::one()) / (fnn * (T::one() - fm + fnn - T::one()));
        }
        finite += wp * coef;
        wp *= w;
    }
    let pre2 = gamma_unchecked(a + b - fm) * rgamma(a - fm) * rgamma(b - fm);
    let sign = if m.is_multiple_of(2) { T::one() } else { -T::one() };
    let mut coef = T::one() / gamma_unchecked(fm + T::one());
    let tail = if pre2 == T::zero() {
        Cplx::new(T::zero(), T::zero())
    } else {
        series_with(
            w,
            |n| {
                let fnn = T::of(n);
                if n > 0 {
                    coef *= (a + fnn - T::one()) * (b + fnn - T::one()) / (fnn * (fnn + fm));
                }
                let psi = -digamma(fnn + T::one()).unwrap_or(T::nan()) - digamma(fnn + fm + T::one()).unwrap_or(T::nan())
                    + digamma(a + fnn).unwrap_or(T::nan())
                    + digamma(b + fnn).unwrap_or(T::nan());
                (ln_w + real::<T>(psi)) * coef
            },
            "logarithmic",
        )?
    };
    Ok(Some(w.powi(-(m as i32)) * finite * pre1 - tail * (sign * pre2)))
}

/// Euler's integral Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ s^{b−1}(1−s)^{c−b−1}(1−zs)^{−a} ds.
fn euler_integral<T: Real>(a: T, b: T, c: T, z: Cplx<T>) -> Result<Cplx<T>, NumericError> {
    let (a, b) = if c > b && b > T::zero() {
        (a, b)
    } else if c > a && a > T::zero() {
        (b, a)
    } else {
        return Err(NumericError::domain(
            "hyp2f1",
            format!("no convergent representation for a = {a}, b = {b}, c = {c}, z = {z}"),
        ));
    };
    let one = real::<T>(T::one());
    let pref = gamma_unchecked(c) * rgamma(b) * rgamma(c - b);
    let spec = tight_spec::<T>();
    let half = T::lit(0.5);
    // split at 1/2 and map each endpoint singularity away with a power substitution
    let left = integrate(
        |v: T| {
            let s = v.powf(T::one() / b);
            (one - z * s).powf(-a) * ((T::one() - s).powf(c - b - T::one()) / b)
        },
        T::zero(),
        half.powf(b),
        &spec,
    )?;
    let cb = c - b;
    let right = integrate(
        |v: T| {
            let s = T::one() - v.powf(T::one() / cb);
            (one - z * s).powf(-a) * (s.powf(b - T::one()) / cb)
        },
        T::zero(),
        half.powf(cb),
        &spec,
    )?;
    Ok((left.value + right.value) * pref)
}
