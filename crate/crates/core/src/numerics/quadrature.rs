//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::error::NumericError;
use crate::scalar::{Cplx, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and subdivision budget for [`adaptive_quad`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Result<Self, NumericError> {
        if !(rel_tol > T::zero()) {
            return Err(NumericError::domain("QuadratureSpec", format!("rel_tol = {rel_tol} must be positive")));
        }
        if !(abs_tol >= T::zero()) {
            return Err(NumericError::domain("QuadratureSpec", format!("abs_tol = {abs_tol} must be non-negative")));
        }
        if max_subdivisions == 0 {
            return Err(NumericError::domain("QuadratureSpec", "max_subdivisions must be at least 1"));
        }
        Ok(Self { rel_tol, abs_tol, max_subdivisions })
    }

    /// Same spec with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: T) -> Self {
        Self { rel_tol, ..self }
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-4),
            abs_tol: T::zero(),
            max_subdivisions: 650,
        }
    }
}

/// Values that can be integrated: real scalars and complex numbers.
pub trait QuadValue<T: Real>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn magnitude(&self) -> T;
    fn finite(&self) -> bool;
}

impl<T: Real> QuadValue<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl<T: Real> QuadValue<T> for Cplx<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Integral estimate with its error bound and the work spent.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V, T> {
    pub value: V,
    pub error: T,
    pub subdivisions: usize,
}

struct Panel<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
}

fn gk15<T, V, F>(f: &mut F, a: T, b: T) -> Result<Panel<V, T>, NumericError>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let hl = half * (b - a);
    let fc = f(center);
    let mut resg = fc * T::lit(WG[3]);
    let mut resk = fc * T::lit(WGK[7]);
    let mut fv = [V::zero(); 14];
    for j in 0..7 {
        let dx = hl * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk = resk + (f1 + f2) * T::lit(WGK[j]);
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * T::lit(WG[j / 2]);
        }
    }
    if !fc.finite() || fv.iter().any(|v| !v.finite()) {
        return Err(NumericError::not_finite(
            "adaptive_quad",
            format!("integrand not finite on [{a}, {b}]"),
        ));
    }
    let mean = resk * half;
    let mut resasc = (fc - mean).magnitude() * T::lit(WGK[7]);
    let mut resabs = fc.magnitude() * T::lit(WGK[7]);
    for j in 0..7 {
        resasc += T::lit(WGK[j]) * ((fv[2 * j] - mean).magnitude() + (fv[2 * j + 1] - mean).magnitude());
        resabs += T::lit(WGK[j]) * (fv[2 * j].magnitude() + fv[2 * j + 1].magnitude());
    }
    let hla = hl.abs();
    resasc *= hla;
    resabs *= hla;
    let mut err = (resk - resg).magnitude() * hla;
    if resasc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * ratio.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(floor);
    }
    Ok(Panel { a, b, value: resk * hl, error: err })
}

/// Integrates `f` over the finite interval [a, b].
pub fn integrate<T, V, F>(mut f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<QuadResult<V, T>, NumericError>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericError::domain("adaptive_quad", format!("limits [{a}, {b}] must be finite")));
    }
    if a == b {
        return Ok(QuadResult { value: V::zero(), error: T::zero(), subdivisions: 0 });
    }
    let first = gk15(&mut f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut panels = vec![first];
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.magnitude());
        let roundoff = T::lit(50.0) * T::epsilon() * total.magnitude();
        if total_err <= tol || total_err <= roundoff {
            return Ok(QuadResult { value: total, error: total_err, subdivisions: panels.len() });
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(NumericError::QuadratureBudget {
                subdivisions: panels.len(),
                estimate: total.magnitude().to_f64().unwrap_or(f64::NAN),
                error_bound: total_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            // interval can no longer be split in this precision
            return Ok(QuadResult { value: total, error: total_err, subdivisions: panels.len() + 1 });
        }
        let left = gk15(&mut f, p.a, mid)?;
        let right = gk15(&mut f, mid, p.b)?;
        total = total - p.value + left.value + right.value;
        total_err = total_err - p.error + left.error + right.error;
        panels.push(left);
        panels.push(right);
        if total_err < T::zero() {
            total_err = panels.iter().map(|q| q.error).sum();
        }
    }
}

/// Integrates `f` over [a, ∞) through the map x = a + s/(1−s).
pub fn integrate_to_infinity<T, V, F>(mut f: F, a: T, spec: &QuadratureSpec<T>) -> Result<QuadResult<V, T>, NumericError>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    integrate(
        |s: T| {
            let w = T::one() - s;
            let x = a + s / w;
            let v = f(x);
            if v.magnitude() == T::zero() {
                v
            } else {
                v * (T::one() / (w * w))
            }
        },
        T::zero(),
        T::one(),
        spec,
    )
}

/// ∫ₐᵇ f for a real integrand, to the tolerance in `spec`.
pub fn adaptive_quad<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T, NumericError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(a < b) {
        return Err(NumericError::domain("adaptive_quad", format!("need a < b, got [{a}, {b}]")));
    }
    integrate(f, a, b, spec).map(|r| r.value)
}
