//! Special functions, adaptive quadrature and numerical Laplace inversion.

pub mod bessel;
pub mod gamma;
pub mod hypergeometric;
pub mod laplace;
pub mod quadrature;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use gamma::{
    binomial, digamma, factorial, gamma_fn, ln_gamma, lower_incomplete_gamma, pochhammer, regularized_lower_gamma, rgamma,
    scaled_lower_gamma,
};
pub use hypergeometric::{gamma_hyperu, hyp2f1, hyp2f1_complex, hyperu, whittaker_w, whittaker_w_complex};
pub use laplace::{cdf_from_mgf, euler_sum, invert_laplace_euler, EulerInversionSpec};
pub use quadrature::{adaptive_quad, integrate, integrate_to_infinity, QuadResult, QuadValue, QuadratureSpec};
