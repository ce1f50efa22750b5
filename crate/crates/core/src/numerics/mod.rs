//! Numerical kernel: quadrature, bracketed roots, elliptic integrals,
//! binomial expectations and differentiable scalar functions.

mod binomial;
mod elliptic;
mod function;
mod quadrature;
mod roots;

pub use binomial::{binomial_expect, binomial_weights};
pub use elliptic::{elliptic_e, elliptic_k};
pub use function::ScalarFn;
pub use quadrature::{
    integrate, integrate_sqrt_endpoints, integrate_singular, integrate_singular_with,
    QuadratureResult,
};
pub use roots::{find_root, golden_section_max, golden_section_min};

/// Default absolute tolerance for library-internal integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
