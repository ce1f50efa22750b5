use std::f64::consts::PI;

use super::{within_piece, Spectrum};
use crate::error::Result;
use crate::numerics::{integrate, integrate_singular_with, integrate_sqrt_endpoints, ScalarFn};
use crate::sequence::ProfileSet;

const CLOSURE_TOL: f64 = 1e-12;

/// `∫dθ/2π g(cos θ)` over a full period, using the symmetry θ → -θ.
fn theta_average<G: Fn(f64) -> f64>(g: G, tol: f64) -> Result<f64> {
    Ok(integrate(|t: f64| g(t.cos()), 0.0, PI, tol * PI)?.value / PI)
}

/// `T⁽⁰⁾ = ∬ f(H⁽⁰⁾) dx dθ/2π`.
pub fn trace_t0(p: &ProfileSet, f: &ScalarFn, tol: f64) -> Result<f64> {
    let inner = |x: f64| {
        let (a0, b0) = (p.a0.eval(x), p.b0.eval(x));
        theta_average(|c| f.eval(a0 + 2.0 * b0 * c), tol).unwrap_or(f64::NAN)
    };
    Ok(integrate_sqrt_endpoints(inner, 0.0, 1.0, tol)?.value)
}

/// Edge contribution to `T⁽¹⁾` of an open end `e`:
/// `-f(α)/8 - f(β)/8 + ∫_α^β f(λ) dλ / (4π √((β-λ)(λ-α)))`.
pub fn edge_term(p: &ProfileSet, f: &ScalarFn, e: f64, tol: f64) -> Result<f64> {
    let b0 = p.b0.eval(e);
    if b0.abs() < CLOSURE_TOL {
        return Ok(0.0);
    }
    let (alpha, beta) = (p.alpha(e), p.beta(e));
    let kernel = integrate_singular_with(
        |l, dl, dr| f.eval(l) / (4.0 * PI * (dl * dr).sqrt()),
        alpha,
        beta,
        tol,
    )?
    .value;
    Ok(kernel - (f.eval(alpha) + f.eval(beta)) / 8.0)
}

/// `T⁽¹⁾`: bulk term `∬ f'(H⁽⁰⁾)[(2x-1)∂ₓH⁽⁰⁾/4 + A1 + 2B1 cos θ]` plus open-edge terms.
pub fn trace_t1(p: &ProfileSet, f: &ScalarFn, tol: f64) -> Result<f64> {
    let inner = |x: f64| {
        let (a0, b0, a1, b1) = (p.a0.eval(x), p.b0.eval(x), p.a1.eval(x), p.b1.eval(x));
        let (da0, db0) = (p.a0.derivative(x), p.b0.derivative(x));
        theta_average(
            |c| {
                let w = (2.0 * x - 1.0) * (da0 + 2.0 * db0 * c) / 4.0 + a1 + 2.0 * b1 * c;
                f.derivative(a0 + 2.0 * b0 * c) * w
            },
            tol,
        )
        .unwrap_or(f64::NAN)
    };
    let bulk = integrate_sqrt_endpoints(inner, 0.0, 1.0, tol)?.value;
    Ok(bulk + edge_term(p, f, 0.0, tol)? + edge_term(p, f, 1.0, tol)?)
}

/// `∫ D` over `[e, e + δ]` (or `[e - δ, e]`) from `D` at distances `δ` and `2δ`,
/// assuming `D ∝ distanceᵖ`, which covers both bounded and integrably divergent ends.
fn sliver(d: &impl Fn(f64) -> Result<f64>, e: f64, delta: f64) -> Result<f64> {
    let (near, far) = (d(e + delta)?, d(e + 2.0 * delta)?);
    let ratio = near / far;
    let p = if near != 0.0 && ratio > 0.0 { -(ratio.log2()) } else { 0.0 };
    Ok(delta.abs() * near / (1.0 + p.max(-0.9)))
}

/// `-∫ f'(λ) D(λ) dλ` over the pieces of the support. Each piece is integrated
/// numerically away from its endpoints, where rounding spoils `D`; the slivers use
/// a local power law for `D` with `f'` at their midpoints.
fn by_parts(s: &Spectrum, f: &ScalarFn, d: impl Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (a, b) in s.pieces() {
        let cut = 1e-6 * (b - a);
        let (lo, hi) = (a + cut, b - cut);
        acc -= integrate_sqrt_endpoints(|l| f.derivative(l) * within_piece(&d, l, lo, hi), lo, hi, tol)?.value;
        acc -= f.derivative(a + cut / 2.0) * sliver(&d, a, cut)? + f.derivative(b - cut / 2.0) * sliver(&d, b, -cut)?;
    }
    Ok(acc)
}

/// `∫ f dD⁽⁰⁾ = f(λ₊) - ∫ f'(λ) D⁽⁰⁾(λ) dλ`.
pub fn stieltjes_d0(s: &Spectrum, f: &ScalarFn, tol: f64) -> Result<f64> {
    Ok(f.eval(s.range().1) + by_parts(s, f, |l| s.d0(l), tol)?)
}

/// `∫ f dD⁽¹⁾ = -∫ f'(λ) D⁽¹⁾(λ) dλ`, atoms included through the jumps of `D⁽¹⁾`.
pub fn stieltjes_d1(s: &Spectrum, f: &ScalarFn, tol: f64) -> Result<f64> {
    by_parts(s, f, |l| s.d1(l), tol)
}
