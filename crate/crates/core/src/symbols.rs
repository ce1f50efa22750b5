//! Coherent-state symbols of matrix sequences and their 1/j expansion.

use crate::error::{Error, Result};
use crate::numerics::{binomial_weights, ScalarFn};
use crate::oracle::eig_tridiagonal;
use crate::sequence::{materialize, BandProfileSet, ProfileSet, TridiagonalMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Tridiagonal,
    Band,
}

#[derive(Debug, Clone)]
enum Source {
    Tridiagonal(ProfileSet),
    Band(BandProfileSet),
}

/// Leading symbol `h0(x, θ)` and first correction `h1(x, θ)`.
#[derive(Debug, Clone)]
pub struct SymbolExpansion {
    pub kind: SymbolKind,
    source: Source,
}

fn interior(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            expr: "x(1-x) in the symbol correction".into(),
            x,
        })
    }
}

impl SymbolExpansion {
    pub fn h0(&self, x: f64, theta: f64) -> f64 {
        match &self.source {
            Source::Tridiagonal(p) => p.a0.eval(x) + 2.0 * p.b0.eval(x) * theta.cos(),
            Source::Band(bp) => bp.fs(0, x, theta),
        }
    }

    pub fn h1(&self, x: f64, theta: f64) -> Result<f64> {
        interior(x)?;
        let q = x * (1.0 - x);
        Ok(match &self.source {
            Source::Tridiagonal(p) => {
                let c = theta.cos();
                let d2 = p.a0.second_derivative(x) + 2.0 * p.b0.second_derivative(x) * c;
                p.a1.eval(x) + 2.0 * p.b1.eval(x) * c + q * d2 / 4.0 - p.b0.eval(x) * c / (8.0 * q)
            }
            Source::Band(bp) => {
                let (_, dtt) = bp.fs0_theta_derivatives(x, theta);
                let (_, dxx) = bp.fs0_x_derivatives(x, theta);
                bp.fs(1, x, theta) + dtt / (16.0 * q) + q * dxx / 4.0
            }
        })
    }

    /// `(∂x h0, ∂θ h0)`.
    pub fn gradient(&self, x: f64, theta: f64) -> (f64, f64) {
        match &self.source {
            Source::Tridiagonal(p) => {
                let (s, c) = theta.sin_cos();
                (
                    p.a0.derivative(x) + 2.0 * p.b0.derivative(x) * c,
                    -2.0 * p.b0.eval(x) * s,
                )
            }
            Source::Band(bp) => (bp.fs0_x_derivatives(x, theta).0, bp.fs0_theta_derivatives(x, theta).0),
        }
    }

    /// `h0 + h1/j`.
    pub fn truncated(&self, x: f64, theta: f64, j: f64) -> Result<f64> {
        Ok(self.h0(x, theta) + self.h1(x, theta)? / j)
    }
}

pub fn h0_h1(p: &ProfileSet) -> SymbolExpansion {
    SymbolExpansion {
        kind: SymbolKind::Tridiagonal,
        source: Source::Tridiagonal(p.clone()),
    }
}

pub fn band_h0_h1(bp: &BandProfileSet) -> SymbolExpansion {
    SymbolExpansion {
        kind: SymbolKind::Band,
        source: Source::Band(bp.clone()),
    }
}

/// `√P(n)` of the coherent state at `x` (θ = 0).
fn coherent_vector(two_j: usize, x: f64) -> Vec<f64> {
    binomial_weights(two_j, x).into_iter().map(f64::sqrt).collect()
}

/// `⟨z|H|z⟩` for the spin coherent state at `(x, θ)`.
pub fn exact_symbol(m: &TridiagonalMatrix, x: f64, theta: f64) -> f64 {
    let w = binomial_weights(m.two_j, x);
    let diag: f64 = w.iter().zip(&m.diag).map(|(p, a)| p * a).sum();
    if x >= 1.0 || x <= 0.0 {
        return diag;
    }
    // √(P(n)P(n+1)) = P(n)·√((2j-n)/(n+1)·x/(1-x))
    let ratio = x / (1.0 - x);
    let tj = m.two_j as f64;
    let off: f64 = m
        .offdiag
        .iter()
        .enumerate()
        .map(|(n, b)| w[n] * ((tj - n as f64) / (n as f64 + 1.0) * ratio).sqrt() * b)
        .sum();
    diag + 2.0 * off * theta.cos()
}

/// `⟨z|H²|z⟩ - ⟨z|H|z⟩²` at θ = 0.
pub fn symbol_fluctuation(m: &TridiagonalMatrix, x: f64) -> f64 {
    let c = coherent_vector(m.two_j, x);
    let hc = m.mul_vec(&c);
    let mean: f64 = hc.iter().zip(&c).map(|(a, b)| a * b).sum();
    let second: f64 = hc.iter().map(|v| v * v).sum();
    (second - mean * mean).max(0.0)
}

/// Exact `⟨z|f(H_j)|z⟩` and its linear-order prediction from `h0`, `h1`.
pub fn verify_f_symbol(p: &ProfileSet, f: &ScalarFn, two_j: usize, x: f64, theta: f64) -> Result<(f64, f64)> {
    interior(x)?;
    let m = materialize(p, two_j)?;
    let e = eig_tridiagonal(&m, true)?;
    let w = binomial_weights(two_j, x);
    let vectors = e.eigenvectors.as_ref().expect("vectors requested");
    let exact: f64 = e
        .eigenvalues
        .iter()
        .zip(vectors)
        .map(|(&l, v)| {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, (vn, pn)) in v.iter().zip(&w).enumerate() {
                let (s, c) = (n as f64 * theta).sin_cos();
                let a = vn * pn.sqrt();
                re += a * c;
                im += a * s;
            }
            f.eval(l) * (re * re + im * im)
        })
        .sum();
    let s = h0_h1(p);
    let (h0, h1) = (s.h0(x, theta), s.h1(x, theta)?);
    let (dx, dt) = s.gradient(x, theta);
    let q = x * (1.0 - x);
    let grad = dt * dt / (8.0 * q) + q * dx * dx / 2.0;
    let j = two_j as f64 / 2.0;
    let predicted = f.eval(h0) + (f.derivative(h0) * h1 + f.second_derivative(h0) * grad / 2.0) / j;
    Ok((exact, predicted))
}
