//! Jacobi matrices of Laguerre and Jacobi polynomials with parameters growing
//! linearly in `j`, and the zero approximation built on the index function.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{smooth, ClosedForms, ModelDescriptor, Profiles};
use crate::error::{Error, Result};
use crate::numerics::{find_root, ScalarFn};
use crate::sequence::{spectral_range, ProfileSet, TridiagonalMatrix};
use crate::spectra::{Atom, Spectrum};

/// `J_{2j+1}/j` for `L^{(α0 j + α1)}`.
pub fn laguerre_matrix(alpha0: f64, alpha1: f64, two_j: usize) -> Result<TridiagonalMatrix> {
    let j = two_j as f64 / 2.0;
    let al = alpha0 * j + alpha1;
    if al <= -1.0 {
        return Err(Error::Invalid(format!("Laguerre parameter α = {al} must exceed -1")));
    }
    let diag = (0..=two_j).map(|n| (2.0 * n as f64 + al + 1.0) / j).collect();
    let offdiag = (1..=two_j)
        .map(|n| {
            let n = n as f64;
            (n * (n + al)).sqrt() / j
        })
        .collect();
    TridiagonalMatrix::new(diag, offdiag)
}

fn laguerre_edges(alpha0: f64) -> (f64, f64) {
    let r = 2.0 * (4.0 + 2.0 * alpha0).sqrt();
    (4.0 + alpha0 - r, 4.0 + alpha0 + r)
}

/// The closed distribution-function pieces `(A, B, C)`.
fn laguerre_abc(alpha0: f64, lambda: f64) -> (f64, f64, f64) {
    let a = (8.0 * lambda - (lambda - alpha0).powi(2)).max(0.0).sqrt() / (4.0 * PI);
    let b = ((alpha0 - lambda + 4.0) / (2.0 * (2.0 * alpha0 + 4.0).sqrt())).clamp(-1.0, 1.0).acos() / PI;
    let c = if lambda > 0.0 {
        ((alpha0 + lambda) / (2.0 * ((alpha0 + 2.0) * lambda).sqrt())).clamp(-1.0, 1.0).acos() / (2.0 * PI)
    } else {
        0.0
    };
    (a, b, c)
}

pub fn laguerre(alpha0: f64, alpha1: f64) -> Result<ModelDescriptor> {
    if alpha0 < 0.0 {
        return Err(Error::Invalid(format!("α0 must be non-negative, got {alpha0}")));
    }
    let b0 = move |x: f64| (2.0 * x * (2.0 * x + alpha0)).sqrt();
    let p = ProfileSet::new(
        "laguerre",
        smooth("4x+α0", move |x| 4.0 * x + alpha0, |_| 4.0, |_| 0.0),
        ScalarFn::constant(1.0 + alpha1),
        smooth(
            "sqrt(2x(2x+α0))",
            b0,
            move |x| (4.0 * x + alpha0) / b0(x),
            move |x| -alpha0 * alpha0 / b0(x).powi(3),
        ),
        ScalarFn::new("(4x(α1+1)+α0)/(4B0)", move |x| {
            if alpha0 == 0.0 {
                (alpha1 + 1.0) / 2.0
            } else {
                (4.0 * x * (alpha1 + 1.0) + alpha0) / (4.0 * b0(x))
            }
        }),
    )?;
    let (lo, hi) = laguerre_edges(alpha0);
    let inside = move |l: f64| -> Result<()> {
        if (lo..=hi).contains(&l) {
            Ok(())
        } else {
            Err(Error::OutsideSpectrum(l))
        }
    };
    let closed_forms = ClosedForms {
        rho0: Arc::new(move |l| {
            inside(l)?;
            Ok(((hi - l) * (l - lo)).max(0.0).sqrt() / (4.0 * PI * l))
        }),
        rho1: Arc::new(move |l| {
            inside(l)?;
            let num = (l - alpha0) * (l - alpha0 + 2.0 * alpha1 - 2.0) - 2.0 * alpha0;
            Ok(num / (8.0 * PI * l * ((hi - l) * (l - lo)).sqrt()))
        }),
        d0: Some(Arc::new(move |l| {
            inside(l)?;
            let (a, b, c) = laguerre_abc(alpha0, l);
            Ok(a + b - alpha0 * c)
        })),
        d1: Some(Arc::new(move |l| {
            inside(l)?;
            let (a, b, c) = laguerre_abc(alpha0, l);
            Ok(-a / 2.0 + b / 4.0 + (alpha0 - 2.0 * alpha1) * c / 2.0 - 0.125)
        })),
        atoms: vec![
            Atom {
                location: lo,
                weight: -(1.0 + if alpha0 == 0.0 { 2.0 * alpha1 } else { 0.0 }) / 8.0,
            },
            Atom {
                location: hi,
                weight: -0.125,
            },
        ],
    };
    Ok(ModelDescriptor {
        name: "laguerre".into(),
        parameters: vec![("alpha0".into(), alpha0), ("alpha1".into(), alpha1)],
        profiles: Profiles::Tridiagonal(p),
        closed_forms: Some(closed_forms),
        exact: Some(Arc::new(move |two_j| laguerre_matrix(alpha0, alpha1, two_j))),
        notes: "zeros of L_{2j+1}^{(α0 j+α1)}(j λ)".into(),
    })
}

/// `J_{2j+1}` for `P^{(α0 j + α1, β0 j + β1)}`.
pub fn jacobi_matrix(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64, two_j: usize) -> Result<TridiagonalMatrix> {
    let j = two_j as f64 / 2.0;
    let (al, be) = (alpha0 * j + alpha1, beta0 * j + beta1);
    if al <= -1.0 || be <= -1.0 {
        return Err(Error::Invalid(format!("Jacobi parameters ({al}, {be}) must exceed -1")));
    }
    let diag = (0..=two_j)
        .map(|n| {
            if n == 0 {
                (be - al) / (al + be + 2.0)
            } else {
                let t = 2.0 * n as f64 + al + be;
                (be * be - al * al) / (t * (t + 2.0))
            }
        })
        .collect();
    let offdiag = (1..=two_j)
        .map(|k| {
            let k = k as f64;
            let t = 2.0 * k + al + be;
            2.0 * (k * (k + al) * (k + be) * (k + al + be) / ((t - 1.0) * t * t * (t + 1.0))).sqrt()
        })
        .collect();
    TridiagonalMatrix::new(diag, offdiag)
}

fn jacobi_profiles(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64) -> Result<ProfileSet> {
    if alpha0 == 0.0 && beta0 == 0.0 {
        return ProfileSet::new(
            "jacobi",
            ScalarFn::constant(0.0),
            ScalarFn::constant(0.0),
            ScalarFn::constant(0.5),
            ScalarFn::constant(0.0),
        );
    }
    let s = move |x: f64| 4.0 * x + alpha0 + beta0;
    let d = beta0 * beta0 - alpha0 * alpha0;
    let b0 = move |x: f64| {
        2.0 * (2.0 * x * (2.0 * x + alpha0) * (2.0 * x + beta0) * (2.0 * x + alpha0 + beta0)).sqrt() / s(x).powi(2)
    };
    ProfileSet::new(
        "jacobi",
        ScalarFn::new("(β0²-α0²)/s²", move |x| d / s(x).powi(2))
            .with_derivative(move |x| -8.0 * d / s(x).powi(3))
            .with_second_derivative(move |x| 96.0 * d / s(x).powi(4)),
        ScalarFn::new("A1", move |x| {
            2.0 * (beta0 * beta1 - alpha0 * alpha1) / s(x).powi(2) - 2.0 * d * (alpha1 + beta1 + 1.0) / s(x).powi(3)
        }),
        ScalarFn::new("B0", b0).with_derivative(move |x| {
            let u = 2.0 * x;
            b0(x) * (1.0 / u + 1.0 / (u + alpha0) + 1.0 / (u + beta0) + 1.0 / (u + alpha0 + beta0) - 8.0 / s(x))
        }),
        ScalarFn::new("B1", move |x| {
            let u = 2.0 * x;
            b0(x) / 2.0
                * (1.0 / (4.0 * x) + (alpha1 + 0.5) / (u + alpha0) + (beta1 + 0.5) / (u + beta0)
                    + (alpha1 + beta1 + 0.5) / (u + alpha0 + beta0)
                    - 4.0 * (alpha1 + beta1 + 1.0) / s(x))
        }),
    )
}

pub fn jacobi(alpha0: f64, alpha1: f64, beta0: f64, beta1: f64) -> Result<ModelDescriptor> {
    if alpha0 < 0.0 || beta0 < 0.0 {
        return Err(Error::Invalid("α0 and β0 must be non-negative".into()));
    }
    let p = jacobi_profiles(alpha0, alpha1, beta0, beta1)?;
    let (lo, hi) = (p.alpha(1.0), p.beta(1.0));
    let big_s = alpha0 + beta0 + 4.0;
    let (abar, bbar) = (alpha0 - 2.0 * alpha1, beta0 - 2.0 * beta1);
    let inside = move |l: f64| -> Result<()> {
        if (lo..=hi).contains(&l) {
            Ok(())
        } else {
            Err(Error::OutsideSpectrum(l))
        }
    };
    let closed_forms = ClosedForms {
        rho0: Arc::new(move |l| {
            inside(l)?;
            Ok(big_s * ((hi - l) * (l - lo)).max(0.0).sqrt() / (4.0 * PI * (1.0 - l * l)))
        }),
        rho1: Arc::new(move |l| {
            inside(l)?;
            let s2 = big_s * big_s;
            let bracket = alpha0 * abar / (s2 * (1.0 - l)) + beta0 * bbar / (s2 * (1.0 + l))
                - (abar + bbar - 2.0) / (2.0 * big_s);
            Ok(big_s / (4.0 * PI * ((hi - l) * (l - lo)).sqrt()) * bracket)
        }),
        d0: None,
        d1: None,
        atoms: vec![
            Atom {
                location: lo,
                weight: -(1.0 + if beta0 == 0.0 { 2.0 * beta1 } else { 0.0 }) / 8.0,
            },
            Atom {
                location: hi,
                weight: -(1.0 + if alpha0 == 0.0 { 2.0 * alpha1 } else { 0.0 }) / 8.0,
            },
        ],
    };
    Ok(ModelDescriptor {
        name: "jacobi".into(),
        parameters: vec![
            ("alpha0".into(), alpha0),
            ("alpha1".into(), alpha1),
            ("beta0".into(), beta0),
            ("beta1".into(), beta1),
        ],
        profiles: Profiles::Tridiagonal(p),
        closed_forms: Some(closed_forms),
        exact: Some(Arc::new(move |two_j| jacobi_matrix(alpha0, alpha1, beta0, beta1, two_j))),
        notes: "zeros of P_{2j+1}^{(α0 j+α1, β0 j+β1)}".into(),
    })
}

/// An approximate eigenvalue; `boundary` marks a right-hand side outside the
/// range of the index function, answered with the nearer spectral edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootApprox {
    pub lambda: f64,
    pub boundary: bool,
}

enum IndexSource {
    Closed(ClosedForms),
    Generic(Box<Spectrum>),
}

/// Solves `I⁽⁰⁾(λ) [+ I⁽¹⁾(λ)/j] = n/(2j+1)` for the `n`-th eigenvalue (1-based).
pub struct RootSolver {
    source: IndexSource,
    range: (f64, f64),
    order: u8,
}

impl RootSolver {
    pub fn new(model: &ModelDescriptor, order: u8) -> Result<Self> {
        let p = model.tridiagonal()?;
        let source = match &model.closed_forms {
            Some(cf) if cf.d0.is_some() && cf.d1.is_some() => IndexSource::Closed(cf.clone()),
            _ => IndexSource::Generic(Box::new(Spectrum::new(p))),
        };
        Ok(RootSolver {
            source,
            range: spectral_range(p),
            order,
        })
    }

    fn d0_d1(&self, lambda: f64) -> Result<(f64, f64)> {
        match &self.source {
            IndexSource::Closed(cf) => {
                let d1 = if self.order == 0 { 0.0 } else { (cf.d1.as_ref().unwrap())(lambda)? };
                Ok(((cf.d0.as_ref().unwrap())(lambda)?, d1))
            }
            IndexSource::Generic(s) => {
                let d1 = if self.order == 0 { 0.0 } else { s.d1(lambda)? };
                Ok((s.d0(lambda)?, d1))
            }
        }
    }

    fn index(&self, lambda: f64, j: f64) -> Result<f64> {
        let (d0, d1) = self.d0_d1(lambda)?;
        Ok(if self.order == 0 { d0 } else { d0 + (d1 + 0.25) / j })
    }

    pub fn solve(&self, two_j: usize, n: usize) -> Result<RootApprox> {
        if n < 1 || n > two_j + 1 {
            return Err(Error::Invalid(format!("root index {n} outside 1..={}", two_j + 1)));
        }
        let j = two_j as f64 / 2.0;
        let target = n as f64 / (two_j as f64 + 1.0);
        let (lo, hi) = self.range;
        let eps = 1e-12 * (hi - lo);
        let (a, b) = (lo + eps, hi - eps);
        let g = |l: f64| self.index(l, j).map(|v| v - target).unwrap_or(f64::NAN);
        let (ga, gb) = (g(a), g(b));
        if ga >= 0.0 {
            return Ok(RootApprox { lambda: lo, boundary: ga > 0.0 });
        }
        if gb <= 0.0 {
            return Ok(RootApprox { lambda: hi, boundary: gb < 0.0 });
        }
        let lambda = find_root(g, a, b, 1e-14 * (1.0 + hi.abs()))?;
        Ok(RootApprox { lambda, boundary: false })
    }
}

pub fn polynomial_roots(model: &ModelDescriptor, two_j: usize, n: usize, order: u8) -> Result<RootApprox> {
    RootSolver::new(model, order)?.solve(two_j, n)
}
