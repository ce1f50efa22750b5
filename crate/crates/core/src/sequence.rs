//! Matrix sequences defined by smooth profile functions.
//!
//! Row `n` of the size-`2j+1` matrix samples the profiles at `x = n/2j`, and the
//! off-diagonal `b_n` coupling rows `n-1` and `n` samples them at `(2n-1)/4j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr;
use crate::numerics::{golden_section_max, golden_section_min, ScalarFn};

const VALIDATION_GRID: usize = 1024;
const EXTREMA_GRID: usize = 4096;
const CLOSURE_TOL: f64 = 1e-12;

/// The four profiles `A0, A1, B0, B1` of a tridiagonal sequence.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    pub name: String,
    pub a0: ScalarFn,
    pub a1: ScalarFn,
    pub b0: ScalarFn,
    pub b1: ScalarFn,
}

impl ProfileSet {
    /// Builds a profile set, checking `B0 > 0` and finiteness on an interior grid.
    pub fn new(
        name: impl Into<String>,
        a0: ScalarFn,
        a1: ScalarFn,
        b0: ScalarFn,
        b1: ScalarFn,
    ) -> Result<Self> {
        let p = ProfileSet {
            name: name.into(),
            a0: a0.on_domain(0.0, 1.0),
            a1: a1.on_domain(0.0, 1.0),
            b0: b0.on_domain(0.0, 1.0),
            b1: b1.on_domain(0.0, 1.0),
        };
        for i in 1..VALIDATION_GRID {
            let x = i as f64 / VALIDATION_GRID as f64;
            for (label, f) in [("A0", &p.a0), ("A1", &p.a1), ("B0", &p.b0), ("B1", &p.b1)] {
                let v = f.try_eval(x)?;
                if !v.is_finite() {
                    return Err(Error::Invalid(format!("{label}({x}) is not finite")));
                }
            }
            if p.b0.eval(x) <= 0.0 {
                return Err(Error::Invalid(format!("B0({x}) must be positive")));
            }
        }
        for x in [0.0, 1.0] {
            for (label, f) in [("A0", &p.a0), ("B0", &p.b0)] {
                if !f.try_eval(x)?.is_finite() {
                    return Err(Error::Invalid(format!("{label}({x}) is not finite")));
                }
            }
        }
        Ok(p)
    }

    /// Profiles from four expressions in `x`.
    pub fn from_expressions(name: impl Into<String>, a0: &str, a1: &str, b0: &str, b1: &str) -> Result<Self> {
        let f = |s: &str| -> Result<ScalarFn> { Ok(ScalarFn::from_expression(expr::parse(s)?)) };
        ProfileSet::new(name, f(a0)?, f(a1)?, f(b0)?, f(b1)?)
    }

    pub fn alpha(&self, x: f64) -> f64 {
        self.a0.eval(x) - 2.0 * self.b0.eval(x)
    }

    pub fn beta(&self, x: f64) -> f64 {
        self.a0.eval(x) + 2.0 * self.b0.eval(x)
    }
}

/// A real symmetric tridiagonal matrix of size `2j+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub two_j: usize,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Invalid(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(TridiagonalMatrix {
            two_j: diag.len() - 1,
            diag,
            offdiag,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let l = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let r = self.offdiag.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + l + r
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        TridiagonalMatrix {
            two_j: self.two_j,
            diag: self.diag.iter().map(|v| v * factor).collect(),
            offdiag: self.offdiag.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Profiles `C_k^(m)`, `D_k^(m)` of a Hermitian band sequence with `M` off-diagonal bands.
///
/// `c0[m]`, `c1[m]` for `m = 0..=M`; `d0[m]`, `d1[m]` for `m = 1..=M` stored at index `m - 1`.
#[derive(Debug, Clone)]
pub struct BandProfileSet {
    pub name: String,
    pub c0: Vec<ScalarFn>,
    pub c1: Vec<ScalarFn>,
    pub d0: Vec<ScalarFn>,
    pub d1: Vec<ScalarFn>,
}

impl BandProfileSet {
    /// Builds a band profile set, checking closure at `x = 0, 1`.
    pub fn new(
        name: impl Into<String>,
        c0: Vec<ScalarFn>,
        c1: Vec<ScalarFn>,
        d0: Vec<ScalarFn>,
        d1: Vec<ScalarFn>,
    ) -> Result<Self> {
        let m = c0.len().saturating_sub(1);
        if c0.is_empty() || c1.len() != m + 1 || d0.len() != m || d1.len() != m {
            return Err(Error::Invalid("band profile arrays have inconsistent lengths".into()));
        }
        let dom = |v: Vec<ScalarFn>| v.into_iter().map(|f| f.on_domain(0.0, 1.0)).collect::<Vec<_>>();
        let bp = BandProfileSet {
            name: name.into(),
            c0: dom(c0),
            c1: dom(c1),
            d0: dom(d0),
            d1: dom(d1),
        };
        for k in 1..=m {
            for x in [0.0, 1.0] {
                let (c, d) = (bp.c0[k].try_eval(x)?, bp.d0[k - 1].try_eval(x)?);
                if c.abs() > CLOSURE_TOL || d.abs() > CLOSURE_TOL {
                    return Err(Error::Invalid(format!(
                        "band sequence is not closed: band {k} is nonzero at x = {x}"
                    )));
                }
            }
        }
        Ok(bp)
    }

    pub fn bands(&self) -> usize {
        self.c0.len() - 1
    }

    /// Tridiagonal embedding with `M = 1`.
    pub fn from_profiles(p: &ProfileSet) -> Result<Self> {
        BandProfileSet::new(
            p.name.clone(),
            vec![p.a0.clone(), p.b0.clone()],
            vec![p.a1.clone(), p.b1.clone()],
            vec![ScalarFn::constant(0.0)],
            vec![ScalarFn::constant(0.0)],
        )
    }

    /// `Fs_k(x, θ)` for `k = 0` (leading) or `1` (first correction).
    pub fn fs(&self, order: usize, x: f64, theta: f64) -> f64 {
        let (c, d) = if order == 0 { (&self.c0, &self.d0) } else { (&self.c1, &self.d1) };
        let mut s = c[0].eval(x);
        for m in 1..c.len() {
            let mt = m as f64 * theta;
            s += 2.0 * (c[m].eval(x) * mt.cos() + d[m - 1].eval(x) * mt.sin());
        }
        s
    }

    /// `∂θ Fs_0` and `∂²θ Fs_0`.
    pub fn fs0_theta_derivatives(&self, x: f64, theta: f64) -> (f64, f64) {
        let (mut d1, mut d2) = (0.0, 0.0);
        for m in 1..self.c0.len() {
            let mf = m as f64;
            let (s, c) = (mf * theta).sin_cos();
            let (cm, dm) = (self.c0[m].eval(x), self.d0[m - 1].eval(x));
            d1 += 2.0 * mf * (-cm * s + dm * c);
            d2 += -2.0 * mf * mf * (cm * c + dm * s);
        }
        (d1, d2)
    }

    /// `∂x Fs_0` and `∂²x Fs_0`.
    pub fn fs0_x_derivatives(&self, x: f64, theta: f64) -> (f64, f64) {
        let mut d1 = self.c0[0].derivative(x);
        let mut d2 = self.c0[0].second_derivative(x);
        for m in 1..self.c0.len() {
            let (s, c) = (m as f64 * theta).sin_cos();
            let (cm, dm) = (&self.c0[m], &self.d0[m - 1]);
            d1 += 2.0 * (cm.derivative(x) * c + dm.derivative(x) * s);
            d2 += 2.0 * (cm.second_derivative(x) * c + dm.second_derivative(x) * s);
        }
        (d1, d2)
    }
}

/// A Hermitian band matrix; `bands[m][n]` is the element at row `n`, column `n - m`
/// (valid for `n ≥ m`), with the upper triangle given by conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    pub two_j: usize,
    pub bands: Vec<Vec<Complex64>>,
}

impl BandMatrix {
    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn from_tridiagonal(t: &TridiagonalMatrix) -> Self {
        let mut b1 = vec![Complex64::new(0.0, 0.0)];
        b1.extend(t.offdiag.iter().map(|&v| Complex64::new(v, 0.0)));
        BandMatrix {
            two_j: t.two_j,
            bands: vec![t.diag.iter().map(|&v| Complex64::new(v, 0.0)).collect(), b1],
        }
    }

    /// Dense row-major representation.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut h = vec![Complex64::new(0.0, 0.0); d * d];
        for (m, band) in self.bands.iter().enumerate() {
            for n in m..d {
                let v = band[n];
                h[n * d + (n - m)] = v;
                h[(n - m) * d + n] = v.conj();
            }
        }
        for n in 0..d {
            h[n * d + n] = Complex64::new(self.bands[0][n].re, 0.0);
        }
        h
    }
}

/// Exact finite-`j` matrix of a profile set.
pub fn materialize(p: &ProfileSet, two_j: usize) -> Result<TridiagonalMatrix> {
    if two_j < 1 {
        return Err(Error::Invalid("2j must be at least 1".into()));
    }
    let tj = two_j as f64;
    let j = tj / 2.0;
    let diag = (0..=two_j)
        .map(|n| {
            let x = n as f64 / tj;
            Ok(p.a0.try_eval(x)? + p.a1.try_eval(x)? / j)
        })
        .collect::<Result<Vec<_>>>()?;
    let offdiag = (1..=two_j)
        .map(|n| {
            let x = (2 * n - 1) as f64 / (2.0 * tj);
            Ok(p.b0.try_eval(x)? + p.b1.try_eval(x)? / j)
        })
        .collect::<Result<Vec<_>>>()?;
    TridiagonalMatrix::new(diag, offdiag)
}

/// Exact finite-`j` band matrix: `a^(m)_n = c + i d` sampled at `(2n - m)/4j`.
pub fn materialize_band(bp: &BandProfileSet, two_j: usize) -> Result<BandMatrix> {
    if two_j < 1 {
        return Err(Error::Invalid("2j must be at least 1".into()));
    }
    let tj = two_j as f64;
    let j = tj / 2.0;
    let bands = (0..=bp.bands())
        .map(|m| {
            (0..=two_j)
                .map(|n| {
                    if n < m {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let x = (2 * n - m) as f64 / (2.0 * tj);
                    let re = bp.c0[m].try_eval(x)? + bp.c1[m].try_eval(x)? / j;
                    let im = if m == 0 {
                        0.0
                    } else {
                        bp.d0[m - 1].try_eval(x)? + bp.d1[m - 1].try_eval(x)? / j
                    };
                    Ok(Complex64::new(re, im))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandMatrix { two_j, bands })
}

pub fn is_closed(p: &ProfileSet) -> bool {
    p.b0.eval(0.0).abs() < CLOSURE_TOL && p.b0.eval(1.0).abs() < CLOSURE_TOL
}

/// Evaluators for `α = A0 - 2B0` and `β = A0 + 2B0`.
pub fn alpha_beta(p: &ProfileSet) -> (impl Fn(f64) -> f64 + '_, impl Fn(f64) -> f64 + '_) {
    (move |x| p.alpha(x), move |x| p.beta(x))
}

/// Local extrema of a function on `[0, 1]`: dense scan, then golden-section refinement.
/// Returns `(x, value, is_max)` for interior extrema only.
pub(crate) fn interior_extrema(f: &dyn Fn(f64) -> f64) -> Vec<(f64, f64, bool)> {
    let n = EXTREMA_GRID;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let scale = vs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let noise = 1e-12 * scale;
    // signs of the nonnegligible differences, with their left grid index
    let steps: Vec<(usize, f64)> = (0..n)
        .filter_map(|i| {
            let d = vs[i + 1] - vs[i];
            (d.abs() > noise).then_some((i, d.signum()))
        })
        .collect();
    let mut out = Vec::new();
    for w in steps.windows(2) {
        let ((i, s0), (k, s1)) = (w[0], w[1]);
        if s0 == s1 {
            continue;
        }
        let is_max = s0 > 0.0;
        let (lo, hi) = (xs[i], xs[(k + 1).min(n)]);
        let (x, v) = if is_max {
            golden_section_max(f, lo, hi, 1e-12)
        } else {
            golden_section_min(f, lo, hi, 1e-12)
        };
        out.push((x, v, is_max));
    }
    out
}

/// `(λ₋, λ₊) = (min α, max β)` over `[0, 1]`.
pub fn spectral_range(p: &ProfileSet) -> (f64, f64) {
    let alpha = |x: f64| p.alpha(x);
    let beta = |x: f64| p.beta(x);
    let mut lo = alpha(0.0).min(alpha(1.0));
    let mut hi = beta(0.0).max(beta(1.0));
    for (_, v, is_max) in interior_extrema(&alpha) {
        if !is_max {
            lo = lo.min(v);
        }
    }
    for (_, v, is_max) in interior_extrema(&beta) {
        if is_max {
            hi = hi.max(v);
        }
    }
    (lo, hi)
}
