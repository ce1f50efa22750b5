//! Asymptotic distribution functions `D⁽⁰⁾`, `D⁽¹⁾`, densities with δ-atoms,
//! index functions and trace expansions for tridiagonal sequences.
//!
//! For each λ the unit interval is cut at the roots of `α(x) = λ` and `β(x) = λ`
//! into panels lying below, inside or above the band `[α(x), β(x)]`. Inside
//! panels carry inverse square-root endpoint singularities, which are removed by
//! a cosine substitution before Gauss–Kronrod quadrature.

mod band;
mod trace;

use std::f64::consts::PI;
use std::sync::Arc;

pub use band::{band_d0_d1, BandSpectrum};
pub use trace::{stieltjes_d0, stieltjes_d1, trace_t0, trace_t1};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{find_root, integrate_sqrt_endpoints, DEFAULT_TOL};
use crate::sequence::{interior_extrema, spectral_range, ProfileSet};

const CLOSURE_TOL: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-15;
const ATOM_THRESHOLD: f64 = 1e-7;
const DEDUP_TOL: f64 = 1e-10;

fn relaxed<T>(tol: f64, f: impl Fn(f64) -> Result<T>) -> Result<T> {
    let mut last = None;
    for scale in [1.0, 1e2, 1e4] {
        match f(tol * scale) {
            Ok(v) => return Ok(v),
            Err(e @ Error::Quadrature { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Evaluates `f` inside the piece `(a, b)`, stepping away from the nearer endpoint
/// when rounding near a singular point makes `f` fail there.
pub(crate) fn within_piece(f: impl Fn(f64) -> Result<f64>, l: f64, a: f64, b: f64) -> f64 {
    if let Ok(v) = f(l) {
        return v;
    }
    let (mid, width) = (0.5 * (a + b), b - a);
    let inward = if l < mid { 1.0 } else { -1.0 };
    let edge = if l < mid { a } else { b };
    for k in (6..=13).rev() {
        let shifted = edge + inward * width * 10f64.powi(-k);
        if (shifted - edge).abs() > (l - edge).abs() {
            if let Ok(v) = f(shifted) {
                return v;
            }
        }
    }
    f64::NAN
}

/// `ω(α, β, λ)`, the θ-fraction of `α + (β-α)(1+cos θ)/2 < λ`.
pub fn omega(alpha: f64, beta: f64, lambda: f64) -> f64 {
    if lambda < alpha {
        0.0
    } else if lambda > beta || alpha == beta {
        1.0
    } else {
        0.5 + ((alpha + beta - 2.0 * lambda) / (alpha - beta)).clamp(-1.0, 1.0).asin() / PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaValue {
    Density(f64),
    Atom(f64),
}

/// `Ω(α, β, λ)`, the λ-derivative of `ω`; a degenerate band is an atom.
#[allow(non_snake_case)]
pub fn Omega(alpha: f64, beta: f64, lambda: f64) -> OmegaValue {
    if alpha == beta {
        return OmegaValue::Atom(alpha);
    }
    if lambda > alpha && lambda < beta {
        OmegaValue::Density(1.0 / (PI * ((lambda - alpha) * (beta - lambda)).sqrt()))
    } else {
        OmegaValue::Density(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelKind {
    Below,
    Inside,
    Above,
}

/// A maximal x-interval on which λ sits on one side of the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub kind: PanelKind,
}

/// A point mass of a spectral measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Precomputed geometry of a profile set: spectral range and the monotone
/// pieces of `α` and `β`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    profiles: ProfileSet,
    range: (f64, f64),
    breaks: Vec<f64>,
    alpha_at: Vec<f64>,
    beta_at: Vec<f64>,
    extremum_values: Vec<f64>,
    tol: f64,
}

impl Spectrum {
    pub fn new(p: &ProfileSet) -> Self {
        let alpha = |x: f64| p.alpha(x);
        let beta = |x: f64| p.beta(x);
        let ea = interior_extrema(&alpha);
        let eb = interior_extrema(&beta);
        let mut breaks = vec![0.0, 1.0];
        breaks.extend(ea.iter().chain(&eb).map(|e| e.0));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let alpha_at = breaks.iter().map(|&x| p.alpha(x)).collect();
        let beta_at = breaks.iter().map(|&x| p.beta(x)).collect();
        let extremum_values = ea.iter().chain(&eb).map(|e| e.1).collect();
        Spectrum {
            profiles: p.clone(),
            range: spectral_range(p),
            breaks,
            alpha_at,
            beta_at,
            extremum_values,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn profiles(&self) -> &ProfileSet {
        &self.profiles
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Panels of `[0, 1]` for the given λ, adjacent panels of equal kind merged.
    pub fn panels(&self, lambda: f64) -> Vec<Panel> {
        let p = &self.profiles;
        let mut out: Vec<Panel> = Vec::new();
        for k in 0..self.breaks.len() - 1 {
            let (u, v) = (self.breaks[k], self.breaks[k + 1]);
            let mut cuts = vec![u, v];
            for (vals, f) in [
                (&self.alpha_at, &(|x: f64| p.alpha(x)) as &dyn Fn(f64) -> f64),
                (&self.beta_at, &|x: f64| p.beta(x)),
            ] {
                let (fu, fv) = (vals[k] - lambda, vals[k + 1] - lambda);
                if fu * fv < 0.0 {
                    if let Ok(r) = find_root(|x| f(x) - lambda, u, v, ROOT_TOL) {
                        cuts.push(r);
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                if w[1] <= w[0] {
                    continue;
                }
                let mid = 0.5 * (w[0] + w[1]);
                let kind = if lambda < p.alpha(mid) {
                    PanelKind::Below
                } else if lambda > p.beta(mid) {
                    PanelKind::Above
                } else {
                    PanelKind::Inside
                };
                match out.last_mut() {
                    Some(last) if last.kind == kind => last.hi = w[1],
                    _ => out.push(Panel {
                        lo: w[0],
                        hi: w[1],
                        kind,
                    }),
                }
            }
        }
        out
    }

    fn cos_theta(&self, x: f64, lambda: f64) -> f64 {
        let b0 = self.profiles.b0.eval(x);
        if b0 <= 0.0 {
            return if lambda >= self.profiles.a0.eval(x) { 1.0 } else { -1.0 };
        }
        ((lambda - self.profiles.a0.eval(x)) / (2.0 * b0)).clamp(-1.0, 1.0)
    }

    /// `Ω(α(x), β(x), λ)` as a density.
    pub fn omega_density(&self, x: f64, lambda: f64) -> f64 {
        let p = &self.profiles;
        let (a0, b0) = (p.a0.eval(x), p.b0.eval(x));
        let q = 4.0 * b0 * b0 - (lambda - a0) * (lambda - a0);
        if q <= 0.0 {
            0.0
        } else {
            1.0 / (PI * q.sqrt())
        }
    }

    /// `F(x, c) = (2x-1)(A0' + 2B0' c)/4 + A1 + 2B1 c`.
    pub fn first_order_weight(&self, x: f64, c: f64) -> f64 {
        let p = &self.profiles;
        (2.0 * x - 1.0) * (p.a0.derivative(x) + 2.0 * p.b0.derivative(x) * c) / 4.0
            + p.a1.eval(x)
            + 2.0 * p.b1.eval(x) * c
    }

    /// Sum of `∫ g` over the inside panels. Where rounding in `λ - α(x)` limits
    /// the attainable accuracy (tiny panels at a band edge), the tolerance is
    /// relaxed by up to four orders of magnitude before giving up.
    fn inside_integral<F: Fn(f64) -> f64>(&self, lambda: f64, tol: f64, g: F) -> Result<f64> {
        let mut s = 0.0;
        for panel in self.panels(lambda) {
            if panel.kind == PanelKind::Inside {
                s += relaxed(tol, |t| integrate_sqrt_endpoints(&g, panel.lo, panel.hi, t))?.value;
            }
        }
        Ok(s)
    }

    pub fn d0(&self, lambda: f64) -> Result<f64> {
        let (lo, hi) = self.range;
        if lambda <= lo {
            return Ok(0.0);
        }
        if lambda >= hi {
            return Ok(1.0);
        }
        let mut s = 0.0;
        for panel in self.panels(lambda) {
            match panel.kind {
                PanelKind::Below => {}
                PanelKind::Above => s += panel.hi - panel.lo,
                PanelKind::Inside => {
                    let g = |x| 0.5 + self.cos_theta(x, lambda).asin() / PI;
                    s += relaxed(self.tol, |t| integrate_sqrt_endpoints(g, panel.lo, panel.hi, t))?.value
                }
            }
        }
        Ok(s.clamp(0.0, 1.0))
    }

    /// Bulk part of `D⁽¹⁾`.
    pub fn d1_interior(&self, lambda: f64) -> Result<f64> {
        self.d1_interior_tol(lambda, self.tol)
    }

    fn d1_interior_tol(&self, lambda: f64, tol: f64) -> Result<f64> {
        let (lo, hi) = self.range;
        if lambda <= lo || lambda >= hi {
            return Ok(0.0);
        }
        let s = self.inside_integral(lambda, tol, |x| {
            let om = self.omega_density(x, lambda);
            if om == 0.0 {
                0.0
            } else {
                om * self.first_order_weight(x, self.cos_theta(x, lambda))
            }
        })?;
        Ok(-s)
    }

    /// Edge part of `D⁽¹⁾` from an open end `e ∈ {0, 1}`.
    pub fn d1_edge(&self, e: f64, lambda: f64) -> f64 {
        let p = &self.profiles;
        let b0 = p.b0.eval(e);
        if b0.abs() < CLOSURE_TOL {
            return 0.0;
        }
        let a0 = p.a0.eval(e);
        if lambda < a0 - 2.0 * b0 || lambda > a0 + 2.0 * b0 {
            return 0.0;
        }
        ((lambda - a0) / (2.0 * b0)).clamp(-1.0, 1.0).asin() / (4.0 * PI)
    }

    pub fn d1(&self, lambda: f64) -> Result<f64> {
        self.d1_tol(lambda, self.tol)
    }

    fn d1_tol(&self, lambda: f64, tol: f64) -> Result<f64> {
        Ok(self.d1_interior_tol(lambda, tol)? + self.d1_edge(0.0, lambda) + self.d1_edge(1.0, lambda))
    }

    /// Index function: `I⁽⁰⁾ = D⁽⁰⁾`, `I⁽¹⁾ = D⁽¹⁾ + 1/4`.
    pub fn index(&self, lambda: f64, order: u8) -> Result<f64> {
        match order {
            0 => self.d0(lambda),
            _ => Ok(self.d1(lambda)? + 0.25),
        }
    }

    /// `ρ⁽⁰⁾(λ) = ∫ Ω dx`.
    pub fn rho0(&self, lambda: f64) -> Result<f64> {
        self.inside_integral(lambda, self.tol, |x| self.omega_density(x, lambda))
    }

    /// Points where `D⁽¹⁾` may jump or `ρ` may be singular, sorted.
    pub fn singular_points(&self) -> Vec<f64> {
        let p = &self.profiles;
        let (lo, hi) = self.range;
        let mut pts = vec![lo, hi, p.alpha(0.0), p.beta(0.0), p.alpha(1.0), p.beta(1.0)];
        pts.extend(self.extremum_values.iter().copied());
        pts.retain(|v| v.is_finite() && *v >= lo - DEDUP_TOL && *v <= hi + DEDUP_TOL);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < DEDUP_TOL * (1.0 + b.abs()));
        pts
    }

    fn width(&self) -> f64 {
        (self.range.1 - self.range.0).max(1e-300)
    }

    /// One-sided limit of `D⁽¹⁾` at `lambda` from the side `dir = ±1`, by
    /// extrapolating `a + b√h + c h + d h^{3/2}` from `h = h0·{1, 4, 16, 64}`.
    /// `h0` starts at `1e-7` of the support width and grows when the
    /// quadrature cannot resolve the band that close to `lambda`.
    pub fn d1_limit(&self, lambda: f64, dir: f64) -> Result<f64> {
        const WEIGHTS: [f64; 4] = [64.0 / 21.0, -8.0 / 3.0, 2.0 / 3.0, -1.0 / 21.0];
        let mut last = None;
        for start in [1e-7, 1e-6, 1e-5] {
            let h0 = start * self.width();
            let attempt = (0..4).try_fold(0.0, |s, k| {
                let h = h0 * 4f64.powi(k as i32);
                Ok::<f64, Error>(s + WEIGHTS[k] * self.d1_tol(lambda + dir * h, self.tol * 1e-2)?)
            });
            match attempt {
                Ok(v) => return Ok(v),
                Err(e @ Error::Quadrature { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    /// δ-atoms of `ρ⁽¹⁾`: jumps `D⁽¹⁾(p⁺) - D⁽¹⁾(p⁻)` at the singular points.
    pub fn atoms(&self) -> Result<Vec<Atom>> {
        let mut out = Vec::new();
        for pt in self.singular_points() {
            let w = self.d1_limit(pt, 1.0)? - self.d1_limit(pt, -1.0)?;
            if w.abs() > ATOM_THRESHOLD {
                out.push(Atom {
                    location: pt,
                    weight: w,
                });
            }
        }
        Ok(out)
    }

    /// Continuous part of `ρ⁽¹⁾` by a five-point derivative of `D⁽¹⁾`, with the
    /// stencil kept clear of singular points.
    pub fn rho1_continuous(&self, lambda: f64) -> Result<f64> {
        let (lo, hi) = self.range;
        if lambda <= lo || lambda >= hi {
            return Ok(0.0);
        }
        let dist = self
            .singular_points()
            .iter()
            .map(|s| (s - lambda).abs())
            .fold(f64::INFINITY, f64::min);
        let h = (2e-4 * self.width()).min(dist / 100.0);
        if h < 1e-12 * self.width() {
            return Err(Error::Invalid(format!(
                "cannot differentiate D1 at {lambda}: too close to a singular point"
            )));
        }
        let f = |t: f64| self.d1_tol(lambda + t * h, self.tol * 1e-2);
        Ok((f(-2.0)? - 8.0 * f(-1.0)? + 8.0 * f(1.0)? - f(2.0)?) / (12.0 * h))
    }

    /// Smooth pieces of the support between consecutive singular points.
    pub fn pieces(&self) -> Vec<(f64, f64)> {
        let pts = self.singular_points();
        pts.windows(2)
            .filter(|w| w[1] - w[0] > DEDUP_TOL)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// λ-sweep of `(d0, d1, rho0, rho1_continuous)`.
    pub fn sweep(&self, lambdas: &[f64], exec: Execution) -> Result<Vec<[f64; 4]>> {
        exec.map(lambdas, |&l| -> Result<[f64; 4]> {
            let r1 = self.rho1_continuous(l).unwrap_or(f64::NAN);
            Ok([self.d0(l)?, self.d1(l)?, self.rho0(l)?, r1])
        })
        .into_iter()
        .collect()
    }
}

/// `D⁽⁰⁾` and `D⁽¹⁾` evaluators with their discontinuity locations.
#[derive(Debug, Clone)]
pub struct DistributionPair {
    pub spectrum: Arc<Spectrum>,
    pub support: (f64, f64),
    pub d1_discontinuities: Vec<f64>,
}

impl DistributionPair {
    pub fn new(p: &ProfileSet) -> Result<Self> {
        let spectrum = Arc::new(Spectrum::new(p));
        let d1_discontinuities = spectrum.atoms()?.iter().map(|a| a.location).collect();
        Ok(DistributionPair {
            support: spectrum.range(),
            spectrum,
            d1_discontinuities,
        })
    }

    pub fn d0(&self, lambda: f64) -> Result<f64> {
        self.spectrum.d0(lambda)
    }

    pub fn d1(&self, lambda: f64) -> Result<f64> {
        self.spectrum.d1(lambda)
    }
}

/// Absolutely continuous density plus δ-atoms.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    pub order: u8,
    pub support: (f64, f64),
    pub atoms: Vec<Atom>,
    spectrum: Arc<Spectrum>,
}

impl SpectralMeasure {
    pub fn density(&self, lambda: f64) -> Result<f64> {
        match self.order {
            0 => self.spectrum.rho0(lambda),
            _ => self.spectrum.rho1_continuous(lambda),
        }
    }

    /// Integral of the continuous density over the support.
    ///
    /// The density is integrated numerically on each piece up to a small distance
    /// from its endpoints; the remaining slivers come from the distribution function
    /// itself. `ρ⁽¹⁾` need not be integrable at a critical point, so there the
    /// sliver uses the one-sided limit of `D⁽¹⁾` and the mass is understood in the
    /// distributional sense.
    pub fn continuous_mass(&self, tol: f64) -> Result<f64> {
        let sp = &self.spectrum;
        let cut = if self.order == 0 { 1e-6 } else { 1e-4 };
        let mut s = 0.0;
        for (a, b) in sp.pieces() {
            let d = cut * (b - a);
            let (lo, hi) = (a + d, b - d);
            s += integrate_sqrt_endpoints(|l| within_piece(|x| self.density(x), l, lo, hi), lo, hi, tol)?.value;
            s += match self.order {
                0 => sp.d0(lo)? - sp.d0(a)? + sp.d0(b)? - sp.d0(hi)?,
                _ => sp.d1(lo)? - sp.d1_limit(a, 1.0)? + sp.d1_limit(b, -1.0)? - sp.d1(hi)?,
            };
        }
        Ok(s)
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

pub fn d0(p: &ProfileSet, lambda: f64) -> Result<f64> {
    Spectrum::new(p).d0(lambda)
}

pub fn d1(p: &ProfileSet, lambda: f64) -> Result<f64> {
    Spectrum::new(p).d1(lambda)
}

pub fn index(p: &ProfileSet, lambda: f64, order: u8) -> Result<f64> {
    Spectrum::new(p).index(lambda, order)
}

pub fn rho(p: &ProfileSet, order: u8) -> Result<SpectralMeasure> {
    let spectrum = Arc::new(Spectrum::new(p));
    let atoms = if order == 0 { Vec::new() } else { spectrum.atoms()? };
    Ok(SpectralMeasure {
        order,
        support: spectrum.range(),
        atoms,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_examples() {
        assert_eq!(omega(-2.0, 2.0, 0.0), 0.5);
        assert_eq!(omega(-2.0, 2.0, -3.0), 0.0);
        assert_eq!(omega(0.0, 0.0, 1.0), 1.0);
        assert!((omega(-2.0, 2.0, 1.0) - (0.5 + (0.5f64).asin() / PI)).abs() < 1e-15);
    }

    #[test]
    #[allow(non_snake_case)]
    fn Omega_examples() {
        assert_eq!(Omega(-1.0, 1.0, 0.0), OmegaValue::Density(1.0 / PI));
        assert_eq!(Omega(-1.0, 1.0, 2.0), OmegaValue::Density(0.0));
        assert_eq!(Omega(3.0, 3.0, 1.0), OmegaValue::Atom(3.0));
    }
}
