use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{find_root, integrate_sqrt_endpoints, DEFAULT_TOL};
use crate::sequence::BandProfileSet;

const THETA_GRID: usize = 2048;
const X_SCAN: usize = 512;
const RANGE_GRID: usize = 256;

/// Distribution functions of a closed band sequence from the symbols `Fs₀`, `Fs₁`.
///
/// For each x the θ-roots of `Fs₀(x, θ) = λ` are located on a periodic grid,
/// including root pairs hidden inside one grid cell, and the x-axis is split
/// wherever the root count changes.
#[derive(Debug, Clone)]
pub struct BandSpectrum {
    bp: BandProfileSet,
    cos_table: Vec<Vec<f64>>,
    sin_table: Vec<Vec<f64>>,
    range: (f64, f64),
    tol: f64,
}

struct Slice {
    c: Vec<f64>,
    d: Vec<f64>,
}

impl Slice {
    fn value(&self, theta: f64) -> f64 {
        let mut s = self.c[0];
        for m in 1..self.c.len() {
            let (sn, cs) = (m as f64 * theta).sin_cos();
            s += 2.0 * (self.c[m] * cs + self.d[m - 1] * sn);
        }
        s
    }

    fn slope(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for m in 1..self.c.len() {
            let mf = m as f64;
            let (sn, cs) = (mf * theta).sin_cos();
            s += 2.0 * mf * (-self.c[m] * sn + self.d[m - 1] * cs);
        }
        s
    }
}

impl BandSpectrum {
    pub fn new(bp: &BandProfileSet) -> Self {
        let m = bp.bands();
        let grid: Vec<f64> = (0..THETA_GRID).map(|i| 2.0 * PI * i as f64 / THETA_GRID as f64).collect();
        let cos_table = (0..=m)
            .map(|k| grid.iter().map(|t| (k as f64 * t).cos()).collect())
            .collect();
        let sin_table = (0..=m)
            .map(|k| grid.iter().map(|t| (k as f64 * t).sin()).collect())
            .collect();
        let mut s = BandSpectrum {
            bp: bp.clone(),
            cos_table,
            sin_table,
            range: (0.0, 0.0),
            tol: DEFAULT_TOL,
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=RANGE_GRID {
            let sl = s.slice(i as f64 / RANGE_GRID as f64);
            for v in s.grid_values(&sl) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        s.range = (lo, hi);
        s
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Grid estimate of `(min Fs₀, max Fs₀)`.
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn profiles(&self) -> &BandProfileSet {
        &self.bp
    }

    fn slice(&self, x: f64) -> Slice {
        Slice {
            c: self.bp.c0.iter().map(|f| f.eval(x)).collect(),
            d: self.bp.d0.iter().map(|f| f.eval(x)).collect(),
        }
    }

    fn grid_values(&self, sl: &Slice) -> Vec<f64> {
        (0..THETA_GRID)
            .map(|i| {
                let mut s = sl.c[0];
                for m in 1..sl.c.len() {
                    s += 2.0 * (sl.c[m] * self.cos_table[m][i] + sl.d[m - 1] * self.sin_table[m][i]);
                }
                s
            })
            .collect()
    }

    /// θ-roots of `Fs₀(x, θ) = λ` in `[0, 2π)`, sorted.
    fn roots(&self, sl: &Slice, lambda: f64) -> Vec<f64> {
        let h = 2.0 * PI / THETA_GRID as f64;
        let g: Vec<f64> = self.grid_values(sl).iter().map(|v| v - lambda).collect();
        let f = |t: f64| sl.value(t) - lambda;
        let mut out = Vec::new();
        for i in 0..THETA_GRID {
            let (t0, t1) = (i as f64 * h, (i + 1) as f64 * h);
            let (g0, g1) = (g[i], g[(i + 1) % THETA_GRID]);
            if g0 == 0.0 {
                out.push(t0);
                continue;
            }
            if g0 * g1 < 0.0 {
                if let Ok(r) = find_root(f, t0, t1, 1e-15) {
                    out.push(r);
                }
                continue;
            }
            let (s0, s1) = (sl.slope(t0), sl.slope(t1));
            if s0 * s1 < 0.0 {
                if let Ok(tx) = find_root(|t| sl.slope(t), t0, t1, 1e-15) {
                    if f(tx) * g0 < 0.0 {
                        for (a, b) in [(t0, tx), (tx, t1)] {
                            if let Ok(r) = find_root(f, a, b, 1e-15) {
                                out.push(r);
                            }
                        }
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Fraction of θ with `Fs₀(x, θ) < λ`.
    fn measure(&self, sl: &Slice, lambda: f64) -> f64 {
        let roots = self.roots(sl, lambda);
        if roots.is_empty() {
            return if sl.value(0.0) < lambda { 1.0 } else { 0.0 };
        }
        let n = roots.len();
        let mut s = 0.0;
        for k in 0..n {
            let a = roots[k];
            let b = if k + 1 < n { roots[k + 1] } else { roots[0] + 2.0 * PI };
            if sl.value(0.5 * (a + b)) < lambda {
                s += b - a;
            }
        }
        s / (2.0 * PI)
    }

    fn d1_density(&self, x: f64, lambda: f64) -> f64 {
        let sl = self.slice(x);
        let mut s = 0.0;
        for t in self.roots(&sl, lambda) {
            let slope = sl.slope(t).abs();
            if slope < 1e-300 {
                continue;
            }
            let (dx, _) = self.bp.fs0_x_derivatives(x, t);
            let w = self.bp.fs(1, x, t) + (2.0 * x - 1.0) * dx / 4.0;
            s += w / (2.0 * PI * slope);
        }
        s
    }

    fn root_count(&self, x: f64, lambda: f64) -> usize {
        self.roots(&self.slice(x), lambda).len()
    }

    /// x-panels on which the θ-root count is constant.
    fn x_panels(&self, lambda: f64) -> Vec<(f64, f64)> {
        let xs: Vec<f64> = (0..=X_SCAN).map(|i| i as f64 / X_SCAN as f64).collect();
        let counts: Vec<usize> = xs.iter().map(|&x| self.root_count(x, lambda)).collect();
        let mut cuts = vec![0.0];
        for i in 0..X_SCAN {
            if counts[i] != counts[i + 1] {
                let (mut a, mut b) = (xs[i], xs[i + 1]);
                let ca = counts[i];
                while b - a > 1e-14 {
                    let m = 0.5 * (a + b);
                    if self.root_count(m, lambda) == ca {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                cuts.push(0.5 * (a + b));
            }
        }
        cuts.push(1.0);
        cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| (w[0], w[1])).collect()
    }

    /// `(D⁽⁰⁾(λ), D⁽¹⁾(λ))`.
    pub fn d0_d1(&self, lambda: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.range;
        if lambda < lo - 1e-9 * (hi - lo) {
            return Ok((0.0, 0.0));
        }
        if lambda > hi + 1e-9 * (hi - lo) {
            return Ok((1.0, 0.0));
        }
        let (mut d0, mut d1) = (0.0, 0.0);
        for (a, b) in self.x_panels(lambda) {
            d0 += integrate_sqrt_endpoints(|x| self.measure(&self.slice(x), lambda), a, b, self.tol)?.value;
            d1 -= integrate_sqrt_endpoints(|x| self.d1_density(x, lambda), a, b, self.tol)?.value;
        }
        Ok((d0.clamp(0.0, 1.0), d1))
    }

    pub fn d0(&self, lambda: f64) -> Result<f64> {
        Ok(self.d0_d1(lambda)?.0)
    }
}

pub fn band_d0_d1(bp: &BandProfileSet, lambda: f64) -> Result<(f64, f64)> {
    BandSpectrum::new(bp).d0_d1(lambda)
}
