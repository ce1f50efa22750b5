//! Asymptotic eigenstate profiles `ψ_λ`, `φ_λ` and expectation values.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_sqrt_endpoints, ScalarFn, DEFAULT_TOL};
use crate::oracle::{eigenpair, tridiagonal_eigenvalue};
use crate::sequence::{ProfileSet, TridiagonalMatrix};

const SUPPORT_GRID: usize = 4096;

/// Ordered disjoint x-intervals where `α(x) ≤ λ ≤ β(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    pub intervals: Vec<(f64, f64)>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_single_interval(&self) -> bool {
        self.intervals.len() == 1
    }

    /// Index of the interval containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        self.intervals.iter().position(|&(a, b)| x >= a && x <= b)
    }
}

/// Leading profiles `Ã0`, `B̃0` of an observable sequence.
#[derive(Debug, Clone)]
pub struct ObservableProfiles {
    pub a0: ScalarFn,
    pub b0: ScalarFn,
}

impl ObservableProfiles {
    pub fn new(a0: ScalarFn, b0: ScalarFn) -> Self {
        ObservableProfiles { a0, b0 }
    }

    pub fn identity() -> Self {
        ObservableProfiles::new(ScalarFn::constant(1.0), ScalarFn::constant(0.0))
    }

    /// The diagonal observable `Ã0 = x`.
    pub fn position() -> Self {
        ObservableProfiles::new(ScalarFn::new("x", |x| x).with_derivative(|_| 1.0), ScalarFn::constant(0.0))
    }
}

/// Which part of the support an expectation value integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    All,
    Interval(usize),
}

pub fn support_set(p: &ProfileSet, lambda: f64) -> Result<SupportSet> {
    let g = |x: f64| (lambda - p.alpha(x)).min(p.beta(x) - lambda);
    let xs: Vec<f64> = (0..=SUPPORT_GRID).map(|i| i as f64 / SUPPORT_GRID as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut intervals = Vec::new();
    let mut start = (gs[0] >= 0.0).then_some(0.0);
    for i in 0..SUPPORT_GRID {
        let (g0, g1) = (gs[i], gs[i + 1]);
        if (g0 >= 0.0) == (g1 >= 0.0) {
            continue;
        }
        let r = find_root(g, xs[i], xs[i + 1], 1e-15)?;
        match start.take() {
            Some(a) => intervals.push((a, r)),
            None => start = Some(r),
        }
    }
    if let Some(a) = start {
        intervals.push((a, 1.0));
    }
    intervals.retain(|(a, b)| b > a);
    if intervals.is_empty() {
        return Err(Error::OutsideSpectrum(lambda));
    }
    Ok(SupportSet { intervals })
}

/// `ψ_λ` and `φ_λ` for one eigenvalue, with `ρ⁽⁰⁾(λ) = ∫Ω` over the support.
#[derive(Debug, Clone)]
pub struct Eigenstate<'a> {
    p: &'a ProfileSet,
    pub lambda: f64,
    pub support: SupportSet,
    pub rho0: f64,
    tol: f64,
}

impl<'a> Eigenstate<'a> {
    pub fn new(p: &'a ProfileSet, lambda: f64) -> Result<Self> {
        let support = support_set(p, lambda)?;
        let mut s = Eigenstate {
            p,
            lambda,
            support,
            rho0: 0.0,
            tol: DEFAULT_TOL,
        };
        s.rho0 = (0..s.support.len()).map(|k| s.interval_rho0(k)).sum::<Result<f64>>()?;
        if !(s.rho0.is_finite() && s.rho0 > 0.0) {
            return Err(Error::Invalid(format!("ρ0({lambda}) = {} is not a usable density", s.rho0)));
        }
        Ok(s)
    }

    /// `Ω(α(x), β(x), λ)`.
    pub fn omega(&self, x: f64) -> f64 {
        let (a0, b0) = (self.p.a0.eval(x), self.p.b0.eval(x));
        let q = 4.0 * b0 * b0 - (self.lambda - a0).powi(2);
        if q <= 0.0 {
            0.0
        } else {
            1.0 / (PI * q.sqrt())
        }
    }

    fn cos_theta(&self, x: f64) -> f64 {
        let b0 = self.p.b0.eval(x);
        if b0 <= 0.0 {
            return 0.0;
        }
        ((self.lambda - self.p.a0.eval(x)) / (2.0 * b0)).clamp(-1.0, 1.0)
    }

    fn interval_rho0(&self, k: usize) -> Result<f64> {
        let (a, b) = self.support.intervals[k];
        Ok(integrate_sqrt_endpoints(|x| self.omega(x), a, b, self.tol)?.value)
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.omega(x) / self.rho0
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.cos_theta(x) * self.psi(x)
    }

    /// `∫Ã0 ψ + 2∫B̃0 φ`, renormalized to the chosen part of the support.
    pub fn expectation(&self, q: &ObservableProfiles, branch: Branch) -> Result<f64> {
        let ks: Vec<usize> = match branch {
            Branch::All => (0..self.support.len()).collect(),
            Branch::Interval(k) if k < self.support.len() => vec![k],
            Branch::Interval(k) => {
                return Err(Error::Invalid(format!(
                    "branch {k} does not exist: the support has {} intervals",
                    self.support.len()
                )))
            }
        };
        let (mut num, mut norm) = (0.0, 0.0);
        for k in ks {
            let (a, b) = self.support.intervals[k];
            let g = |x: f64| self.omega(x) * (q.a0.eval(x) + 2.0 * q.b0.eval(x) * self.cos_theta(x));
            num += integrate_sqrt_endpoints(g, a, b, self.tol)?.value;
            norm += self.interval_rho0(k)?;
        }
        Ok(num / norm)
    }

    /// `∫xᵐ ψ_λ dx`.
    pub fn moment(&self, m: i32) -> Result<f64> {
        let mut s = 0.0;
        for &(a, b) in &self.support.intervals {
            s += integrate_sqrt_endpoints(|x| x.powi(m) * self.omega(x), a, b, self.tol)?.value;
        }
        Ok(s / self.rho0)
    }
}

pub fn psi(p: &ProfileSet, lambda: f64, x: f64) -> Result<f64> {
    Ok(Eigenstate::new(p, lambda)?.psi(x))
}

pub fn phi(p: &ProfileSet, lambda: f64, x: f64) -> Result<f64> {
    Ok(Eigenstate::new(p, lambda)?.phi(x))
}

pub fn expectation(p: &ProfileSet, q: &ObservableProfiles, lambda: f64, branch: Branch) -> Result<f64> {
    Eigenstate::new(p, lambda)?.expectation(q, branch)
}

/// Sampled finite-j profiles of eigenvector `n` (0-based):
/// `(m/2j, c_m²)` and `((2m+1)/4j, c_m c_{m+1})`.
pub type Samples = Vec<(f64, f64)>;

pub fn finite_wavefunctions(m: &TridiagonalMatrix, n: usize) -> Result<(Samples, Samples)> {
    let (_, c) = eigenpair(m, n)?;
    let tj = m.two_j as f64;
    let psi = c.iter().enumerate().map(|(k, v)| (k as f64 / tj, v * v)).collect();
    let phi = c
        .windows(2)
        .enumerate()
        .map(|(k, w)| ((2 * k + 1) as f64 / (2.0 * tj), w[0] * w[1]))
        .collect();
    Ok((psi, phi))
}

/// The support interval holding more than half of an eigenvector's weight.
pub fn assign_branch(support: &SupportSet, c: &[f64]) -> Option<usize> {
    let tj = (c.len() - 1).max(1) as f64;
    let mut mass = vec![0.0; support.len()];
    for (k, v) in c.iter().enumerate() {
        if let Some(i) = support.locate(k as f64 / tj) {
            mass[i] += v * v;
        }
    }
    let total: f64 = c.iter().map(|v| v * v).sum();
    mass.iter().position(|&w| w > 0.5 * total)
}

/// `2j ρ⁽⁰⁾(λ_n) (λ_{n+1} - λ_n)` for eigenvalue index `n` (0-based).
pub fn gap_check(m: &TridiagonalMatrix, p: &ProfileSet, n: usize) -> Result<f64> {
    let (l0, l1) = (tridiagonal_eigenvalue(m, n)?, tridiagonal_eigenvalue(m, n + 1)?);
    let rho = Eigenstate::new(p, l0)?.rho0;
    Ok(m.two_j as f64 * rho * (l1 - l0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::materialize;

    fn lipkin() -> ProfileSet {
        ProfileSet::from_expressions("l", "2*x-1", "0", "2.5*x*(1-x)", "2.5/8").unwrap()
    }

    fn alternating() -> ProfileSet {
        ProfileSet::from_expressions("a", "-10*x^2+11*x-5/2", "0", "x*(1-x)", "0").unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_set(&alternating(), -1.6).unwrap().len(), 1);
        assert_eq!(support_set(&alternating(), -0.5).unwrap().len(), 2);
        let t = ProfileSet::from_expressions("t", "0", "0", "1", "0").unwrap();
        assert_eq!(support_set(&t, 0.0).unwrap().intervals, vec![(0.0, 1.0)]);
        assert!(support_set(&t, 3.0).is_err());
    }

    #[test]
    fn normalization_and_bounds() {
        let p = lipkin();
        let s = Eigenstate::new(&p, -0.67).unwrap();
        assert!((s.expectation(&ObservableProfiles::identity(), Branch::All).unwrap() - 1.0).abs() < 1e-7);
        assert!((s.moment(0).unwrap() - 1.0).abs() < 1e-7);
        for k in 1..100 {
            let x = k as f64 / 100.0;
            assert!(s.phi(x).abs() <= s.psi(x) + 1e-15);
        }
    }

    #[test]
    fn branches_average_to_full() {
        let p = alternating();
        let s = Eigenstate::new(&p, -0.5).unwrap();
        let q = ObservableProfiles::position();
        let all = s.expectation(&q, Branch::All).unwrap();
        let (b0, b1) = (
            s.expectation(&q, Branch::Interval(0)).unwrap(),
            s.expectation(&q, Branch::Interval(1)).unwrap(),
        );
        let (r0, r1) = (s.interval_rho0(0).unwrap(), s.interval_rho0(1).unwrap());
        assert!((all - (r0 * b0 + r1 * b1) / (r0 + r1)).abs() < 1e-6);
        assert!(b0.min(b1) < all && all < b0.max(b1));
        assert!(s.expectation(&q, Branch::Interval(2)).is_err());
    }

    #[test]
    fn finite_wavefunctions_normalized() {
        let m = materialize(&lipkin(), 100).unwrap();
        let (psi, _) = finite_wavefunctions(&m, 30).unwrap();
        assert!((psi.iter().map(|v| v.1).sum::<f64>() - 1.0).abs() < 1e-10);
        let d = TridiagonalMatrix::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let (psi, _) = finite_wavefunctions(&d, 1).unwrap();
        assert!((psi[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_examples() {
        let t = ProfileSet::from_expressions("t", "0", "0", "1", "0").unwrap();
        let m = materialize(&t, 1000).unwrap();
        assert!((gap_check(&m, &t, 500).unwrap() - 1.0).abs() < 0.05);
        let p = lipkin();
        let m = materialize(&p, 600).unwrap();
        assert!((gap_check(&m, &p, 150).unwrap() - 1.0).abs() < 0.05);
    }
}
