use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::Expression;

type Real = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Fallible = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

const FIRST_STEP: f64 = 1e-5;
const SECOND_STEP: f64 = 1e-4;

/// A real function of one variable with optional analytic derivatives.
///
/// Missing derivatives fall back to finite differences. When a domain is set,
/// stencils near its ends become one-sided so the function is never sampled
/// outside it.
#[derive(Clone)]
pub struct ScalarFn {
    f: Fallible,
    d1: Option<Real>,
    d2: Option<Real>,
    domain: Option<(f64, f64)>,
    label: String,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFn({})", self.label)
    }
}

impl ScalarFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFn {
            f: Arc::new(move |x| Ok(f(x))),
            d1: None,
            d2: None,
            domain: None,
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::new(format!("{c}"), move |_| c)
            .with_derivative(|_| 0.0)
            .with_second_derivative(|_| 0.0)
    }

    pub fn from_expression(e: Expression) -> Self {
        let label = e.source.clone();
        ScalarFn {
            f: Arc::new(move |x| e.eval(x)),
            d1: None,
            d2: None,
            domain: None,
            label,
        }
    }

    /// Restrict finite-difference stencils to `[lo, hi]`.
    pub fn on_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Arc::new(d));
        self
    }

    pub fn with_second_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.d1.is_some() && self.d2.is_some()
    }

    pub fn try_eval(&self, x: f64) -> Result<f64> {
        (self.f)(x)
    }

    /// Evaluates, mapping domain errors to NaN.
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x).unwrap_or(f64::NAN)
    }

    /// 0 for a central stencil, otherwise the direction of a one-sided one.
    fn step_dir(&self, x: f64, h: f64) -> f64 {
        match self.domain {
            Some((lo, _)) if x - h < lo => 1.0,
            Some((_, hi)) if x + h > hi => -1.0,
            _ => 0.0,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if let Some(d) = &self.d1 {
            return d(x);
        }
        let h = FIRST_STEP * x.abs().max(1.0);
        match self.step_dir(x, h) {
            0.0 => (self.eval(x + h) - self.eval(x - h)) / (2.0 * h),
            s => {
                let h = s * h;
                (-3.0 * self.eval(x) + 4.0 * self.eval(x + h) - self.eval(x + 2.0 * h)) / (2.0 * h)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        if let Some(d) = &self.d2 {
            return d(x);
        }
        let h = SECOND_STEP * x.abs().max(1.0);
        match self.step_dir(x, 3.0 * h) {
            0.0 => (self.eval(x + h) - 2.0 * self.eval(x) + self.eval(x - h)) / (h * h),
            s => {
                let h = s * h;
                (2.0 * self.eval(x) - 5.0 * self.eval(x + h) + 4.0 * self.eval(x + 2.0 * h)
                    - self.eval(x + 3.0 * h))
                    / (h * h)
            }
        }
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync + 'static> From<F> for ScalarFn {
    fn from(f: F) -> Self {
        ScalarFn::new("closure", f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences() {
        let f = ScalarFn::new("sin", f64::sin);
        assert!((f.derivative(0.3) - 0.3f64.cos()).abs() < 1e-9);
        assert!((f.second_derivative(0.3) + 0.3f64.sin()).abs() < 1e-6);
    }

    #[test]
    fn one_sided_near_domain_ends() {
        let f = ScalarFn::from_expression(crate::expr::parse("sqrt(1-x)*x^2").unwrap()).on_domain(0.0, 1.0);
        let exact = |x: f64| 2.0 * x * (1.0 - x).sqrt() - x * x / (2.0 * (1.0 - x).sqrt());
        let x = 1.0 - 3e-6;
        assert!(f.derivative(x).is_finite());
        assert!((f.derivative(0.0) - 0.0).abs() < 1e-8);
        assert!((f.derivative(0.5) - exact(0.5)).abs() < 1e-8);
        assert!(f.second_derivative(1e-6).is_finite());
    }

    #[test]
    fn analytic_overrides() {
        let f = ScalarFn::new("sq", |x| x * x)
            .with_derivative(|x| 2.0 * x)
            .with_second_derivative(|_| 2.0);
        assert_eq!(f.derivative(3.0), 6.0);
        assert_eq!(f.second_derivative(3.0), 2.0);
        assert!(f.has_analytic_derivatives());
    }
}
