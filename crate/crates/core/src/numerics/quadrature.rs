use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut fv = [(0.0, 0.0); 7];
    for (i, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[i];
        let (f1, f2) = (f(c - dx), f(c + dx));
        *slot = (f1, f2);
        kronrod += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() {
        return Err(Error::Quadrature {
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    let mut abs = WGK[7] * fc.abs();
    for (i, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[i] * ((f1 - mean).abs() + (f2 - mean).abs());
        abs += WGK[i] * (f1.abs() + f2.abs());
    }
    let h = h.abs();
    let (asc, abs) = (asc * h, abs * h);
    let mut error = ((kronrod - gauss) * h).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs);
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * h * (b - a).signum(),
        error,
        abs,
    })
}

/// Globally adaptive Gauss–Kronrod 15-point quadrature with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut panels = vec![gk15(&f, a, b)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let magnitude: f64 = panels.iter().map(|p| p.abs).sum();
        if error <= tol.max(64.0 * f64::EPSILON * magnitude) {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let p = &panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let scale = p.a.abs().max(p.b.abs()).max((b - a).abs() * 1e-250);
        let too_small = (mid - p.a).abs() <= 64.0 * f64::EPSILON * scale;
        if panels.len() >= MAX_INTERVALS || too_small {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let (pa, pb) = (p.a, p.b);
        let left = gk15(&f, pa, mid)?;
        let right = gk15(&f, mid, pb)?;
        evaluations += 30;
        panels[worst] = left;
        panels.push(right);
    }
}

/// Quadrature for integrands with inverse square-root singularities at either
/// endpoint, via `x = m - r cos(phi)` which cancels the divergence.
pub fn integrate_sqrt_endpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if a == b {
        return integrate(|_| 0.0, 0.0, 0.0, tol);
    }
    let r = 0.5 * (b - a);
    integrate(
        |phi| {
            let x = if phi < FRAC_PI_2 {
                let s = (0.5 * phi).sin();
                a + 2.0 * r * s * s
            } else {
                let c = (0.5 * (PI - phi)).sin();
                b - 2.0 * r * c * c
            };
            let w = r * phi.sin();
            let x = x.clamp(a.min(b), a.max(b));
            let v = if w == 0.0 { 0.0 } else { f(x) * w };
            if !v.is_finite() && (x == a || x == b) {
                0.0
            } else {
                v
            }
        },
        0.0,
        PI,
        tol,
    )
}

const TANH_SINH_TMAX: f64 = 4.5;
const TANH_SINH_MAX_LEVEL: usize = 12;

/// Tanh-sinh quadrature passing `(x, x - a, b - x)` to the integrand so that
/// distances to the endpoints keep full relative precision.
pub fn integrate_singular_with<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if a == b {
        return integrate(|_| 0.0, 0.0, 0.0, tol);
    }
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;
    let mut term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let dl = (b - a) / ((-2.0 * u).exp() + 1.0);
        let dr = (b - a) / ((2.0 * u).exp() + 1.0);
        if dl == 0.0 || dr == 0.0 {
            return 0.0;
        }
        let cu = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cu * cu);
        let x = if u < 0.0 { a + dl } else { b - dr };
        evaluations += 1;
        w * f(x, dl, dr)
    };

    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1.0;
    while k * h <= TANH_SINH_TMAX {
        sum += term(k * h) + term(-k * h);
        k += 1.0;
    }
    let mut prev = sum * h;
    for level in 1..=TANH_SINH_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= TANH_SINH_TMAX {
            sum += term(k * h) + term(-k * h);
            k += 2.0;
        }
        let value = sum * h;
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error: f64::INFINITY,
            });
        }
        let error = (value - prev).abs();
        if level >= 3 && error <= tol.max(4.0 * f64::EPSILON * value.abs()) {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        prev = value;
    }
    Err(Error::Quadrature {
        estimate: prev,
        error: f64::NAN,
    })
}

/// Tanh-sinh quadrature for integrands diverging like an inverse square root
/// at an endpoint. Nodes that round onto an endpoint are dropped.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    integrate_singular_with(
        |x, _, _| if x == a || x == b { 0.0 } else { f(x) },
        a,
        b,
        tol,
    )
}
