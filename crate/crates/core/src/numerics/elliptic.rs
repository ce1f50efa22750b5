use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Complete elliptic integral of the first kind in parameter form,
/// `K(m) = ∫₀^{π/2} (1 - m sin²θ)^{-1/2} dθ`, for `m < 1`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(Error::Invalid(format!("elliptic_K parameter m = {m} must be < 1")));
    }
    let (a, _) = agm(1.0, (1.0 - m).sqrt());
    Ok(FRAC_PI_2 / a)
}

/// Complete elliptic integral of the second kind in parameter form, `m ≤ 1`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(m <= 1.0) {
        return Err(Error::Invalid(format!("elliptic_E parameter m = {m} must be ≤ 1")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let (a, csum) = agm(1.0, (1.0 - m).sqrt());
    Ok(FRAC_PI_2 / a * (1.0 - 0.5 * m - csum))
}

/// Returns the AGM and `Σ 2^{n-1} c_n²` over n ≥ 1.
fn agm(mut a: f64, mut b: f64) -> (f64, f64) {
    let mut csum = 0.0;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        pow *= 2.0;
        csum += pow * c * c;
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
    }
    (a, csum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    #[test]
    fn special_values() {
        assert!((elliptic_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(elliptic_e(1.0).unwrap(), 1.0);
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_e(1.5).is_err());
    }

    #[test]
    fn against_defining_integrals() {
        for &m in &[-2.0, -0.3, 0.1, 0.5, 0.9, 0.999] {
            let k = integrate(|t: f64| (1.0 - m * t.sin().powi(2)).powf(-0.5), 0.0, FRAC_PI_2, 1e-13)
                .unwrap()
                .value;
            let e = integrate(|t: f64| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-13)
                .unwrap()
                .value;
            assert!((elliptic_k(m).unwrap() - k).abs() < 1e-12 * k, "K({m})");
            assert!((elliptic_e(m).unwrap() - e).abs() < 1e-12, "E({m})");
        }
    }

    #[test]
    fn legendre_relation() {
        for i in 1..=9 {
            let m = i as f64 / 10.0;
            let (k, kp) = (elliptic_k(m).unwrap(), elliptic_k(1.0 - m).unwrap());
            let (e, ep) = (elliptic_e(m).unwrap(), elliptic_e(1.0 - m).unwrap());
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-11);
        }
    }
}
