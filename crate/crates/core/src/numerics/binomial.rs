/// Binomial weights `P(n; trials, x)` for `n = 0..=trials`, computed in log space.
pub fn binomial_weights(trials: usize, x: f64) -> Vec<f64> {
    let mut w = vec![0.0; trials + 1];
    if x <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if x >= 1.0 {
        w[trials] = 1.0;
        return w;
    }
    let (lx, lq) = (x.ln(), (-x).ln_1p());
    let mut log_choose = 0.0;
    for (n, slot) in w.iter_mut().enumerate() {
        if n > 0 {
            log_choose += ((trials - n + 1) as f64).ln() - (n as f64).ln();
        }
        *slot = (log_choose + n as f64 * lx + (trials - n) as f64 * lq).exp();
    }
    w
}

/// Exact `Σₙ g(n) P(n; trials, x)`.
pub fn binomial_expect<G: Fn(usize) -> f64>(g: G, trials: usize, x: f64) -> f64 {
    binomial_weights(trials, x)
        .iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(n, w)| w * g(n))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        assert!((binomial_expect(|_| 1.0, 100, 0.3) - 1.0).abs() < 1e-13);
        assert!((binomial_expect(|n| n as f64, 100, 0.3) - 30.0).abs() < 1e-10);
        let m2 = binomial_expect(|n| (n * n) as f64, 100, 0.3);
        assert!((m2 - 921.0).abs() < 1e-9);
    }

    #[test]
    fn endpoints_are_point_masses() {
        assert_eq!(binomial_expect(|n| n as f64 + 7.0, 10, 0.0), 7.0);
        assert_eq!(binomial_expect(|n| n as f64, 10, 1.0), 10.0);
        assert_eq!(binomial_expect(|n| n as f64, 0, 0.4), 0.0);
    }

    #[test]
    fn large_trials_do_not_overflow() {
        let s = binomial_expect(|_| 1.0, 6000, 0.5);
        assert!((s - 1.0).abs() < 1e-11);
    }
}
