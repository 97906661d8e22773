//! One-sample Kolmogorov–Smirnov statistic.

/// Acceptance bound 1.95/√n (two-sided, roughly the 0.1% level).
pub fn ks_threshold(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

/// sup_x |F_n(x) − F(x)| for the empirical CDF of `samples`.
pub fn ks_statistic<F>(samples: &[f64], mut cdf: F) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d.max(hi).max(lo)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_statistic() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.05).abs() < 1e-15);
        assert!(ks_statistic(&[0.5], |x| x) - 0.5 < 1e-15);
    }

    #[test]
    fn detects_shift() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0 + 0.2).collect();
        assert!(ks_statistic(&xs, |x: f64| x.clamp(0.0, 1.0)) > ks_threshold(1000));
    }
}
