//! Numerical evidence for complete monotonicity.
//!
//! A completely monotone f restricted to an arithmetic grid gives a
//! completely monotone sequence, so (−1)^k Δ^k f ≥ 0 for every k. The
//! difference check tests that directly. The Bernstein check inverts the
//! Laplace transform of a candidate and tests that the representing density
//! is non-negative.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::QuadConfig;
use crate::special::ml_neg;
use crate::transforms::laplace_inverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmVerdict {
    ConsistentWithCM,
    ViolationFound,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMReport {
    pub orders_checked: usize,
    /// Highest order whose differences rise above the noise bound somewhere.
    pub orders_resolved: usize,
    pub grid: String,
    /// Minimum of (−1)^k Δ^k f / scale over the grid and orders (for the
    /// Bernstein check: minimum recovered density over its maximum).
    pub min_signed_value: f64,
    pub verdict: CmVerdict,
    /// (x, k) at the minimum.
    pub worst_point: (f64, usize),
    pub tolerance: f64,
    /// Recovered density samples (t, value); empty for difference checks.
    pub recovered: Vec<(f64, f64)>,
}

impl CMReport {
    pub fn passed(&self) -> bool {
        self.verdict == CmVerdict::ConsistentWithCM
    }
}

/// Stencil geometry for [`cm_difference_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmGrid {
    pub a: f64,
    pub delta: f64,
    pub k_max: usize,
    pub m: usize,
}

impl CmGrid {
    /// Stencil of order k_max spanning [a, 10a], with m points overall.
    pub fn spanning_decade(a: f64, k_max: usize, m: usize) -> Self {
        CmGrid {
            a,
            delta: 9.0 * a / k_max as f64,
            k_max,
            m,
        }
    }
}

impl Default for CmGrid {
    /// a = 0.05, orders up to 10, 40 points.
    fn default() -> Self {
        CmGrid::spanning_decade(0.05, 10, 40)
    }
}

/// Checks (−1)^k Δ^k f(a + jδ) ≥ −tol·scale for k ≤ k_max and j ≤ m−1−k.
///
/// scale = |f(a)| + 2^k·ε·max|f| on the stencil. A negative value below
/// −tol·scale is a violation if it also exceeds that noise bound, and makes
/// the verdict Inconclusive otherwise.
pub fn cm_difference_check<F>(f: F, a: f64, delta: f64, k_max: usize, m: usize, tol: f64) -> Result<CMReport>
where
    F: Fn(f64) -> f64,
{
    if !(a > 0.0) || !(delta > 0.0) || !a.is_finite() || !delta.is_finite() {
        return domain(format!("need a > 0 and delta > 0, got a = {a}, delta = {delta}"));
    }
    if k_max == 0 || k_max > 20 {
        return domain(format!("k_max must lie in 1..=20, got {k_max}"));
    }
    if m <= k_max {
        return domain(format!("m = {m} grid points cannot support order {k_max}"));
    }
    if !(tol >= 0.0) {
        return domain(format!("tol must be non-negative, got {tol}"));
    }
    let values: Vec<f64> = (0..m).map(|j| f(a + j as f64 * delta)).collect();
    let grid = format!("a={a}, delta={delta}, m={m}");
    if values.iter().any(|v| !v.is_finite()) {
        return Ok(CMReport {
            orders_checked: 0,
            orders_resolved: 0,
            grid,
            min_signed_value: f64::NAN,
            verdict: CmVerdict::Inconclusive,
            worst_point: (a, 0),
            tolerance: tol,
            recovered: Vec::new(),
        });
    }
    let f_a = values[0].abs();
    let mut diff = values.clone();
    let mut min_val = f64::INFINITY;
    let mut worst = (a, 0);
    let mut violation = false;
    let mut inconclusive = false;
    let mut resolved = 0;
    // k = 0: f itself must be non-negative
    for k in 0..=k_max {
        if k > 0 {
            for j in 0..diff.len() - 1 {
                diff[j] = diff[j + 1] - diff[j];
            }
            diff.pop();
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (j, d) in diff.iter().enumerate() {
            let stencil_max = values[j..=j + k].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let noise = (1u64 << k) as f64 * f64::EPSILON * stencil_max;
            let scale = f_a + noise;
            let s = sign * d;
            if s.abs() > noise {
                resolved = k;
            }
            let normalized = if scale > 0.0 { s / scale } else { s };
            if normalized < min_val {
                min_val = normalized;
                worst = (a + j as f64 * delta, k);
            }
            if s < -tol * scale {
                if -s > noise {
                    violation = true;
                } else {
                    inconclusive = true;
                }
            }
        }
    }
    let verdict = if violation {
        CmVerdict::ViolationFound
    } else if inconclusive {
        CmVerdict::Inconclusive
    } else {
        CmVerdict::ConsistentWithCM
    };
    Ok(CMReport {
        orders_checked: k_max,
        orders_resolved: resolved,
        grid,
        min_signed_value: min_val,
        verdict,
        worst_point: worst,
        tolerance: tol,
        recovered: Vec::new(),
    })
}

/// [`cm_difference_check`] on a [`CmGrid`].
pub fn cm_difference_check_grid<F>(f: F, grid: CmGrid, tol: f64) -> Result<CMReport>
where
    F: Fn(f64) -> f64,
{
    cm_difference_check(f, grid.a, grid.delta, grid.k_max, grid.m, tol)
}

/// Inverts `fhat` at each t and checks the recovered density is ≥ −tol
/// (relative to its largest magnitude). Points where inversion fails make
/// the verdict Inconclusive.
pub fn cm_bernstein_check<F>(fhat: F, t_grid: &[f64], cfg: &QuadConfig, tol: f64) -> Result<CMReport>
where
    F: Fn(Complex64) -> Complex64,
{
    cfg.validate()?;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return domain("t_grid must be non-empty with positive points");
    }
    let mut recovered = Vec::with_capacity(t_grid.len());
    let mut inconclusive = false;
    let mut errors = Vec::new();
    for &t in t_grid {
        match laplace_inverse(&fhat, t, cfg) {
            Ok(r) => {
                recovered.push((t, r.value));
                errors.push(r.abs_error_estimate);
            }
            Err(Error::InversionFailure(_)) => inconclusive = true,
            Err(e) => return Err(e),
        }
    }
    let peak = recovered.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let mut min_val = f64::INFINITY;
    let mut worst = (t_grid[0], 0);
    let mut violation = false;
    for (&(t, v), &e) in recovered.iter().zip(&errors) {
        let normalized = if peak > 0.0 { v / peak } else { v };
        if normalized < min_val {
            min_val = normalized;
            worst = (t, 0);
        }
        if v < -tol * peak.max(f64::MIN_POSITIVE) {
            if -v > e {
                violation = true;
            } else {
                inconclusive = true;
            }
        }
    }
    let verdict = if violation {
        CmVerdict::ViolationFound
    } else if inconclusive {
        CmVerdict::Inconclusive
    } else {
        CmVerdict::ConsistentWithCM
    };
    Ok(CMReport {
        orders_checked: 0,
        orders_resolved: 0,
        grid: format!(
            "{} inversion points in [{}, {}]",
            t_grid.len(),
            t_grid[0],
            t_grid[t_grid.len() - 1]
        ),
        min_signed_value: min_val,
        verdict,
        worst_point: worst,
        tolerance: tol,
        recovered,
    })
}

/// A real function with a display name.
#[derive(Clone)]
pub struct NamedFn {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl NamedFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        NamedFn {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl std::fmt::Debug for NamedFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}

/// E_α(−x), built as E_α(−1·(x^{1/α})^α).
pub fn ml_neg_unit(alpha: f64, cfg: QuadConfig) -> NamedFn {
    NamedFn::new(format!("E_{alpha}(-x)"), move |x| {
        ml_neg(alpha, 1.0, x.powf(1.0 / alpha), &cfg).map_or(f64::NAN, |r| r.value)
    })
}

/// e^{−x}, 1/(1+x), E_{1/2}(−x), E_{0.7}(−x).
pub fn default_seeds(cfg: QuadConfig) -> Vec<NamedFn> {
    vec![
        NamedFn::new("exp(-x)", |x| (-x).exp()),
        NamedFn::new("1/(1+x)", |x| 1.0 / (1.0 + x)),
        ml_neg_unit(0.5, cfg),
        ml_neg_unit(0.7, cfg),
    ]
}

/// Positive functions with completely monotone derivative.
pub fn default_inner_functions() -> Vec<NamedFn> {
    vec![
        NamedFn::new("x", |x| x),
        NamedFn::new("x^0.5", |x| x.sqrt()),
        NamedFn::new("x^0.3", |x| x.powf(0.3)),
        NamedFn::new("ln(1+x)", |x| x.ln_1p()),
    ]
}

/// Laplace transforms of infinitely divisible laws, (1/(1+x^α))^μ.
pub fn default_id_cases() -> Vec<NamedFn> {
    let mut out = Vec::new();
    for &(alpha, mu) in &[(0.5, 2.0), (0.3, 0.5), (0.8, 1.5)] {
        out.push(NamedFn::new(format!("(1/(1+x^{alpha}))^{mu}"), move |x: f64| {
            (1.0 + x.powf(alpha)).powf(-mu)
        }));
    }
    out
}

/// Runs the difference check on every pairwise product of `seeds`, every
/// composition seed(η) with η from `inner`, and each entry of `extra`.
pub fn cm_closure_suite(
    seeds: &[NamedFn],
    inner: &[NamedFn],
    extra: &[NamedFn],
    grid: CmGrid,
    tol: f64,
) -> Result<Vec<(String, CMReport)>> {
    let mut out = Vec::new();
    for (i, p) in seeds.iter().enumerate() {
        for q in &seeds[i..] {
            let name = format!("{} * {}", p.name, q.name);
            let r = cm_difference_check_grid(|x| p.eval(x) * q.eval(x), grid, tol)?;
            out.push((name, r));
        }
    }
    for p in seeds {
        for eta in inner {
            let name = format!("{} o {}", p.name, eta.name);
            let r = cm_difference_check_grid(|x| p.eval(eta.eval(x)), grid, tol)?;
            out.push((name, r));
        }
    }
    for e in extra {
        out.push((e.name.clone(), cm_difference_check_grid(|x| e.eval(x), grid, tol)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_is_consistent() {
        let r = cm_difference_check(|x| (-x).exp(), 0.1, 0.25, 10, 40, 1e-6).unwrap();
        assert_eq!(r.verdict, CmVerdict::ConsistentWithCM);
        assert!(r.min_signed_value >= 0.0);
    }

    #[test]
    fn ml_is_consistent() {
        let f = ml_neg_unit(0.5, QuadConfig::default());
        let r = cm_difference_check(|x| f.eval(x), 0.1, 0.25, 10, 40, 1e-6).unwrap();
        assert_eq!(r.verdict, CmVerdict::ConsistentWithCM, "{r:?}");
    }

    #[test]
    fn sine_is_flagged() {
        let r = cm_difference_check(|x| x.sin() + 2.0, 0.1, 0.25, 8, 40, 1e-6).unwrap();
        assert_eq!(r.verdict, CmVerdict::ViolationFound);
        assert!(r.worst_point.1 >= 1);
    }

    #[test]
    fn bernstein_exponential() {
        let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
        let r = cm_bernstein_check(|s| 1.0 / (1.0 + s), &grid, &QuadConfig::default(), 1e-8).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.recovered[1].1 - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn bernstein_flags_negative_density() {
        // transform of e^{−t} − 2e^{−2t}, negative near 0
        let r = cm_bernstein_check(
            |s| 1.0 / (1.0 + s) - 2.0 / (2.0 + s),
            &[0.1, 0.5, 1.0, 2.0],
            &QuadConfig::default(),
            1e-8,
        )
        .unwrap();
        assert_eq!(r.verdict, CmVerdict::ViolationFound);
    }

    #[test]
    fn closure_examples() {
        let cfg = QuadConfig::default();
        let seeds = vec![NamedFn::new("exp(-x)", |x| (-x).exp()), ml_neg_unit(0.5, cfg)];
        let inner = vec![NamedFn::new("x", |x| x), NamedFn::new("x^0.5", |x| x.sqrt())];
        let reports = cm_closure_suite(&seeds, &inner, &default_id_cases(), CmGrid::default(), 1e-6).unwrap();
        assert_eq!(reports.len(), 3 + 4 + 3);
        for (name, r) in reports {
            assert!(r.passed(), "{name}: {r:?}");
        }
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(cm_difference_check(|x| x, 0.0, 0.1, 3, 10, 0.0).is_err());
        assert!(cm_difference_check(|x| x, 0.1, 0.1, 21, 40, 0.0).is_err());
        assert!(cm_difference_check(|x| x, 0.1, 0.1, 5, 5, 0.0).is_err());
    }
}
