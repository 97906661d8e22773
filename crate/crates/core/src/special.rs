//! Mittag-Leffler functions E_{α,β}(x) = Σ x^k / Γ(αk+β) and the relaxation
//! function E_α(−λx^α).
//!
//! `ml_neg` uses the power series while it keeps ~1e-10 relative accuracy
//! and otherwise the spectral representation
//!
//! ```text
//!   E_α(−z) = (sin απ / π) ∫_0^∞ e^{−u} u^{α−1} z / (u^{2α} + 2 z u^α cos απ + z²) du,
//! ```
//!
//! which is a positive integrand for every 0 < α < 1. The Pollard integral
//! ∫ p_α(u) e^{−zu} du and Talbot inversion of s^{α−1}/(λ+s^α) are available
//! through [`ml_neg_via`] as independent cross-checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma, ln_gamma};
use crate::num::CompensatedSum;
use crate::quad::{exp_sinh, tanh_sinh_panels, QuadConfig, Tolerance};
use crate::stable::{inner_rel, scaled_density};
use crate::transforms::talbot;

/// Largest λx^α for which the series is attempted.
pub const SERIES_SWITCH: f64 = 5.0;
/// Relative cancellation floor beyond which the series reports NonConvergent.
const CANCELLATION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLIndex {
    pub alpha: f64,
    pub beta: f64,
}

impl MLIndex {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("beta must be positive, got {beta}"));
        }
        Ok(MLIndex { alpha, beta })
    }

    /// The one-parameter function E_α.
    pub fn one(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    Series,
    PollardIntegral,
    ClosedForm,
    Quadrature,
    InverseLaplace,
    SpectralIntegral,
    Extrapolation,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::PollardIntegral => "pollard_integral",
            Route::ClosedForm => "closed_form",
            Route::Quadrature => "quadrature",
            Route::InverseLaplace => "inverse_laplace",
            Route::SpectralIntegral => "spectral_integral",
            Route::Extrapolation => "extrapolation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub route: Route,
}

impl EvalResult {
    pub(crate) fn exact(value: f64, route: Route) -> Self {
        EvalResult {
            value,
            abs_error_estimate: value.abs() * f64::EPSILON,
            route,
        }
    }
}

fn term(alpha: f64, beta: f64, x: f64, k: usize) -> f64 {
    let arg = alpha * k as f64 + beta;
    if k < 300 && arg < 170.0 {
        let p = x.powi(k as i32);
        if p.is_finite() {
            return p / gamma(arg);
        }
    }
    let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * (k as f64 * x.abs().ln() - ln_gamma(arg)).exp()
}

/// Σ_{k≥0} x^k / Γ(αk+β), truncated once the tail bound falls below `tol·|sum|`.
pub fn ml_series(idx: MLIndex, x: f64, tol: f64) -> Result<EvalResult> {
    let MLIndex { alpha, beta } = MLIndex::new(idx.alpha, idx.beta)?;
    if !(tol > 0.0) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    if !x.is_finite() {
        return domain(format!("x must be finite, got {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(1.0 / gamma(beta), Route::Series));
    }
    if alpha == 0.0 {
        if x.abs() >= 1.0 {
            return Err(Error::NonConvergent(format!(
                "geometric series at alpha = 0 diverges for |x| = {}",
                x.abs()
            )));
        }
        let value = 1.0 / ((1.0 - x) * gamma(beta));
        return Ok(EvalResult {
            value,
            abs_error_estimate: 4.0 * f64::EPSILON * value.abs(),
            route: Route::Series,
        });
    }

    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut prev = term(alpha, beta, x, 0);
    sum.add(prev);
    abs_sum += prev.abs();
    for k in 1..20_000usize {
        let t = term(alpha, beta, x, k);
        if !t.is_finite() || t.abs() > 1e300 {
            break;
        }
        sum.add(t);
        abs_sum += t.abs();
        // |t_{k+1}/t_k| is non-increasing, so the tail is bounded geometrically.
        let rho = (t / prev).abs();
        prev = t;
        if rho < 1.0 {
            let tail = t.abs() * rho / (1.0 - rho);
            let value = sum.value();
            if tail <= tol * value.abs() || (value == 0.0 && tail == 0.0) {
                let cancel = 16.0 * f64::EPSILON * abs_sum;
                if cancel > CANCELLATION_FLOOR * value.abs() {
                    return Err(Error::NonConvergent(format!(
                        "series cancellation at x = {x}: bound {cancel:e} against value {value:e}"
                    )));
                }
                return Ok(EvalResult {
                    value,
                    abs_error_estimate: tail + cancel,
                    route: Route::Series,
                });
            }
        }
    }
    Err(Error::NonConvergent(format!(
        "series for alpha = {alpha}, beta = {beta} at x = {x} overflowed or exceeded the term budget"
    )))
}

fn check_ml_neg(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("x must be finite and non-negative, got {x}"));
    }
    cfg.validate()
}

/// E_α(−λx^α), with E_1(−λx) = e^{−λx} and E_0(−λx) = 1/(1+λx) at the endpoints.
pub fn ml_neg(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_ml_neg(alpha, lambda, x, cfg)?;
    if let Some(r) = endpoint(alpha, lambda, x) {
        return Ok(r);
    }
    let z = lambda * x.powf(alpha);
    if z <= SERIES_SWITCH {
        match ml_series(MLIndex { alpha, beta: 1.0 }, -z, 1e-16) {
            Ok(r) => return Ok(r),
            Err(Error::NonConvergent(_)) => {}
            Err(e) => return Err(e),
        }
    }
    spectral(alpha, z, cfg)
}

/// E_α(−λx^α) through a chosen route.
pub fn ml_neg_via(alpha: f64, lambda: f64, x: f64, route: Route, cfg: &QuadConfig) -> Result<EvalResult> {
    check_ml_neg(alpha, lambda, x, cfg)?;
    if route == Route::ClosedForm {
        return endpoint(alpha, lambda, x).ok_or_else(|| Error::Domain(format!("no closed form at alpha = {alpha}")));
    }
    if alpha == 0.0 || alpha == 1.0 {
        return domain(format!("route {} needs 0 < alpha < 1", route.name()));
    }
    let z = lambda * x.powf(alpha);
    match route {
        Route::Series => ml_series(MLIndex { alpha, beta: 1.0 }, -z, 1e-16),
        Route::SpectralIntegral => spectral(alpha, z, cfg),
        Route::PollardIntegral => pollard_integral(alpha, z, cfg),
        Route::InverseLaplace => {
            if x == 0.0 {
                return domain("inverse Laplace route needs x > 0");
            }
            let r = talbot(
                |s: Complex64| s.powf(alpha - 1.0) / (lambda + s.powf(alpha)),
                x,
                cfg.talbot_nodes,
            )?;
            Ok(EvalResult {
                route: Route::InverseLaplace,
                ..r
            })
        }
        other => domain(format!("route {} does not evaluate E_alpha(-z)", other.name())),
    }
}

fn endpoint(alpha: f64, lambda: f64, x: f64) -> Option<EvalResult> {
    if x == 0.0 {
        Some(EvalResult::exact(1.0, Route::ClosedForm))
    } else if alpha == 1.0 {
        Some(EvalResult::exact((-lambda * x).exp(), Route::ClosedForm))
    } else if alpha == 0.0 {
        Some(EvalResult::exact(1.0 / (1.0 + lambda * x), Route::ClosedForm))
    } else {
        None
    }
}

fn spectral(alpha: f64, z: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if z == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    let (s, c) = (alpha * PI).sin_cos();
    // In v = u^α the u^{α−1} endpoint singularity is absorbed by du.
    let f = |v: f64| s / (alpha * PI) * (-v.powf(1.0 / alpha)).exp() * z / (v * v + 2.0 * z * v * c + z * z);
    let vmax = 745f64.powf(alpha);
    let mut points = vec![0.0, vmax];
    let mut p = z;
    while p < 1.0 {
        points.push(p);
        p *= 1e3;
    }
    points.push(z);
    if c < 0.0 {
        points.push(-z * c);
    }
    points.extend([1.0, 10f64.powf(alpha), 40f64.powf(alpha), 150f64.powf(alpha)]);
    points.retain(|p| *p >= 0.0 && *p <= vmax);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let tol = Tolerance {
        abs: 0.0,
        rel: inner_rel(cfg),
    };
    let q = tanh_sinh_panels(f, &points, tol, cfg.max_nodes)?;
    Ok(EvalResult {
        value: q.value,
        abs_error_estimate: q.error + 4.0 * f64::EPSILON * q.value,
        route: Route::SpectralIntegral,
    })
}

/// ∫_0^∞ p_α(u) e^{−zu} du with p_α the Pollard density.
fn pollard_integral(alpha: f64, z: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if z == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    let p0 = 1.0 / gamma(1.0 - alpha);
    let mut err_acc = 0.0;
    let mut density_err = 0.0f64;
    let mut f = |u: f64| {
        if u == 0.0 {
            return p0;
        }
        match scaled_density(alpha, u, cfg) {
            Ok(g) => {
                let w = (-z * u).exp() / (alpha * u);
                density_err = density_err.max(g.abs_error_estimate / g.value.max(1e-300));
                g.value * w
            }
            Err(_) => f64::NAN,
        }
    };
    let split = if z > 1.0 { 1.0 / z } else { 1.0 };
    let tol = Tolerance {
        abs: 0.0,
        rel: inner_rel(cfg),
    };
    let lower = tanh_sinh_panels(&mut f, &[0.0, split], tol, cfg.max_nodes)?;
    let upper = exp_sinh(&mut f, split, split, tol, cfg.max_nodes)?;
    let q = lower.add(upper);
    err_acc += q.error + density_err.min(1.0) * q.value;
    Ok(EvalResult {
        value: q.value,
        abs_error_estimate: err_acc,
        route: Route::PollardIntegral,
    })
}

/// s^{α−1}/(λ + s^α), the Laplace transform of x ↦ E_α(−λx^α).
pub fn ml_laplace_closed(alpha: f64, lambda: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !(s > 0.0) || !s.is_finite() {
        return domain(format!("s must be positive, got {s}"));
    }
    Ok(s.powf(alpha - 1.0) / (lambda + s.powf(alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // 50-digit mpmath references.
    const E_HALF_M1: f64 = 0.427_583_576_155_807_0;
    const E_HALF_M2: f64 = 0.255_395_676_310_505_74;
    const E_03_AT_2: f64 = 0.403_681_219_087_893_08; // E_0.3(−2^0.3)

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn series_examples() {
        let r = ml_series(MLIndex::one(1.0).unwrap(), -1.0, 1e-16).unwrap();
        assert_relative_eq!(r.value, (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(ml_series(MLIndex::one(0.7).unwrap(), 0.0, 1e-12).unwrap().value, 1.0);
        let r = ml_series(MLIndex::one(0.5).unwrap(), -1.0, 1e-16).unwrap();
        assert_relative_eq!(r.value, E_HALF_M1, max_relative = 1e-14);
        assert!(r.abs_error_estimate < 1e-13);
    }

    #[test]
    fn two_parameter_series() {
        // E_{1,2}(x) = (e^x − 1)/x
        let r = ml_series(MLIndex::new(1.0, 2.0).unwrap(), 0.7, 1e-16).unwrap();
        assert_relative_eq!(r.value, 0.7f64.exp_m1() / 0.7, max_relative = 1e-14);
        // E_{2,1}(−x²) = cos x
        let r = ml_series(MLIndex::new(2.0, 1.0).unwrap(), -1.44, 1e-16).unwrap();
        assert_relative_eq!(r.value, 1.2f64.cos(), max_relative = 1e-13);
    }

    #[test]
    fn series_reports_cancellation() {
        let e = ml_series(MLIndex::one(0.3).unwrap(), -5.0, 1e-16).unwrap_err();
        assert!(matches!(e, Error::NonConvergent(_)));
        let e = ml_series(MLIndex::one(0.0).unwrap(), -1.0, 1e-16).unwrap_err();
        assert!(matches!(e, Error::NonConvergent(_)));
        assert!(ml_series(MLIndex { alpha: 0.5, beta: 0.0 }, 1.0, 1e-10)
            .unwrap_err()
            .is_domain());
    }

    #[test]
    fn ml_neg_examples() {
        assert_relative_eq!(
            ml_neg(1.0, 1.0, 1.0, &cfg()).unwrap().value,
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        for &a in &[0.0, 0.3, 0.9, 1.0] {
            assert_eq!(ml_neg(a, 1.0, 0.0, &cfg()).unwrap().value, 1.0);
        }
        assert_relative_eq!(
            ml_neg(0.5, 1.0, 4.0, &cfg()).unwrap().value,
            E_HALF_M2,
            max_relative = 1e-12
        );
        assert_relative_eq!(ml_neg(0.0, 2.0, 1.5, &cfg()).unwrap().value, 0.25, max_relative = 1e-15);
    }

    #[test]
    fn routes_agree() {
        for route in [
            Route::Series,
            Route::SpectralIntegral,
            Route::PollardIntegral,
            Route::InverseLaplace,
        ] {
            let r = ml_neg_via(0.5, 1.0, 4.0, route, &cfg()).unwrap();
            assert!(
                (r.value - E_HALF_M2).abs() < 1e-9,
                "{route:?}: {} ({})",
                r.value,
                r.abs_error_estimate
            );
        }
        let s = ml_neg_via(0.3, 1.0, 2.0, Route::SpectralIntegral, &cfg()).unwrap();
        assert_relative_eq!(s.value, E_03_AT_2, max_relative = 1e-12);
    }

    #[test]
    fn large_argument_uses_integral() {
        let r = ml_neg(0.3, 1.0, 1e3, &cfg()).unwrap();
        assert_eq!(r.route, Route::SpectralIntegral);
        let r2 = ml_neg_via(0.3, 1.0, 1e3, Route::PollardIntegral, &cfg()).unwrap();
        assert!((r.value - r2.value).abs() <= 1e-9 * r.value);
    }

    #[test]
    fn laplace_closed() {
        assert_eq!(ml_laplace_closed(0.5, 1.0, 1.0).unwrap(), 0.5);
        assert_relative_eq!(ml_laplace_closed(1.0, 2.0, 3.0).unwrap(), 0.2, max_relative = 1e-15);
        assert_relative_eq!(
            ml_laplace_closed(0.3, 0.5, 2.0).unwrap(),
            0.355_586_9,
            max_relative = 1e-6
        );
        assert!(ml_laplace_closed(0.5, 1.0, 0.0).unwrap_err().is_domain());
    }
}
