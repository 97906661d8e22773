//! Forward, Laplace–Stieltjes and inverse Laplace transforms, and the
//! two-path check of the Mittag-Leffler distribution function.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::quad::{half_line, QuadConfig, Tolerance};
use crate::special::{ml_neg, EvalResult, Route};
use crate::stable::{inner_rel, scaled_sf};

/// Residual bound used by [`verify_feller_diagram`].
pub const FELLER_TOL: f64 = 1e-7;

/// Outcome of checking an identity on a grid by two independent routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    /// (point, |route_a − route_b|); failed points carry an infinite residual.
    pub grid: Vec<(f64, f64)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub route_a: String,
    pub route_b: String,
    /// Points where a route returned an error, with its message.
    pub failures: Vec<(f64, String)>,
}

impl VerifyReport {
    /// Builds a report from per-point route values.
    pub fn from_pairs<I>(points: I, tolerance: f64, route_a: &str, route_b: &str) -> VerifyReport
    where
        I: IntoIterator<Item = (f64, Result<(f64, f64)>)>,
    {
        let mut grid = Vec::new();
        let mut failures = Vec::new();
        for (x, r) in points {
            match r {
                Ok((a, b)) => grid.push((x, (a - b).abs())),
                Err(e) => {
                    grid.push((x, f64::INFINITY));
                    failures.push((x, e.to_string()));
                }
            }
        }
        let max_residual = grid.iter().map(|p| p.1).fold(0.0, f64::max);
        VerifyReport {
            max_residual,
            tolerance,
            verdict: max_residual <= tolerance,
            route_a: route_a.to_string(),
            route_b: route_b.to_string(),
            grid,
            failures,
        }
    }
}

/// ∫_0^∞ e^{−st} f(t) dt, split at `split_scale/s`. At s = 0 this is the plain
/// integral, split at `split_scale`.
pub fn laplace_forward<F>(mut f: F, s: f64, cfg: &QuadConfig) -> Result<EvalResult>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("s must be finite and non-negative, got {s}"));
    }
    let split = if s > 0.0 { cfg.split_scale / s } else { cfg.split_scale };
    let tol = Tolerance {
        abs: cfg.tol,
        rel: inner_rel(cfg),
    };
    let q = half_line(
        |t| {
            let w = if s == 0.0 { 1.0 } else { (-s * t).exp() };
            if w == 0.0 {
                0.0
            } else {
                w * f(t)
            }
        },
        split,
        tol,
        cfg.max_nodes,
    )?;
    Ok(EvalResult {
        value: q.value,
        abs_error_estimate: q.error,
        route: Route::Quadrature,
    })
}

/// s ∫_0^∞ e^{−st} F(t) dt, the Laplace–Stieltjes transform of a distribution function.
pub fn laplace_stieltjes<F>(big_f: F, s: f64, cfg: &QuadConfig) -> Result<EvalResult>
where
    F: FnMut(f64) -> f64,
{
    if !(s > 0.0) {
        return domain(format!("s must be positive, got {s}"));
    }
    let r = laplace_forward(big_f, s, cfg)?;
    Ok(EvalResult {
        value: s * r.value,
        abs_error_estimate: s * r.abs_error_estimate,
        route: r.route,
    })
}

fn talbot_sum<F>(fhat: &mut F, t: f64, m: usize) -> (f64, f64)
where
    F: FnMut(Complex64) -> Complex64,
{
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let first = 0.5 * (fhat(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    let mut sum = first;
    let mut mag = first.abs();
    for k in 1..m {
        let th = k as f64 * std::f64::consts::PI / mf;
        let cot = th.cos() / th.sin();
        let s = Complex64::new(r * th * cot, r * th);
        let sigma = th + (th * cot - 1.0) * cot;
        let term = ((s * t).exp() * fhat(s) * Complex64::new(1.0, sigma)).re;
        sum += term;
        mag += term.abs();
    }
    (r / mf * sum, r / mf * mag)
}

/// Fixed-Talbot inversion with `m` nodes. The error estimate compares against
/// a 3m/4-node evaluation and adds the roundoff floor of the node sum.
pub(crate) fn talbot<F>(mut fhat: F, t: f64, m: usize) -> Result<EvalResult>
where
    F: FnMut(Complex64) -> Complex64,
{
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be positive, got {t}"));
    }
    if m < 4 {
        return domain(format!("Talbot needs at least 4 nodes, got {m}"));
    }
    let (v, mag) = talbot_sum(&mut fhat, t, m);
    let (coarse, _) = talbot_sum(&mut fhat, t, (3 * m) / 4);
    let err = (v - coarse).abs() + 8.0 * f64::EPSILON * mag;
    if !v.is_finite() || !err.is_finite() || err > 1e-3 * v.abs().max(1.0) {
        return Err(Error::InversionFailure(format!(
            "Talbot estimate {v:e} at t = {t} with error {err:e}"
        )));
    }
    Ok(EvalResult {
        value: v,
        abs_error_estimate: err,
        route: Route::InverseLaplace,
    })
}

/// f(t) from its Laplace transform by fixed-Talbot inversion (`cfg.talbot_nodes` nodes).
pub fn laplace_inverse<F>(fhat: F, t: f64, cfg: &QuadConfig) -> Result<EvalResult>
where
    F: FnMut(Complex64) -> Complex64,
{
    cfg.validate()?;
    talbot(fhat, t, cfg.talbot_nodes)
}

/// λ ∫_0^∞ e^{−λt} (1 − F_α(x t^{−1/α})) dt. With u = t x^{−α} this is
/// z ∫ e^{−zu} (1 − F_α(u^{−1/α})) du at z = λx^α.
pub fn feller_hard_route(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(lambda > 0.0) || !(x >= 0.0) {
        return domain(format!("need lambda > 0 and x >= 0, got lambda = {lambda}, x = {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    if alpha == 1.0 {
        // F_1(·|t) is a unit step at t
        return Ok(EvalResult::exact((-lambda * x).exp(), Route::ClosedForm));
    }
    let z = lambda * x.powf(alpha);
    let mut failure = None;
    let r = laplace_stieltjes(
        |u| match scaled_sf(alpha, u, cfg) {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        z,
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    r
}

/// Checks E_α(−λx^α) = λ ∫ e^{−λt} (1 − F_α(x t^{−1/α})) dt on `x_grid`.
pub fn verify_feller_diagram(alpha: f64, lambda: f64, x_grid: &[f64], cfg: &QuadConfig) -> Result<VerifyReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("need 0 < alpha <= 1 and lambda > 0, got {alpha}, {lambda}"));
    }
    cfg.validate()?;
    let pairs = x_grid.iter().map(|&x| {
        let r = feller_hard_route(alpha, lambda, x, cfg)
            .and_then(|hard| Ok((hard.value, ml_neg(alpha, lambda, x, cfg)?.value)));
        (x, r)
    });
    Ok(VerifyReport::from_pairs(
        pairs.collect::<Vec<_>>(),
        FELLER_TOL,
        "hard: lambda-transform of 1 - F_alpha(x t^(-1/alpha))",
        "easy: E_alpha(-lambda x^alpha)",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn forward_examples() {
        let r = laplace_forward(|t| (-t).exp(), 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-13);
        let r = laplace_forward(|t| (-t).exp(), 0.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-13);
        let r = laplace_stieltjes(|t| -(-t).exp_m1(), 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-13);
    }

    #[test]
    fn inverse_examples() {
        let r = laplace_inverse(|s| 1.0 / (1.0 + s), 1.0, &cfg()).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 5e-11, "{}", r.value);
        let r = laplace_inverse(|s: Complex64| (-s.sqrt()).exp(), 1.0, &cfg()).unwrap();
        assert!((r.value - 0.219_695_644_733_861_2).abs() < 1e-10, "{}", r.value);
        let r = laplace_inverse(|s: Complex64| s.powf(-0.5) / (1.0 + s.sqrt()), 1.0, &cfg()).unwrap();
        assert!((r.value - 0.427_583_576_155_807_0).abs() < 1e-10, "{}", r.value);
        assert!(r.abs_error_estimate < 1e-8);
    }

    #[test]
    fn feller_examples() {
        let rep = verify_feller_diagram(0.5, 1.0, &[0.0, 0.5, 1.0, 2.0], &cfg()).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert_eq!(rep.grid[0].1, 0.0);
        let rep = verify_feller_diagram(1.0, 1.0, &[1.0], &cfg()).unwrap();
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn report_records_failures() {
        let rep = VerifyReport::from_pairs(
            vec![(1.0, Ok((1.0, 1.0))), (2.0, Err(Error::NonConvergent("x".into())))],
            1e-7,
            "a",
            "b",
        );
        assert!(!rep.verdict);
        assert_eq!(rep.failures.len(), 1);
    }
}
