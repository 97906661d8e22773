//! One-sided stable laws with Laplace transform e^{-t s^α}, 0 < α < 1.
//!
//! Everything is computed through the scale-free pair
//!
//! ```text
//!   y = t·x^{-α},   g(y) = x·f_α(x | t),   z = y^{1/(1-α)}
//! ```
//!
//! so that `f_α(x|t) = g(y)/x`, `F_α(x|t) = F(y)` and the Pollard density is
//! `p_α(u) = g(u)/(α u)`. Two routes evaluate `g`:
//!
//! * the Kanter/Zolotarev integral `g = α/((1-α)π) · z ∫_0^π A(u) e^{-A(u) z} du`
//!   with `A(u) = (sin αu / sin u)^{1/(1-α)} · sin((1-α)u) / sin αu`,
//! * the convergent power series `g = (1/π) Σ_{k≥1} (-1)^{k+1} Γ(αk+1)/k! sin(παk) y^k`,
//!   used for small `z` where the integrand spikes near `u = π`.
//!
//! The integral is rescaled by `e^{-A(0) z}` so it stays representable until
//! the density itself underflows.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma, gamma_ratio, ln_gamma};
use crate::num::CompensatedSum;
use crate::quad::{tanh_sinh, QuadConfig, Quadrature, Tolerance};
use crate::special::{EvalResult, Route};

/// Series is used when `z = y^{1/(1-α)}` is at most this and `y` is small
/// enough for geometric convergence.
const SERIES_Z_MAX: f64 = 0.1;
const SERIES_Y_MAX: f64 = 0.6;
const LN_MIN_POSITIVE: f64 = -708.0;

/// Stability index, polynomial tilt and scale of a conditional stable density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltedStableSpec {
    pub alpha: f64,
    pub theta: f64,
    pub t: f64,
}

impl TiltedStableSpec {
    pub fn new(alpha: f64, theta: f64, t: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(theta > -alpha) || !theta.is_finite() {
            return domain(format!("theta must exceed -alpha = {}, got {theta}", -alpha));
        }
        check_positive("t", t)?;
        Ok(TiltedStableSpec { alpha, theta, t })
    }

    /// C_{α,θ}(t) = Γ(θ+1)/Γ(θ/α+1) · t^{θ/α}.
    pub fn norm_const(&self) -> f64 {
        tilt_constant(self.alpha, self.theta) * self.t.powf(self.theta / self.alpha)
    }
}

/// Γ(θ+1)/Γ(θ/α+1).
pub fn tilt_constant(alpha: f64, theta: f64) -> f64 {
    if theta == 0.0 {
        return 1.0;
    }
    gamma_ratio(theta + 1.0, theta / alpha + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StableRoute {
    ZolotarevIntegral,
    PowerSeries,
    ClosedFormHalf,
    /// Below the underflow knee near x = 0; the value is exactly 0.
    Underflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableEval {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub route: StableRoute,
}

impl StableEval {
    fn scaled(self, factor: f64) -> StableEval {
        StableEval {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return domain(format!("{name} must be positive and finite, got {v}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Kanter function and the Zolotarev integrals

/// ln A at `u` (from_right = false) or at `π - u` (from_right = true). The
/// right-hand form keeps full relative precision near u = π.
fn ln_kanter(alpha: f64, u: f64, from_right: bool) -> f64 {
    let (s1, sa, sb) = if from_right {
        let v = PI - u;
        (u.sin(), (alpha * v).sin(), ((1.0 - alpha) * v).sin())
    } else {
        (u.sin(), (alpha * u).sin(), ((1.0 - alpha) * u).sin())
    };
    (sa.ln() - s1.ln()) / (1.0 - alpha) + sb.ln() - sa.ln()
}

/// A(0+) = (1-α) α^{α/(1-α)}, the minimum of A on (0, π).
pub(crate) fn kanter_floor(alpha: f64) -> f64 {
    (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha))
}

/// ∫_0^π h(A(u)) du, split at π/2 with the right half in the reflected variable.
pub(crate) fn kanter_quad<H>(alpha: f64, h: H, tol: Tolerance, max_nodes: usize) -> Result<Quadrature>
where
    H: Fn(f64) -> f64,
{
    let eval = |ln_a: f64| {
        let a = ln_a.exp();
        if a.is_finite() {
            h(a)
        } else {
            h_limit(&h)
        }
    };
    let left = tanh_sinh(|u| eval(ln_kanter(alpha, u, false)), 0.0, FRAC_PI_2, tol, max_nodes)?;
    let right = tanh_sinh(|d| eval(ln_kanter(alpha, d, true)), 0.0, FRAC_PI_2, tol, max_nodes)?;
    Ok(left.add(right))
}

// A overflows only within ~1e-300 of u = π; kernels that blow up there are
// integrable, so the node contributes nothing.
fn h_limit<H: Fn(f64) -> f64>(h: &H) -> f64 {
    let v = h(f64::INFINITY);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn rel_only(cfg: &QuadConfig) -> Tolerance {
    Tolerance {
        abs: 1e-300,
        rel: inner_rel(cfg),
    }
}

pub(crate) fn inner_rel(cfg: &QuadConfig) -> f64 {
    (cfg.tol * 0.1).clamp(1e-14, 1e-9)
}

fn z_of(alpha: f64, y: f64) -> f64 {
    (y.ln() / (1.0 - alpha)).exp()
}

/// g(y) by the integral route.
fn scaled_density_integral(alpha: f64, y: f64, cfg: &QuadConfig) -> Result<StableEval> {
    let z = z_of(alpha, y);
    let a0 = kanter_floor(alpha);
    let ln_pref = (alpha / ((1.0 - alpha) * PI)).ln() + z.ln() - a0 * z;
    // Quick reject (z = ∞ gives NaN here and lands in the same branch): the integrand is at most A e^{-(A - a0) z} ≤ max(a0, 1/z)·e, integral ≤ π·that
    if !(ln_pref + (PI * a0.max(1.0 / z) * std::f64::consts::E).ln() >= LN_MIN_POSITIVE) {
        return Ok(StableEval {
            value: 0.0,
            abs_error_estimate: 0.0,
            route: StableRoute::Underflow,
        });
    }
    let q = kanter_quad(alpha, |a| a * (-(a - a0) * z).exp(), rel_only(cfg), cfg.max_nodes)?;
    let ln_val = ln_pref + q.value.ln();
    if ln_val < LN_MIN_POSITIVE {
        return Ok(StableEval {
            value: 0.0,
            abs_error_estimate: 0.0,
            route: StableRoute::Underflow,
        });
    }
    let value = ln_val.exp();
    Ok(StableEval {
        value,
        abs_error_estimate: value * (q.error / q.value + 1e-14),
        route: StableRoute::ZolotarevIntegral,
    })
}

/// (1/π) Σ_{k≥1} (-1)^{k+1} Γ(αk+shift)/k! sin(παk) y^k, with an error bound.
fn stable_series(alpha: f64, y: f64, shift: f64) -> Result<(f64, f64)> {
    let ln_y = y.ln();
    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let mut prev_env = f64::INFINITY;
    for k in 1..=1500usize {
        let kf = k as f64;
        let arg = alpha * kf + shift;
        let env = if k < 150 && arg < 150.0 {
            gamma(arg) / gamma(kf + 1.0) * y.powi(k as i32)
        } else {
            (ln_gamma(arg) - ln_gamma(kf + 1.0) + kf * ln_y).exp()
        };
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * env * (PI * alpha * kf).sin();
        sum.add(term);
        abs_sum += term.abs();
        let ratio = if env == 0.0 { 0.0 } else { env / prev_env };
        prev_env = env;
        let s = sum.value().abs();
        if k > 2 && ratio < 0.9 && env / (1.0 - ratio) <= 1e-17 * s {
            let value = sum.value() / PI;
            let err = (abs_sum * 8.0 * f64::EPSILON + env / (1.0 - ratio)) / PI;
            if err > 1e-11 * value.abs() {
                return Err(Error::NonConvergent(format!(
                    "stable series at y={y}: cancellation bound {err:e} vs value {value:e}"
                )));
            }
            return Ok((value, err));
        }
    }
    Err(Error::NonConvergent(format!(
        "stable series at y={y} exceeded term budget"
    )))
}

fn series_allowed(alpha: f64, y: f64) -> bool {
    y <= SERIES_Y_MAX && z_of(alpha, y) <= SERIES_Z_MAX
}

/// g(y) = x·f_α(x|t) at y = t·x^{-α}.
pub(crate) fn scaled_density(alpha: f64, y: f64, cfg: &QuadConfig) -> Result<StableEval> {
    if y == 0.0 {
        return Ok(StableEval {
            value: 0.0,
            abs_error_estimate: 0.0,
            route: StableRoute::PowerSeries,
        });
    }
    if y.is_infinite() {
        return Ok(StableEval {
            value: 0.0,
            abs_error_estimate: 0.0,
            route: StableRoute::Underflow,
        });
    }
    if series_allowed(alpha, y) {
        if let Ok((v, e)) = stable_series(alpha, y, 1.0) {
            return Ok(StableEval {
                value: v.max(0.0),
                abs_error_estimate: e,
                route: StableRoute::PowerSeries,
            });
        }
    }
    scaled_density_integral(alpha, y, cfg)
}

/// g(y) forced through one route.
pub(crate) fn scaled_density_via(alpha: f64, y: f64, route: StableRoute, cfg: &QuadConfig) -> Result<StableEval> {
    match route {
        StableRoute::ZolotarevIntegral => scaled_density_integral(alpha, y, cfg),
        StableRoute::PowerSeries => {
            let (v, e) = stable_series(alpha, y, 1.0)?;
            Ok(StableEval {
                value: v,
                abs_error_estimate: e,
                route,
            })
        }
        StableRoute::ClosedFormHalf => {
            if alpha != 0.5 {
                return domain("closed form exists only for alpha = 1/2");
            }
            // x f(x) = y e^{-y²/4} / (2√π)
            let value = y * (-0.25 * y * y).exp() / (2.0 * PI.sqrt());
            Ok(StableEval {
                value,
                abs_error_estimate: value * 4.0 * f64::EPSILON,
                route,
            })
        }
        StableRoute::Underflow => domain("underflow is not a selectable route"),
    }
}

/// F_α at y = t·x^{-α} (lower tail).
pub(crate) fn scaled_cdf(alpha: f64, y: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if y.is_infinite() {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    if y == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    if series_allowed(alpha, y) {
        if let Ok((sf, e)) = stable_series(alpha, y, 0.0) {
            return Ok(EvalResult {
                value: (1.0 - sf).clamp(0.0, 1.0),
                abs_error_estimate: e,
                route: Route::Series,
            });
        }
    }
    let z = z_of(alpha, y);
    let a0 = kanter_floor(alpha);
    if -a0 * z < LN_MIN_POSITIVE {
        return Ok(EvalResult::exact(0.0, Route::Quadrature));
    }
    let q = kanter_quad(alpha, |a| (-(a - a0) * z).exp(), rel_only(cfg), cfg.max_nodes)?;
    let scale = (-a0 * z).exp() / PI;
    let value = (q.value * scale).clamp(0.0, 1.0);
    Ok(EvalResult {
        value,
        abs_error_estimate: q.error * scale + value * 1e-14,
        route: Route::Quadrature,
    })
}

/// 1 − F_α at y = t·x^{-α} (upper tail), accurate when it is small.
pub(crate) fn scaled_sf(alpha: f64, y: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if y.is_infinite() {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    if y == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    if series_allowed(alpha, y) {
        if let Ok((v, e)) = stable_series(alpha, y, 0.0) {
            return Ok(EvalResult {
                value: v.clamp(0.0, 1.0),
                abs_error_estimate: e,
                route: Route::Series,
            });
        }
    }
    let z = z_of(alpha, y);
    if kanter_floor(alpha) * z > 40.0 {
        // lower tail is below 1e-17; the complement is exact in double
        let lower = scaled_cdf(alpha, y, cfg)?;
        return Ok(EvalResult {
            value: 1.0 - lower.value,
            ..lower
        });
    }
    let q = kanter_quad(alpha, |a| -(-a * z).exp_m1(), rel_only(cfg), cfg.max_nodes)?;
    let value = (q.value / PI).clamp(0.0, 1.0);
    Ok(EvalResult {
        value,
        abs_error_estimate: q.error / PI + value * 1e-14,
        route: Route::Quadrature,
    })
}

// ---------------------------------------------------------------------------
// Public evaluators

/// f_α(x), the density with Laplace transform e^{-s^α}.
pub fn stable_pdf(alpha: f64, x: f64, cfg: &QuadConfig) -> Result<StableEval> {
    stable_pdf_scaled(alpha, x, 1.0, cfg)
}

/// f_α(x) through an explicitly chosen route (for cross-checks).
pub fn stable_pdf_via(alpha: f64, x: f64, route: StableRoute, cfg: &QuadConfig) -> Result<StableEval> {
    check_alpha(alpha)?;
    check_positive("x", x)?;
    cfg.validate()?;
    Ok(scaled_density_via(alpha, x.powf(-alpha), route, cfg)?.scaled(1.0 / x))
}

/// f_α(x|t) = f_α(x t^{-1/α}) t^{-1/α}, Laplace transform e^{-t s^α}.
pub fn stable_pdf_scaled(alpha: f64, x: f64, t: f64, cfg: &QuadConfig) -> Result<StableEval> {
    check_alpha(alpha)?;
    check_positive("x", x)?;
    check_positive("t", t)?;
    cfg.validate()?;
    let y = t * x.powf(-alpha);
    Ok(scaled_density(alpha, y, cfg)?.scaled(1.0 / x))
}

/// F_α(x) = ∫_0^x f_α.
pub fn stable_cdf(alpha: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    stable_cdf_scaled(alpha, x, 1.0, cfg)
}

/// F_α(x|t) = F_α(x t^{-1/α}).
pub fn stable_cdf_scaled(alpha: f64, x: f64, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    check_positive("t", t)?;
    cfg.validate()?;
    if !(x >= 0.0) {
        return domain(format!("x must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    scaled_cdf(alpha, t * x.powf(-alpha), cfg)
}

/// 1 − F_α(x).
pub fn stable_sf(alpha: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    cfg.validate()?;
    if !(x >= 0.0) {
        return domain(format!("x must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    scaled_sf(alpha, x.powf(-alpha), cfg)
}

/// f_{α,θ}(x|t) = C_{α,θ}(t) x^{-θ} f_α(x|t).
pub fn tilted_pdf(spec: &TiltedStableSpec, x: f64, cfg: &QuadConfig) -> Result<StableEval> {
    let spec = TiltedStableSpec::new(spec.alpha, spec.theta, spec.t)?;
    let base = stable_pdf_scaled(spec.alpha, x, spec.t, cfg)?;
    if spec.theta == 0.0 {
        return Ok(base);
    }
    Ok(base.scaled(spec.norm_const() * x.powf(-spec.theta)))
}

// ---------------------------------------------------------------------------
// Sampling

/// ln S for one Kanter draw, S with Laplace transform e^{-s^α}.
pub(crate) fn kanter_ln_draw<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u = loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            break v * PI;
        }
    };
    let w = loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            break -v.ln();
        }
    };
    (alpha * u).sin().ln() - u.sin().ln() / alpha + (1.0 - alpha) / alpha * (((1.0 - alpha) * u).sin().ln() - w.ln())
}

/// `n` i.i.d. draws from f_α(·|t) (Kanter's construction), deterministic in `seed`.
pub fn stable_sample(alpha: f64, t: f64, rng_seed: u64, n: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    check_positive("t", t)?;
    if n == 0 {
        return domain("n must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let shift = t.ln() / alpha;
    Ok((0..n)
        .map(|_| (kanter_ln_draw(alpha, &mut rng) + shift).exp())
        .collect())
}
