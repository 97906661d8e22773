//! Infinitely divisible laws on ℝ₊: Lévy densities by the limit
//! μℓ(x) = lim n f(x|μ/n), scale mixtures and their Lévy densities, the
//! tilted relaxation function h_{α,θ}, and the stable integral
//! representation of E_α(−λx^α).

use num_complex::Complex64;

use crate::distributions::{gamma_pdf, GammaPrior};
use crate::error::{domain, Error, Result};
use crate::gamma::gamma;
use crate::quad::{half_line, half_line_scanned, QuadConfig, Tolerance};
use crate::special::{ml_neg, EvalResult, Route};
use crate::stable::{check_alpha, inner_rel, scaled_density, stable_pdf_scaled, tilt_constant};
use crate::transforms::{laplace_inverse, VerifyReport};

/// Residual bound for [`verify_prop_main`].
pub const PROP_MAIN_TOL: f64 = 1e-7;

/// A family f(·|μ) with Laplace transform e^{−μψ(s)}.
pub trait IdFamily: Sync {
    fn name(&self) -> String;
    /// f(x|μ).
    fn density(&self, x: f64, mu: f64) -> Result<f64>;
    /// ψ(s), with ψ(0) = 0.
    fn exponent(&self, s: f64) -> f64;
    /// ψ′(s), the Laplace transform of r(x) = x ℓ(x).
    fn exponent_derivative(&self, s: Complex64) -> Complex64;
    /// ℓ(x) in closed form, where known.
    fn levy_density(&self, x: f64) -> Option<f64>;
}

/// Gamma laws λ^μ x^{μ−1} e^{−λx}/Γ(μ): ψ(s) = ln(1 + s/λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFamily {
    pub lambda: f64,
}

impl IdFamily for GammaFamily {
    fn name(&self) -> String {
        format!("gamma(lambda={})", self.lambda)
    }

    fn density(&self, x: f64, mu: f64) -> Result<f64> {
        gamma_pdf(GammaPrior::new(mu, self.lambda)?, x)
    }

    fn exponent(&self, s: f64) -> f64 {
        (s / self.lambda).ln_1p()
    }

    fn exponent_derivative(&self, s: Complex64) -> Complex64 {
        1.0 / (self.lambda + s)
    }

    fn levy_density(&self, x: f64) -> Option<f64> {
        Some(levy_gamma(self.lambda, x))
    }
}

/// One-sided stable laws f_α(·|μ): ψ(s) = s^α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableFamily {
    pub alpha: f64,
    pub cfg: QuadConfig,
}

impl IdFamily for StableFamily {
    fn name(&self) -> String {
        format!("stable(alpha={})", self.alpha)
    }

    fn density(&self, x: f64, mu: f64) -> Result<f64> {
        Ok(stable_pdf_scaled(self.alpha, x, mu, &self.cfg)?.value)
    }

    fn exponent(&self, s: f64) -> f64 {
        s.powf(self.alpha)
    }

    fn exponent_derivative(&self, s: Complex64) -> Complex64 {
        self.alpha * s.powf(self.alpha - 1.0)
    }

    fn levy_density(&self, x: f64) -> Option<f64> {
        Some(self.alpha * x.powf(-self.alpha - 1.0) / gamma(1.0 - self.alpha))
    }
}

/// x^{−1} e^{−λx}, the Lévy density of the gamma family. It is an infinite
/// measure and never a prior.
pub fn levy_gamma(lambda: f64, x: f64) -> f64 {
    (-lambda * x).exp() / x
}

/// The Lévy density ℓ with its companion r(x) = x ℓ(x).
pub struct LevyDensities<'a> {
    ell: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
}

impl<'a> LevyDensities<'a> {
    pub fn new(ell: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        LevyDensities { ell: Box::new(ell) }
    }

    pub fn ell(&self, x: f64) -> f64 {
        (self.ell)(x)
    }

    pub fn r(&self, x: f64) -> f64 {
        x * self.ell(x)
    }
}

/// 2^k for k = 4..=12.
pub fn default_schedule() -> Vec<usize> {
    (4..=12).map(|k| 1usize << k).collect()
}

/// μℓ(x) from n f(x|μ/n) along `schedule`, Neville-extrapolated to 1/n = 0
/// with a quadratic in 1/n. The error estimate is the change between the
/// last two extrapolants.
pub fn levy_limit_extract(fam: &dyn IdFamily, x: f64, mu: f64, schedule: &[usize]) -> Result<EvalResult> {
    if !(x > 0.0) || !(mu > 0.0) || !x.is_finite() || !mu.is_finite() {
        return domain(format!("need x > 0 and mu > 0, got x = {x}, mu = {mu}"));
    }
    if schedule.len() < 4 || schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] == 0 {
        return domain("schedule must hold at least four increasing positive counts");
    }
    const ORDER: usize = 2;
    let h: Vec<f64> = schedule.iter().map(|&n| 1.0 / n as f64).collect();
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(h.len());
    for (i, &n) in schedule.iter().enumerate() {
        let nf = n as f64;
        let mut row = vec![nf * fam.density(x, mu / nf)?];
        for j in 1..=ORDER.min(i) {
            let (hi, hj) = (h[i], h[i - j]);
            let v = (hj * row[j - 1] - hi * table[i - 1][j - 1]) / (hj - hi);
            row.push(v);
        }
        table.push(row);
    }
    let last = table.len() - 1;
    let value = table[last][ORDER];
    let err = (value - table[last - 1][ORDER]).abs();
    let prev_err = (table[last - 1][ORDER] - table[last - 2][ORDER]).abs();
    if !value.is_finite() || (err > prev_err && err > 1e-8 * value.abs()) {
        return Err(Error::NonConvergent(format!(
            "extrapolants diverge at x = {x}: last changes {prev_err:e}, {err:e}"
        )));
    }
    Ok(EvalResult {
        value,
        abs_error_estimate: err,
        route: Route::Extrapolation,
    })
}

/// μℓ(x) by inverting μψ′(s) (the transform of μ x ℓ(x)) and dividing by x.
pub fn levy_by_inversion(fam: &dyn IdFamily, x: f64, mu: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if !(x > 0.0) || !(mu > 0.0) {
        return domain(format!("need x > 0 and mu > 0, got x = {x}, mu = {mu}"));
    }
    let r = laplace_inverse(|s| mu * fam.exponent_derivative(s), x, cfg)?;
    Ok(EvalResult {
        value: r.value / x,
        abs_error_estimate: r.abs_error_estimate / x,
        route: Route::InverseLaplace,
    })
}

fn quad_tol(cfg: &QuadConfig) -> Tolerance {
    Tolerance {
        abs: cfg.tol,
        rel: inner_rel(cfg),
    }
}

/// ∫_0^∞ h(y) dy where h may fail; the first failure wins.
fn integrate_scanned<H>(mut h: H, hints: &[f64], cfg: &QuadConfig) -> Result<EvalResult>
where
    H: FnMut(f64) -> Result<f64>,
{
    let mut failure = None;
    let q = half_line_scanned(
        |y| match h(y) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        hints,
        quad_tol(cfg),
        cfg.max_nodes,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(EvalResult {
        value: q.value,
        abs_error_estimate: q.error,
        route: Route::Quadrature,
    })
}

/// m(x|μ) = ∫ f(x|y) g(y|μ) dy with g from the prior family.
pub fn mixture_marginal<C>(
    conditional: C,
    prior: &dyn IdFamily,
    mu: f64,
    x: f64,
    cfg: &QuadConfig,
) -> Result<EvalResult>
where
    C: Fn(f64, f64) -> Result<f64>,
{
    cfg.validate()?;
    if !(mu > 0.0) || !(x > 0.0) {
        return domain(format!("need mu > 0 and x > 0, got mu = {mu}, x = {x}"));
    }
    integrate_scanned(
        |y| {
            let g = prior.density(y, mu)?;
            if g == 0.0 || !g.is_finite() {
                return Ok(if g.is_finite() { 0.0 } else { f64::NAN });
            }
            Ok(conditional(x, y)? * g)
        },
        &[mu, 1.0, x],
        cfg,
    )
}

/// ξ(x) = ∫ f(x|y) ℓ(y) dy, the Lévy density of a scale mixture whose prior
/// has Lévy density ℓ.
pub fn mixture_levy<C, L>(conditional: C, prior_levy: L, x: f64, cfg: &QuadConfig) -> Result<EvalResult>
where
    C: Fn(f64, f64) -> Result<f64>,
    L: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("x must be positive, got {x}"));
    }
    integrate_scanned(
        |y| {
            let l = prior_levy(y);
            if l == 0.0 {
                return Ok(0.0);
            }
            Ok(conditional(x, y)? * l)
        },
        &[1.0, x],
        cfg,
    )
}

/// ξ(x) for stable conditionals f_α(x|y) under the gamma Lévy density
/// y^{−1}e^{−λy}. With u = y x^{−α} the integral is x^{−1} ∫ g(u) u^{−1} e^{−λx^α u} du.
pub fn stable_gamma_levy(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    if !(lambda > 0.0) || !(x > 0.0) {
        return domain(format!("need lambda > 0 and x > 0, got {lambda}, {x}"));
    }
    let r = tilted_stable_transform(alpha, 0.0, lambda * x.powf(alpha), cfg)?;
    Ok(EvalResult {
        value: r.value / x,
        abs_error_estimate: r.abs_error_estimate / x,
        route: Route::Quadrature,
    })
}

/// ∫_0^∞ u^{θ/α−1} g(u) e^{−zu} du, g(u) = x f_α(x|1) at u = x^{−α}.
fn tilted_stable_transform(alpha: f64, theta: f64, z: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    let power = theta / alpha - 1.0;
    let mut failure = None;
    let f = |u: f64| {
        let w = (-z * u).exp();
        if w == 0.0 {
            return 0.0;
        }
        match scaled_density(alpha, u, cfg) {
            Ok(g) => g.value * w * u.powf(power),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let split = if z > 1.0 { 1.0 / z } else { 1.0 };
    let q = half_line(f, split, quad_tol(cfg), cfg.max_nodes);
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(EvalResult {
        value: q.value,
        abs_error_estimate: q.error,
        route: Route::Quadrature,
    })
}

/// h_{α,θ}(x|λ) = (x/α) ∫ f_{α,θ}(x|t) t^{−1} e^{−λt} dt; h_{α,0}(x|λ) = E_α(−λx^α).
pub fn gen_ml_function_h(alpha: f64, theta: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    cfg.validate()?;
    if !(theta > -alpha) || !theta.is_finite() {
        return domain(format!("theta must exceed -alpha, got {theta}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("x must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    let c = tilt_constant(alpha, theta) / alpha;
    let r = tilted_stable_transform(alpha, theta, lambda * x.powf(alpha), cfg)?;
    Ok(EvalResult {
        value: c * r.value,
        abs_error_estimate: c * r.abs_error_estimate,
        route: Route::Quadrature,
    })
}

/// x ∫ f_α(x|t) t^{−1} e^{−λt} dt, which should equal α E_α(−λx^α).
pub fn prop_main_integral(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    if !(lambda > 0.0) || !(x >= 0.0) {
        return domain(format!("need lambda > 0 and x >= 0, got {lambda}, {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(alpha, Route::ClosedForm));
    }
    tilted_stable_transform(alpha, 0.0, lambda * x.powf(alpha), cfg)
}

/// Checks α E_α(−λx^α) = x ∫ f_α(x|t) t^{−1} e^{−λt} dt on `x_grid`.
pub fn verify_prop_main(alpha: f64, lambda: f64, x_grid: &[f64], cfg: &QuadConfig) -> Result<VerifyReport> {
    check_alpha(alpha)?;
    cfg.validate()?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let pairs: Vec<_> = x_grid
        .iter()
        .map(|&x| {
            let r = prop_main_integral(alpha, lambda, x, cfg)
                .and_then(|a| Ok((a.value, alpha * ml_neg(alpha, lambda, x, cfg)?.value)));
            (x, r)
        })
        .collect();
    Ok(VerifyReport::from_pairs(
        pairs,
        PROP_MAIN_TOL,
        "x * integral of f_alpha(x|t) t^-1 e^(-lambda t) dt",
        "alpha * E_alpha(-lambda x^alpha)",
    ))
}

/// Stable conditional f_α(x|y) for use with the mixture operators.
pub fn stable_conditional(alpha: f64, cfg: QuadConfig) -> impl Fn(f64, f64) -> Result<f64> {
    move |x, y| Ok(stable_pdf_scaled(alpha, x, y, &cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn gamma_extraction() {
        let fam = GammaFamily { lambda: 1.0 };
        let r = levy_limit_extract(&fam, 1.0, 1.0, &default_schedule()).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-9, "{r:?}");
        assert!(r.abs_error_estimate < 1e-5);
        let r = levy_limit_extract(&fam, 2.0, 3.0, &default_schedule()).unwrap();
        assert_relative_eq!(r.value, 1.5 * (-2.0f64).exp(), max_relative = 1e-8);
    }

    #[test]
    fn stable_extraction_matches_inversion() {
        let fam = StableFamily { alpha: 0.5, cfg: cfg() };
        for &x in &[0.5, 1.0, 2.0] {
            let a = levy_limit_extract(&fam, x, 1.0, &default_schedule()).unwrap().value;
            let b = levy_by_inversion(&fam, x, 1.0, &cfg()).unwrap().value;
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
            assert_relative_eq!(a, fam.levy_density(x).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn levy_pair() {
        let l = LevyDensities::new(|x| levy_gamma(2.0, x));
        assert_relative_eq!(l.r(0.5), (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn thm3_stable_gamma() {
        // α E_α(−1)/1 at α = 1/2
        let r = stable_gamma_levy(0.5, 1.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.213_791_788_077_903_5, max_relative = 1e-11);
        let generic = mixture_levy(stable_conditional(0.5, cfg()), |y| levy_gamma(1.0, y), 1.0, &cfg()).unwrap();
        assert!(
            (generic.value - r.value).abs() < 1e-9,
            "{} vs {}",
            generic.value,
            r.value
        );
    }

    #[test]
    fn marginal_matches_pillai_derivative() {
        let prior = GammaFamily { lambda: 1.0 };
        let m = mixture_marginal(stable_conditional(0.5, cfg()), &prior, 1.0, 1.0, &cfg()).unwrap();
        let h = 1e-4;
        let d = (ml_neg(0.5, 1.0, 1.0 - h, &cfg()).unwrap().value - ml_neg(0.5, 1.0, 1.0 + h, &cfg()).unwrap().value)
            / (2.0 * h);
        assert!((m.value - d).abs() < 1e-5, "{} vs {d}", m.value);
    }

    #[test]
    fn h_function() {
        let r = gen_ml_function_h(0.5, 0.0, 1.0, 1.0, &cfg()).unwrap();
        assert_relative_eq!(r.value, 0.427_583_576_155_807_0, max_relative = 1e-11);
        let small = gen_ml_function_h(0.6, 1.0, 1.0, 1e-8, &cfg()).unwrap();
        assert!((small.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn prop_main_report() {
        let rep = verify_prop_main(0.5, 1.0, &[1e-4, 0.25, 1.0, 4.0], &cfg()).unwrap();
        assert!(rep.verdict, "{rep:?}");
        let rep = verify_prop_main(0.7, 2.0, &[1.0], &cfg()).unwrap();
        assert!(rep.max_residual <= 1e-7);
    }
}
