//! Pollard's distribution P_α (Laplace–Stieltjes transform E_α(−x)), its
//! polynomially tilted family P_{α,θ}, Pillai's M_α(·|μ,λ) and the gamma prior.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma, gamma_p, ln_gamma};
use crate::quad::{half_line, tanh_sinh, QuadConfig, Tolerance};
use crate::special::{ml_neg, EvalResult, Route};
use crate::stable::{
    check_alpha, inner_rel, kanter_ln_draw, kanter_quad, scaled_cdf, scaled_density, scaled_sf, tilt_constant,
    StableEval, StableRoute,
};

/// Gamma law with density λ^μ t^{μ−1} e^{−λt} / Γ(μ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub mu: f64,
    pub lambda: f64,
}

impl GammaPrior {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() || !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("gamma prior needs mu > 0 and lambda > 0, got {mu}, {lambda}"));
        }
        Ok(GammaPrior { mu, lambda })
    }
}

/// Index pair of the generalized Mittag-Leffler law P_{α,θ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenMLSpec {
    pub alpha: f64,
    pub theta: f64,
}

impl GenMLSpec {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(theta > -alpha) || !theta.is_finite() {
            return domain(format!("theta must exceed -alpha = {}, got {theta}", -alpha));
        }
        Ok(GenMLSpec { alpha, theta })
    }

    /// Γ(θ+1)/Γ(θ/α+1).
    pub fn norm_const(&self) -> f64 {
        tilt_constant(self.alpha, self.theta)
    }

    /// κ = θ(1−α)/α, the gamma shift in the Kanter form of the CDF.
    fn kappa(&self) -> f64 {
        self.theta * (1.0 - self.alpha) / self.alpha
    }
}

fn route_of(s: StableEval) -> Route {
    match s.route {
        StableRoute::PowerSeries | StableRoute::ClosedFormHalf => Route::Series,
        StableRoute::ZolotarevIntegral | StableRoute::Underflow => Route::Quadrature,
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || t.is_nan() {
        return domain(format!("t must be non-negative, got {t}"));
    }
    Ok(())
}

/// p_α(t) = (1/α) f_α(t^{−1/α}) t^{−1−1/α}; p_α(0+) = 1/Γ(1−α).
pub fn pollard_pdf(alpha: f64, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    check_t(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(EvalResult::exact(1.0 / gamma(1.0 - alpha), Route::ClosedForm));
    }
    if t.is_infinite() {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    let g = scaled_density(alpha, t, cfg)?;
    let scale = 1.0 / (alpha * t);
    Ok(EvalResult {
        value: g.value * scale,
        abs_error_estimate: g.abs_error_estimate * scale,
        route: route_of(g),
    })
}

/// P_α(t) = 1 − F_α(t^{−1/α}).
pub fn pollard_cdf(alpha: f64, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    check_t(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    scaled_sf(alpha, t, cfg)
}

/// C·t^{θ/α}·p_α(t) with C = Γ(θ+1)/Γ(θ/α+1).
pub fn gen_ml_pdf(spec: GenMLSpec, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    let spec = GenMLSpec::new(spec.alpha, spec.theta)?;
    let p = pollard_pdf(spec.alpha, t, cfg)?;
    if spec.theta == 0.0 {
        return Ok(p);
    }
    if t == 0.0 {
        let v = if spec.theta > 0.0 { 0.0 } else { f64::INFINITY };
        return Ok(EvalResult::exact(v, Route::ClosedForm));
    }
    let w = spec.norm_const() * t.powf(spec.theta / spec.alpha);
    Ok(EvalResult {
        value: p.value * w,
        abs_error_estimate: p.abs_error_estimate * w,
        route: p.route,
    })
}

/// P_{α,θ}(t) = (C Γ(1+κ)/π) ∫_0^π A(u)^{−κ} P(1+κ, A(u) t^{1/(1−α)}) du,
/// κ = θ(1−α)/α, P the regularized lower incomplete gamma.
pub fn gen_ml_cdf(spec: GenMLSpec, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    let spec = GenMLSpec::new(spec.alpha, spec.theta)?;
    check_t(t)?;
    cfg.validate()?;
    if t == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    if t.is_infinite() {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    if spec.theta == 0.0 {
        return pollard_cdf(spec.alpha, t, cfg);
    }
    let kappa = spec.kappa();
    let a = 1.0 + kappa;
    let w = (t.ln() / (1.0 - spec.alpha)).exp();
    let c = spec.norm_const() * (ln_gamma(a)).exp() / std::f64::consts::PI;
    let tol = Tolerance {
        abs: 1e-17 / c,
        rel: inner_rel(cfg),
    };
    let q = kanter_quad(
        spec.alpha,
        |big_a| {
            let p = gamma_p(a, big_a * w);
            if p == 0.0 {
                0.0
            } else {
                (-kappa * big_a.ln()).exp() * p
            }
        },
        tol,
        cfg.max_nodes,
    )?;
    let value = (c * q.value).clamp(0.0, 1.0);
    Ok(EvalResult {
        value,
        abs_error_estimate: c * q.error + 1e-14 * value,
        route: Route::Quadrature,
    })
}

/// P_{α,θ}(t) as ∫_0^t of [`gen_ml_pdf`]; an independent route for [`gen_ml_cdf`].
pub fn gen_ml_cdf_by_density(spec: GenMLSpec, t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    let spec = GenMLSpec::new(spec.alpha, spec.theta)?;
    check_t(t)?;
    if t == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    let mut failure = None;
    let f = |u: f64| match gen_ml_pdf(spec, u, cfg) {
        Ok(r) => r.value,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let tol = Tolerance {
        abs: cfg.tol,
        rel: inner_rel(cfg),
    };
    let q = if t.is_infinite() {
        half_line(f, 1.0, tol, cfg.max_nodes)
    } else {
        tanh_sinh(f, 0.0, t, tol, cfg.max_nodes)
    };
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

/// M_α(x|λ) = 1 − E_α(−λx^α), the exponential-prior mixture of stable laws.
pub fn pillai_cdf(alpha: f64, lambda: f64, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    let e = ml_neg(alpha, lambda, x, cfg)?;
    Ok(EvalResult {
        value: 1.0 - e.value,
        ..e
    })
}

/// M_α(x|μ,λ) = ∫ F_α(x|t) G(dt|μ,λ), computed by quadrature over the prior.
pub fn mixture_cdf(alpha: f64, prior: GammaPrior, x: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    check_alpha(alpha)?;
    let prior = GammaPrior::new(prior.mu, prior.lambda)?;
    cfg.validate()?;
    if !(x >= 0.0) {
        return domain(format!("x must be non-negative, got {x}"));
    }
    if x == 0.0 {
        return Ok(EvalResult::exact(0.0, Route::ClosedForm));
    }
    if x.is_infinite() {
        return Ok(EvalResult::exact(1.0, Route::ClosedForm));
    }
    // u = t x^{−α}: F_α(x|t) = F(u) and the prior becomes Gamma(μ, λ x^α).
    let inner = GammaPrior::new(prior.mu, prior.lambda * x.powf(alpha))?;
    let mut failure = None;
    let f = |u: f64| {
        let g = gamma_pdf(inner, u).unwrap_or(0.0);
        if g == 0.0 {
            return 0.0;
        }
        match scaled_cdf(alpha, u, cfg) {
            Ok(r) => r.value * g,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let split = inner.mu.max(1.0) / inner.lambda;
    let tol = Tolerance {
        abs: cfg.tol,
        rel: inner_rel(cfg),
    };
    let q = half_line(f, split, tol, cfg.max_nodes);
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(EvalResult {
        value: q.value.clamp(0.0, 1.0),
        abs_error_estimate: q.error,
        route: Route::Quadrature,
    })
}

/// λ^μ t^{μ−1} e^{−λt} / Γ(μ).
pub fn gamma_pdf(prior: GammaPrior, t: f64) -> Result<f64> {
    let GammaPrior { mu, lambda } = GammaPrior::new(prior.mu, prior.lambda)?;
    if !(t >= 0.0) || t.is_nan() {
        return domain(format!("t must be non-negative, got {t}"));
    }
    if t == 0.0 {
        return Ok(match mu {
            m if m < 1.0 => f64::INFINITY,
            1.0 => lambda,
            _ => 0.0,
        });
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok((mu * lambda.ln() + (mu - 1.0) * t.ln() - lambda * t - ln_gamma(mu)).exp())
}

/// `n` draws from P_α, exactly, as S^{−α} with S a Kanter stable draw.
pub fn sample_pollard(alpha: f64, rng_seed: u64, n: usize) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if n == 0 {
        return domain("n must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok((0..n)
        .map(|_| (-alpha * kanter_ln_draw(alpha, &mut rng)).exp())
        .collect())
}

/// `n` draws from P_{α,θ}. θ = 0 is exact; otherwise each uniform is mapped
/// through the inverse of [`gen_ml_cdf`] to relative accuracy 1e-10.
pub fn sample_gen_ml(spec: GenMLSpec, rng_seed: u64, n: usize, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let spec = GenMLSpec::new(spec.alpha, spec.theta)?;
    cfg.validate()?;
    if spec.theta == 0.0 {
        return sample_pollard(spec.alpha, rng_seed, n);
    }
    if n == 0 {
        return domain("n must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..n)
        .map(|_| {
            let u = loop {
                let v: f64 = rng.random();
                if v > 0.0 {
                    break v;
                }
            };
            gen_ml_quantile(spec, u, cfg)
        })
        .collect()
}

/// Smallest t with P_{α,θ}(t) = u, by bracketing then Newton steps
/// safeguarded with bisection.
pub fn gen_ml_quantile(spec: GenMLSpec, u: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("probability must lie in (0, 1), got {u}"));
    }
    let cdf = |t: f64| gen_ml_cdf(spec, t, cfg).map(|r| r.value - u);
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut f_lo = cdf(lo)?;
    let mut f_hi = f_lo;
    let mut steps = 0;
    while f_lo > 0.0 {
        hi = lo;
        f_hi = f_lo;
        lo *= 0.25;
        f_lo = cdf(lo)?;
        steps += 1;
        if steps > 600 {
            return Err(Error::RootFindFailure(format!("no lower bracket for u = {u}")));
        }
    }
    while f_hi < 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 4.0;
        f_hi = cdf(hi)?;
        steps += 1;
        if steps > 600 {
            return Err(Error::RootFindFailure(format!("no upper bracket for u = {u}")));
        }
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut t = if f_hi == 0.0 { hi } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let f = cdf(t)?;
        if f == 0.0 {
            return Ok(t);
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = gen_ml_pdf(spec, t, cfg)?.value;
        let newton = t - f / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() <= 1e-10 * t || hi - lo <= 1e-10 * lo {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::RootFindFailure(format!(
        "quantile at u = {u} did not settle within [{lo}, {hi}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    // mpmath references: p_{1/2}(t) = e^{−t²/4}/√π, P_{1/2}(t) = erf(t/2).
    const POLLARD_HALF_1: f64 = 0.439_391_289_467_722_4;
    const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;
    const ERF_HALF: f64 = 0.520_499_877_813_046_5;

    #[test]
    fn pollard_examples() {
        assert_relative_eq!(
            pollard_pdf(0.5, 1.0, &cfg()).unwrap().value,
            POLLARD_HALF_1,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            pollard_pdf(0.5, 0.0, &cfg()).unwrap().value,
            INV_SQRT_PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            pollard_pdf(0.5, 1e-9, &cfg()).unwrap().value,
            INV_SQRT_PI,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            pollard_cdf(0.5, 1.0, &cfg()).unwrap().value,
            ERF_HALF,
            max_relative = 1e-12
        );
        assert_eq!(pollard_cdf(0.3, 0.0, &cfg()).unwrap().value, 0.0);
        assert!(pollard_cdf(0.3, 1e3, &cfg()).unwrap().value > 1.0 - 1e-12);
    }

    #[test]
    fn gen_ml_examples() {
        let spec = GenMLSpec::new(0.5, 1.0).unwrap();
        assert_relative_eq!(
            gen_ml_pdf(spec, 1.0, &cfg()).unwrap().value,
            0.219_695_644_733_861_2,
            max_relative = 1e-12
        );
        let zero = GenMLSpec::new(0.5, 0.0).unwrap();
        assert_relative_eq!(
            gen_ml_cdf(zero, 1.0, &cfg()).unwrap().value,
            ERF_HALF,
            max_relative = 1e-12
        );
        assert!((gen_ml_cdf(spec, 60.0, &cfg()).unwrap().value - 1.0).abs() < 1e-8);
        assert!(GenMLSpec::new(0.5, -0.5).is_err());
    }

    #[test]
    fn gen_ml_cdf_routes_agree() {
        for &(alpha, theta) in &[(0.5, 1.0), (0.4, -0.2), (0.6, -0.3), (0.6, 2.5), (0.3, 0.7)] {
            let spec = GenMLSpec::new(alpha, theta).unwrap();
            for &t in &[0.05, 0.5, 1.0, 2.0] {
                let a = gen_ml_cdf(spec, t, &cfg()).unwrap().value;
                let b = gen_ml_cdf_by_density(spec, t, &cfg()).unwrap().value;
                assert!((a - b).abs() < 1e-10, "alpha={alpha} theta={theta} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn pillai_examples() {
        assert_eq!(pillai_cdf(0.5, 1.0, 0.0, &cfg()).unwrap().value, 0.0);
        assert_relative_eq!(
            pillai_cdf(0.5, 1.0, 1.0, &cfg()).unwrap().value,
            0.572_416_423_844_193,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            pillai_cdf(1.0, 1.0, 1.0, &cfg()).unwrap().value,
            0.632_120_558_828_557_7,
            max_relative = 1e-15
        );
    }

    #[test]
    fn mixture_with_exponential_prior_is_pillai() {
        for &alpha in &[0.3, 0.5, 0.8] {
            for &x in &[0.1, 1.0, 7.0] {
                let m = mixture_cdf(alpha, GammaPrior::new(1.0, 2.0).unwrap(), x, &cfg())
                    .unwrap()
                    .value;
                let p = pillai_cdf(alpha, 2.0, x, &cfg()).unwrap().value;
                assert!((m - p).abs() < 1e-10, "alpha={alpha} x={x}: {m} vs {p}");
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let exp1 = GammaPrior::new(1.0, 1.0).unwrap();
        assert_relative_eq!(
            gamma_pdf(exp1, 0.5).unwrap(),
            0.606_530_659_712_633_4,
            max_relative = 1e-15
        );
        let g2 = GammaPrior::new(2.0, 1.0).unwrap();
        assert_relative_eq!(
            gamma_pdf(g2, 1.0).unwrap(),
            0.367_879_441_171_442_3,
            max_relative = 1e-14
        );
        assert!(GammaPrior::new(0.0, 1.0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        let spec = GenMLSpec::new(0.5, 1.0).unwrap();
        for &u in &[1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-9] {
            let t = gen_ml_quantile(spec, u, &cfg()).unwrap();
            let back = gen_ml_cdf(spec, t, &cfg()).unwrap().value;
            assert!((back - u).abs() < 1e-9, "u={u} t={t} back={back}");
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        assert_eq!(sample_pollard(0.5, 7, 5).unwrap(), sample_pollard(0.5, 7, 5).unwrap());
        let spec = GenMLSpec::new(0.5, 1.0).unwrap();
        let a = sample_gen_ml(spec, 3, 4, &cfg()).unwrap();
        assert_eq!(a, sample_gen_ml(spec, 3, 4, &cfg()).unwrap());
        assert!(a.iter().all(|t| *t > 0.0));
    }
}
