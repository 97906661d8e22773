//! Verification suites: each identity is checked point by point by two
//! independent routes and reported as one [`CheckRecord`] per check.
//!
//! [`jobs`] expands a target into independent closures so callers can run
//! them serially or in parallel; records keep job order either way.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::cm::{
    cm_bernstein_check, cm_closure_suite, cm_difference_check, cm_difference_check_grid, default_id_cases,
    default_inner_functions, default_seeds, CMReport, CmGrid, CmVerdict,
};
use crate::distributions::{
    gen_ml_cdf, mixture_cdf, pillai_cdf, pollard_cdf, pollard_pdf, sample_gen_ml, sample_pollard, GammaPrior, GenMLSpec,
};
use crate::error::{domain, Error, Result};
use crate::id::{
    default_schedule, gen_ml_function_h, levy_by_inversion, levy_gamma, levy_limit_extract, mixture_levy,
    mixture_marginal, prop_main_integral, stable_conditional, GammaFamily, StableFamily,
};
use crate::ks::{ks_statistic, ks_threshold};
use crate::num::{linspace, logspace};
use crate::quad::QuadConfig;
use crate::special::{ml_laplace_closed, ml_neg};
use crate::stable::{stable_cdf, stable_sample};
use crate::transforms::{feller_hard_route, laplace_forward, laplace_stieltjes};

/// One check at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub identity: String,
    pub params: BTreeMap<String, f64>,
    pub point: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    /// Set when a route failed numerically; such records never pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    fn new(identity: &str, params: &[(&str, f64)], point: f64, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            identity: identity.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            point,
            residual,
            tolerance,
            verdict: residual <= tolerance,
            error: None,
        }
    }

    fn failed(identity: &str, params: &[(&str, f64)], point: f64, tolerance: f64, e: Error) -> Self {
        CheckRecord {
            verdict: false,
            error: Some(e.to_string()),
            ..CheckRecord::new(identity, params, point, f64::INFINITY, tolerance)
        }
    }

    fn from_result(identity: &str, params: &[(&str, f64)], point: f64, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(res) => CheckRecord::new(identity, params, point, res, tolerance),
            Err(e) => CheckRecord::failed(identity, params, point, tolerance, e),
        }
    }

    fn from_cm(identity: &str, params: &[(&str, f64)], report: &CMReport, expected: CmVerdict) -> Self {
        let residual = if report.min_signed_value.is_nan() {
            f64::INFINITY
        } else {
            (-report.min_signed_value).max(0.0)
        };
        CheckRecord {
            verdict: report.verdict == expected,
            ..CheckRecord::new(identity, params, report.worst_point.0, residual, report.tolerance)
        }
    }
}

pub struct Job {
    pub target: &'static str,
    run: Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>,
}

impl std::fmt::Debug for Job {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Job")
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

impl Job {
    fn new(target: &'static str, run: impl Fn() -> Vec<CheckRecord> + Send + Sync + 'static) -> Self {
        Job {
            target,
            run: Box::new(run),
        }
    }

    pub fn run(&self) -> Vec<CheckRecord> {
        (self.run)()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Desk-scale lattice for quick runs.
    Fast,
    /// The full lattices of the acceptance criteria.
    Full,
}

/// Overrides and scale for a suite run. `None` fields take the per-target
/// defaults for the chosen scale.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub scale: Scale,
    pub alphas: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub thetas: Option<Vec<f64>>,
    pub xs: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub seed: u64,
    pub cfg: QuadConfig,
}

impl SuiteConfig {
    pub fn new(scale: Scale) -> Self {
        SuiteConfig {
            scale,
            alphas: None,
            lambdas: None,
            thetas: None,
            xs: None,
            n: None,
            seed: 42,
            cfg: QuadConfig::default(),
        }
    }

    fn pick(&self, over: &Option<Vec<f64>>, fast: &[f64], full: &[f64]) -> Vec<f64> {
        over.clone().unwrap_or_else(|| match self.scale {
            Scale::Fast => fast.to_vec(),
            Scale::Full => full.to_vec(),
        })
    }

    fn pick_grid(&self, fast: Vec<f64>, full: Vec<f64>) -> Vec<f64> {
        self.xs.clone().unwrap_or(match self.scale {
            Scale::Fast => fast,
            Scale::Full => full,
        })
    }

    fn alphas(&self, fast: &[f64], full: &[f64]) -> Vec<f64> {
        self.pick(&self.alphas, fast, full)
    }

    fn lambdas(&self, fast: &[f64], full: &[f64]) -> Vec<f64> {
        self.pick(&self.lambdas, fast, full)
    }
}

/// Every target in the order `all` runs them.
pub const TARGETS: &[&str] = &[
    "prop1",
    "pollard",
    "feller",
    "marginal",
    "prop2",
    "cor1",
    "thm3",
    "cm-suite",
    "endpoints",
    "sampling",
];

pub const TOL_IDENTITY: f64 = 1e-7;
pub const TOL_PROP2: f64 = 1e-6;
pub const TOL_PROP2_COLLAPSE: f64 = 1e-9;
pub const TOL_LEVY: f64 = 1e-5;
pub const TOL_THM3: f64 = 1e-6;
pub const TOL_CM: f64 = 1e-6;
pub const TOL_ENDPOINT: f64 = 1e-12;

fn check_alphas(alphas: &[f64], lo_closed: bool, hi_closed: bool) -> Result<()> {
    for &a in alphas {
        let lo_ok = if lo_closed { a >= 0.0 } else { a > 0.0 };
        let hi_ok = if hi_closed { a <= 1.0 } else { a < 1.0 };
        if !(lo_ok && hi_ok) {
            return domain(format!("alpha = {a} is outside the supported range"));
        }
    }
    Ok(())
}

fn check_positive(name: &str, v: &[f64]) -> Result<()> {
    if let Some(bad) = v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return domain(format!("{name} must be positive, got {bad}"));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: &[f64]) -> Result<()> {
    if let Some(bad) = v.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
        return domain(format!("{name} must be non-negative, got {bad}"));
    }
    Ok(())
}

/// Jobs for `target` ("all" expands to every entry of [`TARGETS`]).
pub fn jobs(target: &str, sc: &SuiteConfig) -> Result<Vec<Job>> {
    sc.cfg.validate()?;
    match target {
        "all" => {
            let mut out = Vec::new();
            for t in TARGETS {
                out.extend(jobs(t, sc)?);
            }
            Ok(out)
        }
        "prop1" => prop1_jobs(sc),
        "pollard" => pollard_jobs(sc),
        "feller" => feller_jobs(sc),
        "marginal" => marginal_jobs(sc),
        "prop2" => prop2_jobs(sc),
        "cor1" => cor1_jobs(sc),
        "thm3" => thm3_jobs(sc),
        "cm-suite" => cm_jobs(sc),
        "endpoints" => endpoint_jobs(sc),
        "sampling" => sampling_jobs(sc),
        other => domain(format!("unknown verify target '{other}'")),
    }
}

/// Runs jobs in order on the current thread.
pub fn run_serial(jobs: &[Job]) -> Vec<CheckRecord> {
    jobs.iter().flat_map(Job::run).collect()
}

const FULL_ALPHAS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const FAST_ALPHAS: [f64; 3] = [0.3, 0.5, 0.7];
const FULL_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
const FAST_LAMBDAS: [f64; 1] = [1.0];

/// α E_α(−λx^α) against x ∫ f_α(x|t) t^{−1} e^{−λt} dt.
fn prop1_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&FAST_ALPHAS, &FULL_ALPHAS);
    let lambdas = sc.lambdas(&FAST_LAMBDAS, &FULL_LAMBDAS);
    let xs = sc.pick_grid(logspace(1e-2, 1e2, 8), logspace(1e-2, 1e2, 20));
    check_alphas(&alphas, false, false)?;
    check_positive("lambda", &lambdas)?;
    check_nonneg("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            for &x in &xs {
                out.push(Job::new("prop1", move || {
                    let r = prop_main_integral(alpha, lambda, x, &cfg)
                        .and_then(|a| Ok((a.value - alpha * ml_neg(alpha, lambda, x, &cfg)?.value).abs()));
                    vec![CheckRecord::from_result(
                        "prop1",
                        &[("alpha", alpha), ("lambda", lambda)],
                        x,
                        TOL_IDENTITY,
                        r,
                    )]
                }));
            }
        }
    }
    Ok(out)
}

/// ∫ e^{−xt} p_α(t) dt = E_α(−x).
pub fn pollard_transform(alpha: f64, x: f64, cfg: &QuadConfig) -> Result<f64> {
    let mut failure = None;
    let r = laplace_forward(
        |t| match pollard_pdf(alpha, t, cfg) {
            Ok(v) => v.value,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        x,
        cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r?.value)
}

fn pollard_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&FAST_ALPHAS, &FULL_ALPHAS);
    let xs = sc.pick_grid(linspace(0.0, 20.0, 6), linspace(0.0, 20.0, 21));
    check_alphas(&alphas, false, false)?;
    check_nonneg("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &x in &xs {
            out.push(Job::new("pollard", move || {
                let r = pollard_transform(alpha, x, &cfg)
                    .and_then(|a| Ok((a - ml_neg(alpha, 1.0, x.powf(1.0 / alpha), &cfg)?.value).abs()));
                vec![CheckRecord::from_result(
                    "pollard",
                    &[("alpha", alpha)],
                    x,
                    TOL_IDENTITY,
                    r,
                )]
            }));
        }
    }
    Ok(out)
}

fn feller_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&FAST_ALPHAS, &FULL_ALPHAS);
    let lambdas = sc.lambdas(&FAST_LAMBDAS, &FULL_LAMBDAS);
    let xs = sc.pick_grid(logspace(1e-2, 1e2, 8), logspace(1e-2, 1e2, 20));
    check_alphas(&alphas, false, true)?;
    check_positive("lambda", &lambdas)?;
    check_nonneg("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            for &x in &xs {
                out.push(Job::new("feller", move || {
                    let r = feller_hard_route(alpha, lambda, x, &cfg)
                        .and_then(|a| Ok((a.value - ml_neg(alpha, lambda, x, &cfg)?.value).abs()));
                    vec![CheckRecord::from_result(
                        "feller",
                        &[("alpha", alpha), ("lambda", lambda)],
                        x,
                        TOL_IDENTITY,
                        r,
                    )]
                }));
            }
        }
    }
    Ok(out)
}

/// ∫ e^{−sx} M_α(x|1,λ) dx against 1/s − s^{α−1}/(λ+s^α); at a few points
/// also the mixture integral for M_α against 1 − E_α(−λx^α).
fn marginal_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&FAST_ALPHAS, &FULL_ALPHAS);
    let lambdas = sc.lambdas(&FAST_LAMBDAS, &FULL_LAMBDAS);
    let ss = sc.pick_grid(linspace(0.5, 5.0, 4), linspace(0.5, 5.0, 10));
    check_alphas(&alphas, false, false)?;
    check_positive("lambda", &lambdas)?;
    check_positive("s", &ss)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            let params = [("alpha", alpha), ("lambda", lambda)];
            for &s in &ss {
                out.push(Job::new("marginal", move || {
                    let mut failure = None;
                    let lt = laplace_forward(
                        |x| match pillai_cdf(alpha, lambda, x, &cfg) {
                            Ok(v) => v.value,
                            Err(e) => {
                                failure.get_or_insert(e);
                                f64::NAN
                            }
                        },
                        s,
                        &cfg,
                    );
                    let r = match failure {
                        Some(e) => Err(e),
                        None => {
                            lt.and_then(|lt| Ok((lt.value - (1.0 / s - ml_laplace_closed(alpha, lambda, s)?)).abs()))
                        }
                    };
                    vec![CheckRecord::from_result("marginal", &params, s, TOL_IDENTITY, r)]
                }));
            }
            for &x in &[0.1, 1.0, 10.0] {
                out.push(Job::new("marginal", move || {
                    let prior = GammaPrior { mu: 1.0, lambda };
                    let r = mixture_cdf(alpha, prior, x, &cfg)
                        .and_then(|m| Ok((m.value - pillai_cdf(alpha, lambda, x, &cfg)?.value).abs()));
                    vec![CheckRecord::from_result(
                        "marginal_mixture",
                        &params,
                        x,
                        TOL_IDENTITY,
                        r,
                    )]
                }));
            }
        }
    }
    Ok(out)
}

/// Laplace–Stieltjes transform of P_{α,θ} against h_{α,θ}(x^{1/α}).
fn prop2_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&[0.4, 0.6], &[0.4, 0.6]);
    let xs = sc.pick_grid(vec![0.5, 2.0, 8.0], vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0]);
    check_alphas(&alphas, false, false)?;
    check_positive("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        let thetas = sc.thetas.clone().unwrap_or_else(|| vec![-alpha / 2.0, 0.0, 1.0]);
        for &theta in &thetas {
            let spec = GenMLSpec::new(alpha, theta)?;
            for &x in &xs {
                out.push(Job::new("prop2", move || {
                    let params = [("alpha", alpha), ("theta", theta)];
                    let mut failure = None;
                    let ls = laplace_stieltjes(
                        |t| match gen_ml_cdf(spec, t, &cfg) {
                            Ok(v) => v.value,
                            Err(e) => {
                                failure.get_or_insert(e);
                                f64::NAN
                            }
                        },
                        x,
                        &cfg,
                    );
                    let ls = match failure {
                        Some(e) => Err(e),
                        None => ls.map(|r| r.value),
                    };
                    let h = gen_ml_function_h(alpha, theta, 1.0, x.powf(1.0 / alpha), &cfg).map(|r| r.value);
                    let mut recs = vec![CheckRecord::from_result(
                        "prop2",
                        &params,
                        x,
                        TOL_PROP2,
                        ls.clone().and_then(|a| Ok((a - h.clone()?).abs())),
                    )];
                    if theta == 0.0 {
                        let r = ls.and_then(|a| Ok((a - pollard_transform(alpha, x, &cfg)?).abs()));
                        recs.push(CheckRecord::from_result(
                            "prop2_theta0_vs_pollard",
                            &params,
                            x,
                            TOL_PROP2_COLLAPSE,
                            r,
                        ));
                    }
                    recs
                }));
            }
        }
    }
    Ok(out)
}

/// Lévy densities by the limit n f(x|μ/n) against closed forms and against
/// inversion of μψ′.
fn cor1_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&[0.5], &[0.3, 0.5, 0.7]);
    let xs = sc.pick_grid(vec![1.0], vec![0.5, 1.0, 2.0]);
    check_alphas(&alphas, false, false)?;
    check_positive("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = vec![Job::new("cor1", move || {
        let fam = GammaFamily { lambda: 1.0 };
        let params = [("mu", 1.0), ("lambda", 1.0)];
        let r = levy_limit_extract(&fam, 1.0, 1.0, &default_schedule())
            .map(|v| (v.value - (-1.0f64).exp()).abs().max(v.abs_error_estimate));
        vec![CheckRecord::from_result("cor1_gamma", &params, 1.0, TOL_LEVY, r)]
    })];
    for &x in &xs {
        out.push(Job::new("cor1", move || {
            let fam = GammaFamily { lambda: 1.0 };
            let params = [("mu", 3.0), ("lambda", 1.0)];
            let r = levy_limit_extract(&fam, x, 3.0, &default_schedule())
                .and_then(|a| Ok((a.value - levy_by_inversion(&fam, x, 3.0, &cfg)?.value).abs()));
            vec![CheckRecord::from_result(
                "cor1_gamma_vs_inversion",
                &params,
                x,
                TOL_LEVY,
                r,
            )]
        }));
        for &alpha in &alphas {
            out.push(Job::new("cor1", move || {
                let fam = StableFamily { alpha, cfg };
                let params = [("alpha", alpha), ("mu", 1.0)];
                let one = levy_limit_extract(&fam, x, 1.0, &default_schedule());
                let two = levy_limit_extract(&fam, x, 2.0, &default_schedule());
                let inv = levy_by_inversion(&fam, x, 1.0, &cfg);
                let agree = match (&one, &inv) {
                    (Ok(a), Ok(b)) => Ok((a.value - b.value).abs()),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                let linear = match (&one, &two) {
                    (Ok(a), Ok(b)) => Ok((b.value - 2.0 * a.value).abs()),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                vec![
                    CheckRecord::from_result("cor1_stable_vs_inversion", &params, x, TOL_LEVY, agree),
                    CheckRecord::from_result("cor1_mu_linearity", &params, x, TOL_LEVY, linear),
                ]
            }));
        }
    }
    Ok(out)
}

/// Lévy density of the stable/gamma mixture against α E_α(−λx^α)/x.
fn thm3_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&[0.3, 0.5, 0.7], &[0.3, 0.5, 0.7]);
    let lambdas = sc.lambdas(&[1.0], &[1.0, 2.0]);
    let xs = sc.pick_grid(vec![0.5, 1.0, 2.0], vec![0.5, 1.0, 2.0]);
    check_alphas(&alphas, false, false)?;
    check_positive("lambda", &lambdas)?;
    check_positive("x", &xs)?;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            for &x in &xs {
                out.push(Job::new("thm3", move || {
                    let r = mixture_levy(stable_conditional(alpha, cfg), |y| levy_gamma(lambda, y), x, &cfg)
                        .and_then(|xi| Ok((xi.value - alpha * ml_neg(alpha, lambda, x, &cfg)?.value / x).abs()));
                    vec![CheckRecord::from_result(
                        "thm3",
                        &[("alpha", alpha), ("lambda", lambda)],
                        x,
                        TOL_THM3,
                        r,
                    )]
                }));
            }
        }
    }
    Ok(out)
}

/// Difference checks at k_max = 8 for E_α(−λx), h_{α,θ}(x^{1/α}), the closure
/// cases and the planted violator; Bernstein checks on three transforms.
fn cm_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let full_alphas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let alphas = sc.alphas(&FAST_ALPHAS, &full_alphas);
    let lambdas = sc.lambdas(&FAST_LAMBDAS, &FULL_LAMBDAS);
    check_alphas(&alphas, false, false)?;
    check_positive("lambda", &lambdas)?;
    let cfg = sc.cfg;
    let grid = CmGrid::spanning_decade(0.05, 8, 40);
    let mut out = Vec::new();
    for &alpha in &alphas {
        for &lambda in &lambdas {
            out.push(Job::new("cm-suite", move || {
                let f = |x: f64| ml_neg(alpha, lambda, x.powf(1.0 / alpha), &cfg).map_or(f64::NAN, |r| r.value);
                let params = [("alpha", alpha), ("lambda", lambda)];
                match cm_difference_check_grid(f, grid, TOL_CM) {
                    Ok(rep) => vec![CheckRecord::from_cm(
                        "cm_ml",
                        &params,
                        &rep,
                        CmVerdict::ConsistentWithCM,
                    )],
                    Err(e) => vec![CheckRecord::failed("cm_ml", &params, grid.a, TOL_CM, e)],
                }
            }));
        }
    }
    let h_alphas = sc.alphas(&[0.5], &[0.3, 0.5, 0.7]);
    for &alpha in &h_alphas {
        for theta in [-alpha / 2.0, 0.0, 1.0, 2.0] {
            out.push(Job::new("cm-suite", move || {
                let f = |x: f64| {
                    gen_ml_function_h(alpha, theta, 1.0, x.powf(1.0 / alpha), &cfg).map_or(f64::NAN, |r| r.value)
                };
                let params = [("alpha", alpha), ("theta", theta)];
                match cm_difference_check_grid(f, grid, TOL_CM) {
                    Ok(rep) => vec![CheckRecord::from_cm("cm_h", &params, &rep, CmVerdict::ConsistentWithCM)],
                    Err(e) => vec![CheckRecord::failed("cm_h", &params, grid.a, TOL_CM, e)],
                }
            }));
        }
    }
    out.push(Job::new("cm-suite", move || {
        match cm_closure_suite(
            &default_seeds(cfg),
            &default_inner_functions(),
            &default_id_cases(),
            grid,
            TOL_CM,
        ) {
            Ok(reports) => reports
                .iter()
                .map(|(name, rep)| {
                    let mut rec = CheckRecord::from_cm("cm_closure", &[], rep, CmVerdict::ConsistentWithCM);
                    rec.identity = format!("cm_closure: {name}");
                    rec
                })
                .collect(),
            Err(e) => vec![CheckRecord::failed("cm_closure", &[], grid.a, TOL_CM, e)],
        }
    }));
    out.push(Job::new("cm-suite", || {
        // sin(x) + 2 over more than a period must be rejected
        let rec = match cm_difference_check(|x| x.sin() + 2.0, 0.1, 0.25, 8, 40, TOL_CM) {
            Ok(rep) => {
                let mut r = CheckRecord::from_cm("cm_violator_sin", &[], &rep, CmVerdict::ViolationFound);
                r.residual = 0.0;
                r
            }
            Err(e) => CheckRecord::failed("cm_violator_sin", &[], 0.1, TOL_CM, e),
        };
        vec![rec]
    }));
    for &alpha in &sc.alphas(&[0.5], &[0.3, 0.5, 0.7]) {
        out.push(Job::new("cm-suite", move || bernstein_records(alpha, &cfg)));
    }
    Ok(out)
}

fn bernstein_records(alpha: f64, cfg: &QuadConfig) -> Vec<CheckRecord> {
    let ts: Vec<f64> = vec![0.25, 0.5, 1.0, 2.0, 4.0];
    let params = [("alpha", alpha)];
    let mut recs = Vec::new();
    match cm_bernstein_check(|s| 1.0 / (1.0 + s), &ts, cfg, TOL_CM) {
        Ok(rep) => {
            let mut r = CheckRecord::from_cm("bernstein_exp", &[], &rep, CmVerdict::ConsistentWithCM);
            let err = rep
                .recovered
                .iter()
                .map(|(t, v)| (v - (-t).exp()).abs())
                .fold(0.0, f64::max);
            r.residual = r.residual.max(err);
            r.verdict &= err <= TOL_CM;
            recs.push(r);
        }
        Err(e) => recs.push(CheckRecord::failed("bernstein_exp", &[], ts[0], TOL_CM, e)),
    }
    // s^{α−1}/(1+s^α) inverts to E_α(−t^α)
    match cm_bernstein_check(
        |s: Complex64| s.powf(alpha - 1.0) / (1.0 + s.powf(alpha)),
        &ts,
        cfg,
        TOL_CM,
    ) {
        Ok(rep) => {
            let mut r = CheckRecord::from_cm("bernstein_ml", &params, &rep, CmVerdict::ConsistentWithCM);
            let mut err = 0.0f64;
            for &(t, v) in &rep.recovered {
                match ml_neg(alpha, 1.0, t, cfg) {
                    Ok(e) => err = err.max((v - e.value).abs()),
                    Err(_) => err = f64::INFINITY,
                }
            }
            r.residual = r.residual.max(err);
            r.verdict &= err <= TOL_CM;
            recs.push(r);
        }
        Err(e) => recs.push(CheckRecord::failed("bernstein_ml", &params, ts[0], TOL_CM, e)),
    }
    // (1/(1+s^α))^2 inverts to the stable mixture density under Gamma(2, 1)
    match cm_bernstein_check(|s: Complex64| (1.0 + s.powf(alpha)).powi(-2), &ts, cfg, TOL_CM) {
        Ok(rep) => {
            let mut r = CheckRecord::from_cm("bernstein_id_mixture", &params, &rep, CmVerdict::ConsistentWithCM);
            let prior = GammaFamily { lambda: 1.0 };
            let mut err = 0.0f64;
            for &(t, v) in &rep.recovered {
                match mixture_marginal(stable_conditional(alpha, *cfg), &prior, 2.0, t, cfg) {
                    Ok(m) => err = err.max((v - m.value).abs()),
                    Err(_) => err = f64::INFINITY,
                }
            }
            r.residual = r.residual.max(err);
            r.verdict &= err <= TOL_CM;
            recs.push(r);
        }
        Err(e) => recs.push(CheckRecord::failed("bernstein_id_mixture", &params, ts[0], TOL_CM, e)),
    }
    recs
}

fn endpoint_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let xs = sc.pick_grid(vec![0.5, 1.0, 2.0], vec![0.5, 1.0, 2.0]);
    check_nonneg("x", &xs)?;
    let cfg = sc.cfg;
    Ok(vec![Job::new("endpoints", move || {
        let mut recs = Vec::new();
        for &x in &xs {
            let one = ml_neg(1.0, 1.0, x, &cfg).map(|r| (r.value - (-x).exp()).abs());
            recs.push(CheckRecord::from_result(
                "endpoint_alpha1",
                &[("alpha", 1.0)],
                x,
                TOL_ENDPOINT,
                one,
            ));
            let zero = ml_neg(0.0, 1.0, x, &cfg).map(|r| (r.value - 1.0 / (1.0 + x)).abs());
            recs.push(CheckRecord::from_result(
                "endpoint_alpha0",
                &[("alpha", 0.0)],
                x,
                TOL_ENDPOINT,
                zero,
            ));
        }
        recs
    })])
}

/// Fraction of positions where two draws differ bitwise.
fn mismatch(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    let diff = a.iter().zip(b).filter(|(x, y)| x.to_bits() != y.to_bits()).count();
    diff as f64 / a.len().max(1) as f64
}

/// KS distance of samples against the matching CDF, plus a determinism check.
fn sampling_jobs(sc: &SuiteConfig) -> Result<Vec<Job>> {
    let alphas = sc.alphas(&[0.5], &[0.3, 0.5, 0.7]);
    check_alphas(&alphas, false, false)?;
    let n = sc.n.unwrap_or(match sc.scale {
        Scale::Fast => 20_000,
        Scale::Full => 100_000,
    });
    if n == 0 {
        return domain("n must be at least 1");
    }
    let n_gen = (n / 10).max(1);
    let seed = sc.seed;
    let cfg = sc.cfg;
    let mut out = Vec::new();
    for &alpha in &alphas {
        out.push(Job::new("sampling", move || {
            let params = [("alpha", alpha), ("n", n as f64)];
            let tol = ks_threshold(n);
            let pollard = sample_pollard(alpha, seed, n).map(|s| {
                let d = ks_statistic(&s, |t| pollard_cdf(alpha, t, &cfg).map_or(f64::NAN, |r| r.value));
                (d, s)
            });
            let stable = stable_sample(alpha, 1.0, seed, n).map(|s| {
                let d = ks_statistic(&s, |x| stable_cdf(alpha, x, &cfg).map_or(f64::NAN, |r| r.value));
                (d, s)
            });
            let mut recs = Vec::new();
            match pollard {
                Ok((d, first)) => {
                    recs.push(CheckRecord::from_result("ks_pollard", &params, 0.0, tol, Ok(d)));
                    let again = sample_pollard(alpha, seed, n).map(|s| mismatch(&s, &first));
                    recs.push(CheckRecord::from_result(
                        "determinism_pollard",
                        &params,
                        0.0,
                        0.0,
                        again,
                    ));
                }
                Err(e) => recs.push(CheckRecord::failed("ks_pollard", &params, 0.0, tol, e)),
            }
            match stable {
                Ok((d, first)) => {
                    recs.push(CheckRecord::from_result("ks_stable", &params, 0.0, tol, Ok(d)));
                    let again = stable_sample(alpha, 1.0, seed, n).map(|s| mismatch(&s, &first));
                    recs.push(CheckRecord::from_result("determinism_stable", &params, 0.0, 0.0, again));
                }
                Err(e) => recs.push(CheckRecord::failed("ks_stable", &params, 0.0, tol, e)),
            }
            // draws at scale t = 16 shrink by 16^{1/α} onto the t = 1 law
            let shrink = 16f64.powf(1.0 / alpha);
            let scaled = stable_sample(alpha, 16.0, seed.wrapping_add(1), n).map(|s| {
                let s: Vec<f64> = s.iter().map(|v| v / shrink).collect();
                ks_statistic(&s, |x| stable_cdf(alpha, x, &cfg).map_or(f64::NAN, |r| r.value))
            });
            recs.push(CheckRecord::from_result("ks_stable_scaled", &params, 16.0, tol, scaled));
            recs
        }));
    }
    out.push(Job::new("sampling", move || {
        let spec = GenMLSpec { alpha: 0.5, theta: 1.0 };
        let params = [("alpha", 0.5), ("theta", 1.0), ("n", n_gen as f64)];
        let r = sample_gen_ml(spec, seed, n_gen, &cfg)
            .map(|s| ks_statistic(&s, |t| gen_ml_cdf(spec, t, &cfg).map_or(f64::NAN, |r| r.value)));
        vec![CheckRecord::from_result(
            "ks_gen_ml",
            &params,
            0.0,
            ks_threshold(n_gen),
            r,
        )]
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_target_is_domain_error() {
        let sc = SuiteConfig::new(Scale::Fast);
        assert!(jobs("nope", &sc).unwrap_err().is_domain());
    }

    #[test]
    fn bad_alpha_is_domain_error() {
        let mut sc = SuiteConfig::new(Scale::Fast);
        sc.alphas = Some(vec![1.5]);
        assert!(jobs("prop1", &sc).unwrap_err().is_domain());
    }

    #[test]
    fn endpoints_pass() {
        let sc = SuiteConfig::new(Scale::Fast);
        let recs = run_serial(&jobs("endpoints", &sc).unwrap());
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().all(|r| r.verdict));
    }
}
