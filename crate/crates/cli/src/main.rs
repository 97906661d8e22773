//! `mlcm`: evaluate, verify, sample and check complete monotonicity from the
//! command line.
//!
//! Exit codes: 0 success, 1 a verification or CM check failed, 2 bad
//! parameters, 3 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use mlcm_core::cm::{
    cm_closure_suite, cm_difference_check, default_id_cases, default_inner_functions, default_seeds, CMReport,
    CmVerdict,
};
use mlcm_core::distributions::{
    gen_ml_cdf, gen_ml_pdf, mixture_cdf, pillai_cdf, pollard_cdf, pollard_pdf, sample_gen_ml, sample_pollard,
    GammaPrior, GenMLSpec,
};
use mlcm_core::error::Error;
use mlcm_core::id::{gen_ml_function_h, stable_gamma_levy};
use mlcm_core::num::{linspace, logspace};
use mlcm_core::quad::QuadConfig;
use mlcm_core::special::{ml_neg, ml_neg_via, ml_series, EvalResult, MLIndex, Route};
use mlcm_core::stable::{stable_cdf_scaled, stable_pdf_scaled, stable_sample, tilted_pdf, TiltedStableSpec};
use mlcm_core::suite::{jobs, CheckRecord, Scale, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "mlcm",
    version,
    about = "Mittag-Leffler functions, stable laws and complete monotonicity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function on a grid and write CSV.
    Eval(EvalArgs),
    /// Run verification suites and write JSON-lines records.
    Verify(VerifyArgs),
    /// Draw samples and write them as CSV.
    Sample(SampleArgs),
    /// Run a complete-monotonicity check and write JSON-lines reports.
    CmCheck(CmArgs),
}

#[derive(Args, Clone)]
struct Params {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Scale parameter of the stable law.
    #[arg(long)]
    t: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalTarget {
    /// E_α(−λx^α)
    Ml,
    /// E_{α,β}(x) by its power series
    MlSeries,
    StablePdf,
    StableCdf,
    TiltedPdf,
    PollardPdf,
    PollardCdf,
    GenMlPdf,
    GenMlCdf,
    /// 1 − E_α(−λx^α)
    PillaiCdf,
    /// Stable law mixed over a Gamma(μ, λ) scale
    MixtureCdf,
    /// h_{α,θ}(x | λ)
    H,
    /// Lévy density of the stable/gamma mixture
    Xi,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Series,
    Spectral,
    Pollard,
    Talbot,
    Closed,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Series => Route::Series,
            RouteArg::Spectral => Route::SpectralIntegral,
            RouteArg::Pollard => Route::PollardIntegral,
            RouteArg::Talbot => Route::InverseLaplace,
            RouteArg::Closed => Route::ClosedForm,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    target: EvalTarget,
    /// min:max:count[:linear|log]
    #[arg(long)]
    grid: String,
    /// Force a route for `ml`.
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
    #[command(flatten)]
    p: Params,
}

#[derive(Args)]
struct VerifyArgs {
    /// prop1, pollard, feller, marginal, prop2, cor1, thm3, cm-suite, endpoints, sampling or all
    #[arg(long)]
    target: String,
    #[arg(long, conflicts_with = "full")]
    fast: bool,
    #[arg(long)]
    full: bool,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    p: Params,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleTarget {
    Stable,
    Pollard,
    GenMl,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    target: SampleTarget,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    p: Params,
}

#[derive(Clone, Copy, ValueEnum)]
enum CmTarget {
    /// x ↦ E_α(−λx)
    Ml,
    /// x ↦ h_{α,θ}(x^{1/α})
    H,
    /// Products and compositions of the built-in CM seeds
    Closure,
    /// sin(x) + 2, which is not CM
    Sin,
}

#[derive(Args)]
struct CmArgs {
    #[arg(long, value_enum)]
    target: CmTarget,
    /// Left end of the difference stencil.
    #[arg(long, default_value_t = 0.05)]
    a: f64,
    /// Step of the stencil; defaults to 9a/k_max.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    /// Number of stencil origins.
    #[arg(long, default_value_t = 40)]
    m: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    p: Params,
}

enum Failure {
    Verify,
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_domain() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let res = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Verify(a) => run_verify(a),
        Command::Sample(a) => run_sample(a),
        Command::CmCheck(a) => run_cm(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}

fn init_threads() -> std::result::Result<(), String> {
    let n = match std::env::var("MLCM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("MLCM_THREADS must be a non-negative integer, got '{v}'"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("grid must be min:max:count[:linear|log], got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count < 1 {
        return Err(Failure::Usage("grid count must be at least 1".into()));
    }
    if !min.is_finite() || !max.is_finite() {
        return Err(bad());
    }
    match parts.get(3).map(|s| s.trim()) {
        None | Some("linear") => Ok(linspace(min, max, count)),
        Some("log") => {
            if !(min > 0.0 && max > 0.0) {
                return Err(Failure::Usage("log grid needs min > 0 and max > 0".into()));
            }
            Ok(logspace(min, max, count))
        }
        Some(other) => Err(Failure::Usage(format!("unknown grid spacing '{other}'"))),
    }
}

fn need(v: Option<f64>, name: &str) -> std::result::Result<f64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this target")))
}

fn open_out(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_eval(a: EvalArgs) -> Outcome {
    let grid = parse_grid(&a.grid)?;
    let p = &a.p;
    let cfg = QuadConfig::default();
    let alpha = || need(p.alpha, "alpha");
    let lambda = p.lambda.unwrap_or(1.0);
    let t = p.t.unwrap_or(1.0);
    type Eval = Box<dyn Fn(f64) -> mlcm_core::error::Result<EvalResult> + Sync>;
    let f: Eval = match a.target {
        EvalTarget::Ml => {
            let alpha = alpha()?;
            match a.route {
                Some(r) => Box::new(move |x| ml_neg_via(alpha, lambda, x, r.into(), &cfg)),
                None => Box::new(move |x| ml_neg(alpha, lambda, x, &cfg)),
            }
        }
        EvalTarget::MlSeries => {
            let idx = MLIndex::new(alpha()?, p.beta.unwrap_or(1.0))?;
            Box::new(move |x| ml_series(idx, x, 1e-16))
        }
        EvalTarget::StablePdf => {
            let alpha = alpha()?;
            Box::new(move |x| stable_pdf_scaled(alpha, x, t, &cfg).map(stable_eval))
        }
        EvalTarget::StableCdf => {
            let alpha = alpha()?;
            Box::new(move |x| stable_cdf_scaled(alpha, x, t, &cfg))
        }
        EvalTarget::TiltedPdf => {
            let spec = TiltedStableSpec::new(alpha()?, need(p.theta, "theta")?, t)?;
            Box::new(move |x| tilted_pdf(&spec, x, &cfg).map(stable_eval))
        }
        EvalTarget::PollardPdf => {
            let alpha = alpha()?;
            Box::new(move |x| pollard_pdf(alpha, x, &cfg))
        }
        EvalTarget::PollardCdf => {
            let alpha = alpha()?;
            Box::new(move |x| pollard_cdf(alpha, x, &cfg))
        }
        EvalTarget::GenMlPdf => {
            let spec = GenMLSpec::new(alpha()?, need(p.theta, "theta")?)?;
            Box::new(move |x| gen_ml_pdf(spec, x, &cfg))
        }
        EvalTarget::GenMlCdf => {
            let spec = GenMLSpec::new(alpha()?, need(p.theta, "theta")?)?;
            Box::new(move |x| gen_ml_cdf(spec, x, &cfg))
        }
        EvalTarget::PillaiCdf => {
            let alpha = alpha()?;
            Box::new(move |x| pillai_cdf(alpha, lambda, x, &cfg))
        }
        EvalTarget::MixtureCdf => {
            let alpha = alpha()?;
            let prior = GammaPrior::new(need(p.mu, "mu")?, lambda)?;
            Box::new(move |x| mixture_cdf(alpha, prior, x, &cfg))
        }
        EvalTarget::H => {
            let (alpha, theta) = (alpha()?, need(p.theta, "theta")?);
            Box::new(move |x| gen_ml_function_h(alpha, theta, lambda, x, &cfg))
        }
        EvalTarget::Xi => {
            let alpha = alpha()?;
            Box::new(move |x| stable_gamma_levy(alpha, lambda, x, &cfg))
        }
    };
    let rows: Vec<_> = grid.par_iter().map(|&x| f(x)).collect();
    let mut out = open_out(&p.out)?;
    writeln!(out, "x,value,abs_error_estimate,route")?;
    for (x, r) in grid.iter().zip(rows) {
        let r = r.map_err(|e| Failure::from(e.at(*x)))?;
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            x,
            r.value,
            r.abs_error_estimate,
            r.route.name()
        )?;
    }
    out.flush()?;
    Ok(())
}

fn stable_eval(s: mlcm_core::stable::StableEval) -> EvalResult {
    use mlcm_core::stable::StableRoute;
    let route = match s.route {
        StableRoute::ZolotarevIntegral => Route::Quadrature,
        StableRoute::PowerSeries => Route::Series,
        StableRoute::ClosedFormHalf | StableRoute::Underflow => Route::ClosedForm,
    };
    EvalResult {
        value: s.value,
        abs_error_estimate: s.abs_error_estimate,
        route,
    }
}

trait At {
    fn at(self, x: f64) -> Self;
}

impl At for Error {
    fn at(self, x: f64) -> Error {
        match self {
            Error::Domain(m) => Error::Domain(format!("at x = {x}: {m}")),
            other => other,
        }
    }
}

fn run_verify(a: VerifyArgs) -> Outcome {
    let p = &a.p;
    let mut sc = SuiteConfig::new(if a.full { Scale::Full } else { Scale::Fast });
    sc.alphas = p.alpha.map(|v| vec![v]);
    sc.lambdas = p.lambda.map(|v| vec![v]);
    sc.thetas = p.theta.map(|v| vec![v]);
    if let Some(g) = &a.grid {
        sc.xs = Some(parse_grid(g)?);
    }
    if let Some(s) = a.seed {
        sc.seed = s;
    }
    sc.n = a.n;
    let js = jobs(&a.target, &sc)?;
    let records: Vec<Vec<CheckRecord>> = js.par_iter().map(|j| j.run()).collect();
    let mut out = open_out(&p.out)?;
    let (mut failed, mut broken, mut total) = (0usize, 0usize, 0usize);
    let mut worst = 0.0f64;
    for r in records.iter().flatten() {
        total += 1;
        if !r.verdict {
            failed += 1;
        }
        if r.error.is_some() {
            broken += 1;
        }
        if r.tolerance > 0.0 && r.residual.is_finite() {
            worst = worst.max(r.residual / r.tolerance);
        }
        serde_json::to_writer(&mut out, r).map_err(|e| Failure::Usage(e.to_string()))?;
        writeln!(out)?;
    }
    out.flush()?;
    eprintln!("{total} checks, {failed} failed, {broken} numerical failures, worst residual/tol {worst:.3e}");
    if broken > 0 {
        Err(Failure::Numerical(format!("{broken} checks could not be evaluated")))
    } else if failed > 0 {
        Err(Failure::Verify)
    } else {
        Ok(())
    }
}

fn run_sample(a: SampleArgs) -> Outcome {
    let p = &a.p;
    if a.n < 1 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let alpha = need(p.alpha, "alpha")?;
    let draws = match a.target {
        SampleTarget::Stable => stable_sample(alpha, p.t.unwrap_or(1.0), a.seed, a.n)?,
        SampleTarget::Pollard => sample_pollard(alpha, a.seed, a.n)?,
        SampleTarget::GenMl => {
            let spec = GenMLSpec::new(alpha, p.theta.unwrap_or(0.0))?;
            sample_gen_ml(spec, a.seed, a.n, &QuadConfig::default())?
        }
    };
    let mut out = open_out(&p.out)?;
    writeln!(out, "value")?;
    for v in draws {
        writeln!(out, "{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

fn run_cm(a: CmArgs) -> Outcome {
    let p = &a.p;
    let cfg = QuadConfig::default();
    if a.k_max < 1 {
        return Err(Failure::Usage("--k-max must be at least 1".into()));
    }
    let delta = a.delta.unwrap_or(9.0 * a.a / a.k_max as f64);
    let check = |f: &(dyn Fn(f64) -> f64 + Sync)| cm_difference_check(f, a.a, delta, a.k_max, a.m, a.tol);
    let reports: Vec<(String, CMReport)> = match a.target {
        CmTarget::Ml => {
            let alpha = need(p.alpha, "alpha")?;
            let lambda = p.lambda.unwrap_or(1.0);
            ml_neg(alpha, lambda, 1.0, &cfg)?;
            let f = move |x: f64| ml_neg(alpha, lambda, x.powf(1.0 / alpha), &cfg).map_or(f64::NAN, |r| r.value);
            vec![(format!("E_{alpha}(-{lambda} x)"), check(&f)?)]
        }
        CmTarget::H => {
            let alpha = need(p.alpha, "alpha")?;
            let theta = need(p.theta, "theta")?;
            let lambda = p.lambda.unwrap_or(1.0);
            gen_ml_function_h(alpha, theta, lambda, 1.0, &cfg)?;
            let f = move |x: f64| {
                gen_ml_function_h(alpha, theta, lambda, x.powf(1.0 / alpha), &cfg).map_or(f64::NAN, |r| r.value)
            };
            vec![(format!("h_{alpha},{theta}(x^(1/{alpha}))"), check(&f)?)]
        }
        CmTarget::Closure => {
            let grid = mlcm_core::cm::CmGrid {
                a: a.a,
                delta,
                k_max: a.k_max,
                m: a.m,
            };
            cm_closure_suite(
                &default_seeds(cfg),
                &default_inner_functions(),
                &default_id_cases(),
                grid,
                a.tol,
            )?
        }
        CmTarget::Sin => vec![("sin(x) + 2".into(), check(&|x: f64| x.sin() + 2.0)?)],
    };
    let mut out = open_out(&p.out)?;
    let mut all_cm = true;
    for (name, rep) in &reports {
        all_cm &= rep.verdict == CmVerdict::ConsistentWithCM;
        let mut rec = serde_json::to_value(rep).map_err(|e| Failure::Usage(e.to_string()))?;
        rec["function"] = name.as_str().into();
        serde_json::to_writer(&mut out, &rec).map_err(|e| Failure::Usage(e.to_string()))?;
        writeln!(out)?;
    }
    out.flush()?;
    if all_cm {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
