//! Point checks of the public API against mpmath reference values.

use mlcm_core::cm::{cm_difference_check, CmVerdict};
use mlcm_core::distributions::{gen_ml_cdf, gen_ml_cdf_by_density, pillai_cdf, pollard_pdf, GenMLSpec};
use mlcm_core::id::{prop_main_integral, stable_gamma_levy, verify_prop_main};
use mlcm_core::quad::QuadConfig;
use mlcm_core::special::{ml_laplace_closed, ml_neg, ml_neg_via, Route};
use mlcm_core::stable::stable_pdf;
use mlcm_core::suite::{jobs, run_serial, Scale, SuiteConfig};
use mlcm_core::transforms::{feller_hard_route, verify_feller_diagram};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * b.abs().max(1e-300), "{a} vs {b}");
}

#[test]
fn mittag_leffler_reference_values() {
    // E_{1/2}(−z) = e^{z²} erfc(z)
    close(
        ml_neg(0.5, 1.0, 1.0, &cfg()).unwrap().value,
        0.427_583_576_155_807,
        1e-13,
    );
    close(
        ml_neg(0.5, 2.0, 1.0, &cfg()).unwrap().value,
        0.255_395_676_310_505_74,
        1e-12,
    );
    close(
        ml_neg(0.3, 1.0, 2.0, &cfg()).unwrap().value,
        0.403_681_219_087_893_08,
        1e-10,
    );
}

#[test]
fn independent_routes_agree_at_half() {
    for route in [Route::PollardIntegral, Route::InverseLaplace, Route::SpectralIntegral] {
        let v = ml_neg_via(0.5, 1.0, 1.0, route, &cfg()).unwrap().value;
        close(v, 0.427_583_576_155_807, 1e-8);
    }
}

#[test]
fn stable_and_pollard_reference_values() {
    close(
        stable_pdf(0.5, 1.0, &cfg()).unwrap().value,
        0.219_695_644_733_861_2,
        1e-12,
    );
    close(
        stable_pdf(0.5, 100.0, &cfg()).unwrap().value,
        2.813_904_356_065_048e-4,
        1e-12,
    );
    close(
        pollard_pdf(0.5, 1.0, &cfg()).unwrap().value,
        0.439_391_289_467_722_4,
        1e-12,
    );
    close(
        pollard_pdf(0.5, 0.0, &cfg()).unwrap().value,
        0.564_189_583_547_756_3,
        1e-14,
    );
}

#[test]
fn mixture_and_transform_values() {
    close(
        pillai_cdf(0.5, 1.0, 1.0, &cfg()).unwrap().value,
        0.572_416_423_844_193,
        1e-12,
    );
    close(ml_laplace_closed(0.5, 1.0, 1.0).unwrap(), 0.5, 1e-15);
    close(
        stable_gamma_levy(0.5, 1.0, 1.0, &cfg()).unwrap().value,
        0.213_791_788_077_903_5,
        1e-9,
    );
}

#[test]
fn integral_representation_and_feller_reports() {
    let grid = [0.1, 1.0, 10.0];
    let r = verify_prop_main(0.7, 1.0, &grid, &cfg()).unwrap();
    assert!(r.max_residual <= 1e-7, "{r:?}");
    let r = verify_feller_diagram(0.4, 2.0, &grid, &cfg()).unwrap();
    assert!(r.max_residual <= 1e-7, "{r:?}");
    let a = prop_main_integral(0.5, 1.0, 1.0, &cfg()).unwrap().value;
    close(a, 0.5 * 0.427_583_576_155_807, 1e-9);
    close(
        feller_hard_route(0.5, 1.0, 1.0, &cfg()).unwrap().value,
        0.427_583_576_155_807,
        1e-8,
    );
}

#[test]
fn gen_ml_cdf_routes_agree() {
    let spec = GenMLSpec::new(0.5, 1.0).unwrap();
    for t in [0.1, 1.0, 3.0] {
        let a = gen_ml_cdf(spec, t, &cfg()).unwrap().value;
        let b = gen_ml_cdf_by_density(spec, t, &cfg()).unwrap().value;
        close(a, b, 1e-9);
    }
}

#[test]
fn planted_violator_is_caught() {
    let rep = cm_difference_check(|x| x.sin() + 2.0, 0.1, 0.25, 8, 40, 1e-6).unwrap();
    assert_eq!(rep.verdict, CmVerdict::ViolationFound);
}

#[test]
fn domain_errors_are_reported() {
    assert!(ml_neg(1.5, 1.0, 1.0, &cfg()).unwrap_err().is_domain());
    assert!(ml_neg(0.5, -1.0, 1.0, &cfg()).unwrap_err().is_domain());
    assert!(stable_pdf(0.5, -1.0, &cfg()).unwrap_err().is_domain());
    assert!(GenMLSpec::new(0.5, -0.6).unwrap_err().is_domain());
}

#[test]
fn fast_suite_passes() {
    let recs = run_serial(&jobs("all", &SuiteConfig::new(Scale::Fast)).unwrap());
    let bad: Vec<_> = recs.iter().filter(|r| !r.verdict).collect();
    assert!(bad.is_empty(), "{bad:#?}");
}
