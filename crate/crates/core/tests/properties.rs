use mlcm_core::cm::{cm_difference_check, CmVerdict};
use mlcm_core::distributions::{gen_ml_cdf, pollard_cdf, pollard_pdf, GenMLSpec};
use mlcm_core::quad::QuadConfig;
use mlcm_core::special::{ml_neg, ml_neg_via, Route};
use mlcm_core::stable::{stable_cdf, stable_pdf, stable_pdf_scaled, stable_sf};
use mlcm_core::transforms::{laplace_forward, laplace_stieltjes};
use proptest::prelude::*;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ml_neg_is_a_nonincreasing_probability(
        alpha in 0.05f64..1.0,
        lambda in 0.1f64..5.0,
        x in 0.0f64..50.0,
        dx in 0.0f64..10.0,
    ) {
        let a = ml_neg(alpha, lambda, x, &cfg()).unwrap().value;
        let b = ml_neg(alpha, lambda, x + dx, &cfg()).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-12, "E({}) = {b} > E({x}) = {a}", x + dx);
    }

    #[test]
    fn ml_neg_at_alpha_one_is_exponential(lambda in 0.01f64..10.0, x in 0.0f64..50.0) {
        let v = ml_neg(1.0, lambda, x, &cfg()).unwrap().value;
        let e = (-lambda * x).exp();
        prop_assert!((v - e).abs() <= 1e-14 * e.max(1e-300));
    }

    #[test]
    fn ml_neg_series_and_spectral_agree(alpha in 0.1f64..0.95, z in 0.05f64..3.0) {
        let x = z.powf(1.0 / alpha);
        if let Ok(s) = ml_neg_via(alpha, 1.0, x, Route::Series, &cfg()) {
            let q = ml_neg_via(alpha, 1.0, x, Route::SpectralIntegral, &cfg()).unwrap();
            prop_assert!((s.value - q.value).abs() <= 1e-9, "{} vs {}", s.value, q.value);
        }
    }

    #[test]
    fn densities_are_nonnegative(alpha in 0.05f64..0.95, x in 1e-3f64..1e3) {
        prop_assert!(stable_pdf(alpha, x, &cfg()).unwrap().value >= 0.0);
        prop_assert!(pollard_pdf(alpha, x, &cfg()).unwrap().value >= 0.0);
    }

    #[test]
    fn stable_cdf_is_monotone_and_complements_sf(alpha in 0.1f64..0.9, x in 1e-2f64..1e2, r in 1.0f64..3.0) {
        let a = stable_cdf(alpha, x, &cfg()).unwrap().value;
        let b = stable_cdf(alpha, x * r, &cfg()).unwrap().value;
        let s = stable_sf(alpha, x, &cfg()).unwrap().value;
        prop_assert!(b >= a - 1e-12);
        prop_assert!((a + s - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn pollard_cdf_is_monotone(alpha in 0.1f64..0.9, t in 1e-2f64..20.0, dt in 0.0f64..5.0) {
        let a = pollard_cdf(alpha, t, &cfg()).unwrap().value;
        let b = pollard_cdf(alpha, t + dt, &cfg()).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn stable_scale_equivariance(alpha in 0.2f64..0.8, x in 0.1f64..10.0, t in 0.1f64..10.0) {
        let c = t.powf(1.0 / alpha);
        let lhs = stable_pdf_scaled(alpha, x, t, &cfg()).unwrap().value;
        let rhs = stable_pdf(alpha, x / c, &cfg()).unwrap().value / c;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300) + 1e-300);
    }

    #[test]
    fn cm_power_laws_pass(p in 0.1f64..4.0, shift in 0.5f64..3.0) {
        let rep = cm_difference_check(|x| (shift + x).powf(-p), 0.05, 0.05, 8, 40, 1e-6).unwrap();
        prop_assert_eq!(rep.verdict, CmVerdict::ConsistentWithCM);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gen_ml_cdf_is_monotone(alpha in 0.2f64..0.8, theta in 0.0f64..2.0, t in 0.05f64..5.0, dt in 0.0f64..2.0) {
        let spec = GenMLSpec::new(alpha, theta).unwrap();
        let a = gen_ml_cdf(spec, t, &cfg()).unwrap().value;
        let b = gen_ml_cdf(spec, t + dt, &cfg()).unwrap().value;
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn stieltjes_matches_density_transform(alpha in 0.2f64..0.8, s in 0.2f64..5.0) {
        let c = cfg();
        let ls = laplace_stieltjes(|t| pollard_cdf(alpha, t, &c).unwrap().value, s, &c).unwrap().value;
        let lf = laplace_forward(|t| pollard_pdf(alpha, t, &c).unwrap().value, s, &c).unwrap().value;
        prop_assert!((ls - lf).abs() <= 1e-8, "{ls} vs {lf}");
    }
}
