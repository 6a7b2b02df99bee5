use lambert_tsallis::domain::{classify, critical_gamma, cut_set};
use lambert_tsallis::inverse::{EvalOptions, MainBranch};
use lambert_tsallis::tsallis_map::{f_eval, f_real};
use lambert_tsallis::verify::{build_contour, sample_upper_domain, winding_numbers, BASE_SAMPLES, DEFAULT_PROBES};
use lambert_tsallis::{Error, Params};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Parameters with a main branch, kept away from the region boundaries.
fn branch_params() -> impl Strategy<Value = Params> {
    prop_oneof![
        (1.0f64..5.0, -2.0f64..1.0).prop_map(|(k, t)| Params::finite(k, t * (critical_gamma(k) - 0.05)).unwrap()),
        (0.2f64..0.95, -2.0f64..-0.05).prop_map(|(k, g)| Params::finite(k, g).unwrap()),
        (-2.0f64..0.2).prop_map(|g| Params::infinite(g).unwrap()),
        (-4.0f64..-1.1, -2.0f64..0.0).prop_map(|(k, g)| Params::finite(k, g).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_commutes_with_conjugation(k in 0.2f64..5.0, g in -2.0f64..2.0, x in -5.0f64..5.0, y in 0.01f64..5.0) {
        let p = Params::finite(k, g).unwrap();
        let z = Complex64::new(x, y);
        if let Ok(w) = f_eval(&p, z) {
            let wc = f_eval(&p, z.conj()).unwrap();
            prop_assert!(rel(wc, w.conj()) <= 1e-14);
        }
    }

    #[test]
    fn f_is_real_right_of_the_branch_point(k in 0.2f64..5.0, g in -2.0f64..2.0, t in 0.01f64..10.0) {
        let p = Params::finite(k, g).unwrap();
        let x = -k + t;
        prop_assume!((1.0 + g * x).abs() > 1e-6);
        let w = f_eval(&p, Complex64::new(x, 0.0)).unwrap();
        prop_assert_eq!(w.im, 0.0);
        let direct = x / (1.0 + g * x) * (1.0 + x / k).powf(k);
        prop_assert!((f_real(&p, x).unwrap() - direct).abs() <= 1e-13 * direct.abs().max(1.0));
    }

    #[test]
    fn inverse_commutes_with_conjugation(p in branch_params(), x in -5.0f64..5.0, y in 0.01f64..5.0) {
        let mb = MainBranch::new(&p).unwrap();
        let w = Complex64::new(x, y);
        let opts = EvalOptions::default();
        let a = mb.eval(w, &opts).unwrap().z;
        let b = mb.eval(w.conj(), &opts).unwrap().z;
        prop_assert!(rel(a.conj(), b) <= 1e-12, "{a} {b}");
    }

    #[test]
    fn inverse_is_real_off_the_cut(p in branch_params(), x in -5.0f64..5.0) {
        let mb = MainBranch::new(&p).unwrap();
        prop_assume!(mb.cut().distance(Complex64::new(x, 0.0)) > 1e-6);
        let r = mb.eval(Complex64::new(x, 0.0), &EvalOptions::default()).unwrap();
        prop_assert_eq!(r.z.im, 0.0);
        prop_assert!(r.residual <= 1e-12);
    }

    #[test]
    fn round_trip_from_the_domain(p in branch_params(), seed in 0u64..1000) {
        let mb = MainBranch::new(&p).unwrap();
        for z in sample_upper_domain(&p, 8, seed).unwrap() {
            let r = mb.eval(f_eval(&p, z).unwrap(), &EvalOptions::default()).unwrap();
            prop_assert!((r.z - z).norm() <= 1e-9 * z.norm().max(1.0), "{p:?} z={z} got {}", r.z);
        }
    }

    #[test]
    fn reduction_identity(k in -5.0f64..-0.1, g in -3.0f64..2.0, x in -5.0f64..5.0, y in 0.001f64..5.0) {
        let p = Params::finite(k, g).unwrap();
        let red = Params::finite(-k, g - 1.0 / k).unwrap();
        let z = Complex64::new(x, y);
        let zr = z / (1.0 + z / k);
        match (f_eval(&p, z), f_eval(&red, zr)) {
            (Ok(a), Ok(b)) => prop_assert!(rel(a, b) <= 1e-12),
            (Err(Error::Pole(_)), Err(Error::Pole(_))) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn classification_matches_cut_availability(k in 0.2f64..5.0, g in -2.0f64..2.0) {
        let p = Params::finite(k, g).unwrap();
        prop_assert_eq!(MainBranch::new(&p).is_ok(), classify(&p).exists());
        if classify(&p).exists() {
            prop_assert!(cut_set(&p).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn winding_is_stable_under_refinement(p in branch_params()) {
        let c = build_contour(&p, 0.25, 8.0, BASE_SAMPLES).unwrap();
        let a = winding_numbers(&c, &DEFAULT_PROBES).unwrap();
        let b = winding_numbers(&c.refined().unwrap(), &DEFAULT_PROBES).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if let (Ok(x), Ok(y)) = (x, y) {
                prop_assert_eq!(x.value, y.value);
                prop_assert_eq!(x.value, 1);
            }
        }
    }
}
