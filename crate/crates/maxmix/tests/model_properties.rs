//! Property tests for the bivariate-law invariants.

use maxmix::model::{
    ims_bivariate_cdf, mm_bivariate_cdf, ModelSpec, MsFamily, PairModel, Transform,
};
use proptest::prelude::*;

fn arb_family() -> impl Strategy<Value = MsFamily> {
    prop_oneof![
        (0.05f64..5.0).prop_map(|gamma| MsFamily::Smith { gamma }),
        ((-0.9f64..1.0), (0.0f64..=1.0))
            .prop_map(|(rho, alpha)| MsFamily::Teg { rho, alpha }),
    ]
}

fn arb_z() -> impl Strategy<Value = f64> {
    (0.05f64..30.0).prop_map(|z| z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exponent_measure_homogeneous_order_minus_one(
        fam in arb_family(), z1 in arb_z(), z2 in arb_z(), t in 0.1f64..10.0
    ) {
        let v = fam.v(z1, z2).unwrap();
        let vt = fam.v(t * z1, t * z2).unwrap();
        prop_assert!((vt - v / t).abs() <= 1e-10 * v.abs().max(1.0));
    }

    #[test]
    fn theta_bounds_and_diagonal_identity(fam in arb_family(), z in arb_z()) {
        let theta = fam.theta();
        prop_assert!((1.0..=2.0 + 1e-12).contains(&theta));
        // V(z, z)·z = θ and V(z, ∞) = 1/z
        let v = fam.v(z, z).unwrap();
        prop_assert!((v * z - theta).abs() < 1e-10);
        let v_inf = fam.v(z, 1e14).unwrap();
        prop_assert!((v_inf - 1.0 / z).abs() < 1e-10 * (1.0 / z));
    }

    #[test]
    fn cdfs_are_monotone_and_bounded(
        fam in arb_family(), a in 0.0f64..=1.0,
        z1 in arb_z(), z2 in arb_z(), bump in 0.01f64..5.0
    ) {
        let y = MsFamily::Teg { rho: 0.5, alpha: 0.4 };
        let model = PairModel::Mix { a, x: fam, y };
        let g = model.cdf(z1, z2).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert!(model.cdf(z1 + bump, z2).unwrap() >= g - 1e-12);
        prop_assert!(model.cdf(z1, z2 + bump).unwrap() >= g - 1e-12);

        let ims = PairModel::Ims(fam);
        let gi = ims.cdf(z1, z2).unwrap();
        prop_assert!((0.0..=1.0).contains(&gi));
        prop_assert!(ims.cdf(z1 + bump, z2).unwrap() >= gi - 1e-12);
    }

    #[test]
    fn mixture_boundaries_reduce_bitwise(
        x in arb_family(), y in arb_family(), z1 in arb_z(), z2 in arb_z()
    ) {
        let pure_x = (-x.v(z1, z2).unwrap()).exp();
        let at_one = mm_bivariate_cdf(z1, z2, 1.0, &x, &y).unwrap();
        prop_assert!((at_one - pure_x).abs() <= 1e-14);
        let pure_y = ims_bivariate_cdf(z1, z2, &y).unwrap();
        let at_zero = mm_bivariate_cdf(z1, z2, 0.0, &x, &y).unwrap();
        prop_assert!((at_zero - pure_y).abs() <= 1e-14);
    }

    #[test]
    fn mixture_margins_unit_frechet(
        x in arb_family(), y in arb_family(), a in 0.0f64..=1.0, z in arb_z()
    ) {
        let g = mm_bivariate_cdf(z, 1e14, a, &x, &y).unwrap();
        prop_assert!((g - (-1.0f64 / z).exp()).abs() < 1e-10);
    }

    #[test]
    fn parameter_transforms_round_trip(
        a in 0.001f64..0.999, phi in 0.001f64..100.0, r in 0.001f64..100.0
    ) {
        for (t, v) in [
            (Transform::Logit, a),
            (Transform::Log, phi),
            (Transform::Log, r),
        ] {
            let back = t.from_unconstrained(t.to_unconstrained(v));
            prop_assert!((back - v).abs() <= 1e-12 * v.max(1.0));
        }
        for spec in ModelSpec::ALL {
            let params = spec.default_start(0.7);
            let back = spec.from_unconstrained(&spec.to_unconstrained(&params));
            for (p, b) in params.iter().zip(&back) {
                prop_assert!((p - b).abs() <= 1e-12);
            }
        }
    }
}
