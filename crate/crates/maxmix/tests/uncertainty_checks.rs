//! Statistical checks of the Godambe machinery that need simulation:
//! information-identity collapse under a full likelihood, CLIC model
//! selection, and optimizer/score consistency.

use maxmix::inference::{
    fit_model, CensoringConfig, FitOptions, PreparedPairs,
};
use maxmix::model::ModelSpec;
use maxmix::sim::{sample_sites_uniform, simulate_mm, SiteSet};
use maxmix::uncertainty::{
    clic, estimate_godambe_mc, estimate_godambe_mc_with, loglik_score_and_hessian, FdSettings,
    SensitivityMethod,
};

/// With a single pair the pairwise likelihood is a full likelihood, so the
/// sensitivity and variability matrices coincide; the FD-Hessian route and
/// the score route must agree within Monte-Carlo error.
#[test]
fn sandwich_collapses_for_single_pair_smith() {
    let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.35, 0.0]]).unwrap();
    let censoring = CensoringConfig::default();
    let truth = [0.3];
    let data = simulate_mm(&sites, ModelSpec::MsSmith, &truth, 600, 21, None).unwrap();
    let fit = fit_model(&data, &sites, ModelSpec::MsSmith, &censoring, &FitOptions::default())
        .unwrap();
    let god = estimate_godambe_mc_with(
        &fit,
        &sites,
        &censoring,
        400,
        5,
        None,
        SensitivityMethod::FdHessian,
    )
    .unwrap();
    let (h, j, se) = (god.h[(0, 0)], god.j[(0, 0)], god.hj_diff_se[(0, 0)]);
    assert!(
        (h - j).abs() <= 3.0 * se,
        "information identity violated: H = {h}, J = {j}, 3se = {}",
        3.0 * se
    );
    // and the sandwich then collapses to H⁻¹ within the same error scale
    let rel = (god.ginv[(0, 0)] - 1.0 / h).abs() / (1.0 / h);
    assert!(rel < 0.2, "Ginv {} vs 1/H {}", god.ginv[(0, 0)], 1.0 / h);
}

/// CLIC prefers the data-generating TEG class over the Smith class on TEG
/// data in at least 8 of 10 desk-scale replicates.
#[test]
fn clic_prefers_generating_model() {
    let censoring = CensoringConfig::default();
    let mut wins = 0;
    let reps = 10;
    for rep in 0..reps {
        let sites = sample_sites_uniform(12, 2.0, 300 + rep).unwrap();
        let truth = [0.15, 0.30];
        let data =
            simulate_mm(&sites, ModelSpec::MsTeg, &truth, 300, 400 + rep, None).unwrap();
        let mut clics = Vec::new();
        for spec in [ModelSpec::MsTeg, ModelSpec::MsSmith] {
            let fit = fit_model(&data, &sites, spec, &censoring, &FitOptions::default()).unwrap();
            let god =
                estimate_godambe_mc(&fit, &sites, &censoring, 60, 500 + rep, None).unwrap();
            clics.push(clic(fit.logpl, &god.h, &god.j).unwrap());
        }
        if clics[0] < clics[1] {
            wins += 1;
        }
    }
    assert!(wins >= 8, "CLIC picked the TEG class in only {wins}/{reps} replicates");
}

/// Standard errors on the natural scale are the transformed-scale errors
/// mapped through the transform Jacobian, so rescaling a range parameter
/// rescales its standard error by the same factor.
#[test]
fn natural_standard_errors_are_delta_method_mapped() {
    let sites = sample_sites_uniform(8, 2.0, 9).unwrap();
    let censoring = CensoringConfig::default();
    let data = simulate_mm(&sites, ModelSpec::MsTeg, &[0.2, 0.3], 250, 2, None).unwrap();
    let fit = fit_model(&data, &sites, ModelSpec::MsTeg, &censoring, &FitOptions::default())
        .unwrap();
    let god = estimate_godambe_mc(&fit, &sites, &censoring, 60, 7, None).unwrap();
    for i in 0..2 {
        let jac = god.transforms[i].jacobian(fit.params[i]);
        let want = god.se_transformed[i] * jac.abs();
        assert!((god.se_natural[i] - want).abs() < 1e-12 * want.max(1e-12));
        // log-scale Jacobian is linear in the parameter: a c-fold
        // reparameterization scales the natural-scale error c-fold
        let c = 3.7;
        assert!(
            (god.transforms[i].jacobian(c * fit.params[i]) - c * jac).abs() < 1e-12 * c * jac
        );
    }
}

/// The score at an interior optimum is numerically zero on the transformed
/// scale (Smith class, smooth in log φ).
#[test]
fn score_vanishes_at_interior_optimum() {
    let sites = sample_sites_uniform(10, 2.0, 4).unwrap();
    let censoring = CensoringConfig::default();
    let data = simulate_mm(&sites, ModelSpec::MsSmith, &[0.25], 400, 11, None).unwrap();
    let fit = fit_model(&data, &sites, ModelSpec::MsSmith, &censoring, &FitOptions::default())
        .unwrap();
    assert!(fit.converged);
    let prepared = PreparedPairs::new(&data, &sites, &censoring).unwrap();
    let (grad, hess) =
        loglik_score_and_hessian(&prepared, ModelSpec::MsSmith, &fit.params, &FdSettings::default())
            .unwrap();
    assert!(grad.norm() < 1e-2, "gradient norm {} at optimum", grad.norm());
    // second derivative of a log-likelihood at its max is negative
    assert!(hess[(0, 0)] < 0.0);
    // FD symmetry residual is tiny by construction for d = 1; check a 2-d fit
    let data2 = simulate_mm(&sites, ModelSpec::MsTeg, &[0.2, 0.3], 200, 13, None).unwrap();
    let prep2 = PreparedPairs::new(&data2, &sites, &censoring).unwrap();
    let fit2 = fit_model(&data2, &sites, ModelSpec::MsTeg, &censoring, &FitOptions::default())
        .unwrap();
    let (_, h2) =
        loglik_score_and_hessian(&prep2, ModelSpec::MsTeg, &fit2.params, &FdSettings::default())
            .unwrap();
    assert!((h2[(0, 1)] - h2[(1, 0)]).abs() < 1e-6);
}
