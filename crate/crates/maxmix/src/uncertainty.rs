//! Monte-Carlo estimation of the Godambe sandwich information.
//!
//! With pℓ the *total* pairwise log-likelihood of one dataset, the
//! variability matrix is estimated from M datasets simulated at the fitted
//! parameters,
//!
//! ```text
//! Ĵ = M⁻¹ Σ_k ∇pℓ(ϑ̂; z^k) ∇ᵀpℓ(ϑ̂; z^k)
//! ```
//!
//! with scores centred before the outer-product average (their mean over
//! simulations is not exactly zero at ϑ̂; the mean-score norm is reported).
//! For the sensitivity matrix two estimators are available:
//!
//! - [`SensitivityMethod::PairScores`] (default): every pair's censored
//!   term is a valid likelihood of its own, so the information identity
//!   holds per pair and `Ĥ = Σ_pairs V̂ar(∇ℓ_pair)`. This needs first
//!   derivatives only. The TEG disk radius makes pℓ only piecewise-C¹
//!   (kinks wherever a pair distance crosses 2r), where finite-difference
//!   *second* derivatives are unusable; scores stay well behaved.
//! - [`SensitivityMethod::FdHessian`]: the direct estimate
//!   `Ĥ = −M⁻¹ Σ_k ∇²pℓ(ϑ̂; z^k)` from central-difference Hessians.
//!   Fine for smooth parameterizations (Smith models).
//!
//! Because pℓ is the total over all replicates, `Ĝ⁻¹ = Ĥ⁻¹ĴĤ⁻¹` estimates
//! the variance of ϑ̂ directly — no extra sample-size factor is applied
//! anywhere downstream ("total" scaling).
//!
//! Derivatives are taken on the unconstrained transformed scale; standard
//! errors are mapped back to the natural scale by the delta method through
//! the per-parameter transform record.

use crate::error::{Error, Result};
use crate::inference::censor::{CensoringConfig, PreparedPairs};
use crate::inference::fit::FitResult;
use crate::inference::likelihood::{pairwise_loglik, pairwise_loglik_by_pair};
use crate::model::spec::{ModelSpec, Transform};
use crate::sim::{simulate_mm, SiteSet};
use crate::util::mix_seed;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// How the sensitivity matrix Ĥ is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SensitivityMethod {
    /// Per-pair score outer products (information identity per pair).
    #[default]
    PairScores,
    /// Central-difference Hessians of the total pairwise log-likelihood.
    FdHessian,
}

/// Condition-number threshold beyond which inverses fall back to the
/// SVD pseudo-inverse.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Finite-difference step control on the transformed scale.
#[derive(Clone, Copy, Debug)]
pub struct FdSettings {
    pub rel_step: f64,
    pub abs_floor: f64,
}

impl Default for FdSettings {
    fn default() -> Self {
        FdSettings { rel_step: 1e-4, abs_floor: 1e-6 }
    }
}

/// Central-difference gradient and symmetrized Hessian of `f` at `x`.
///
/// Steps are `max(rel_step·|x_i|, abs_floor)` per coordinate. Non-finite
/// entries name the offending coordinate.
pub fn numerical_score_and_hessian(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    x: &[f64],
    settings: &FdSettings,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = x.len();
    let steps: Vec<f64> = x
        .iter()
        .map(|v| (settings.rel_step * v.abs()).max(settings.abs_floor))
        .collect();
    let f0 = f(x)?;
    let mut grad = DVector::zeros(d);
    let mut hess = DMatrix::zeros(d, d);
    let mut fp = vec![0.0; d];
    let mut fm = vec![0.0; d];
    let mut xs = x.to_vec();

    for i in 0..d {
        xs[i] = x[i] + steps[i];
        fp[i] = f(&xs)?;
        xs[i] = x[i] - steps[i];
        fm[i] = f(&xs)?;
        xs[i] = x[i];
        let g = (fp[i] - fm[i]) / (2.0 * steps[i]);
        let h = (fp[i] - 2.0 * f0 + fm[i]) / (steps[i] * steps[i]);
        if !g.is_finite() || !h.is_finite() {
            return Err(Error::numeric(format!(
                "finite differences produced a non-finite value at coordinate {i}"
            )));
        }
        grad[i] = g;
        hess[(i, i)] = h;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            xs[i] = x[i] + steps[i];
            xs[j] = x[j] + steps[j];
            let fpp = f(&xs)?;
            xs[j] = x[j] - steps[j];
            let fpm = f(&xs)?;
            xs[i] = x[i] - steps[i];
            let fmm = f(&xs)?;
            xs[j] = x[j] + steps[j];
            let fmp = f(&xs)?;
            xs[i] = x[i];
            xs[j] = x[j];
            let h = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
            if !h.is_finite() {
                return Err(Error::numeric(format!(
                    "finite differences produced a non-finite value at coordinates ({i}, {j})"
                )));
            }
            hess[(i, j)] = h;
            hess[(j, i)] = h;
        }
    }
    Ok((grad, hess))
}

/// Gradient and Hessian of the pairwise log-likelihood on the transformed
/// scale, at natural-scale parameters `params`.
pub fn loglik_score_and_hessian(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    params: &[f64],
    settings: &FdSettings,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    spec.validate(params)?;
    let t0 = spec.to_unconstrained(params);
    numerical_score_and_hessian(
        |t| Ok(pairwise_loglik(prepared, spec, &spec.from_unconstrained(t))?.value),
        &t0,
        settings,
    )
}

/// Monte-Carlo Godambe estimate on the transformed scale, with delta-method
/// standard errors on the natural scale.
#[derive(Clone, Debug)]
pub struct GodambeEstimate {
    /// Sensitivity matrix Ĥ (symmetrized).
    pub h: DMatrix<f64>,
    /// Variability matrix Ĵ (centred score outer products).
    pub j: DMatrix<f64>,
    /// Ĥ⁻¹ Ĵ Ĥ⁻¹, the estimator covariance on the transformed scale.
    pub ginv: DMatrix<f64>,
    /// Monte-Carlo replicate count.
    pub m: usize,
    /// Norm of the mean score over simulations (should be small).
    pub mean_score_norm: f64,
    /// Whether any inverse needed the pseudo-inverse fallback.
    pub pinv_fallback: bool,
    /// Elementwise MC standard error of Ĥ − Ĵ, for the information-identity
    /// diagnostic under a full likelihood.
    pub hj_diff_se: DMatrix<f64>,
    /// Per-parameter standard errors on the transformed scale.
    pub se_transformed: Vec<f64>,
    /// Delta-method standard errors on the natural scale.
    pub se_natural: Vec<f64>,
    pub spec: ModelSpec,
    pub params: Vec<f64>,
    pub transforms: Vec<Transform>,
    pub seed: u64,
    pub method: SensitivityMethod,
}

impl GodambeEstimate {
    /// Variance of â on the natural scale (delta method through the logit).
    pub fn var_a_natural(&self) -> Option<f64> {
        let ia = self.spec.index_of_a()?;
        let jac = self.transforms[ia].jacobian(self.params[ia]);
        Some(jac * jac * self.ginv[(ia, ia)])
    }

    /// Standard error of â on the natural scale.
    pub fn se_a_natural(&self) -> Option<f64> {
        self.var_a_natural().map(f64::sqrt)
    }

    /// The (a, a) entries of G⁻¹ and H⁻¹ (blocks of the inverses); these are
    /// invariant to parameter ordering and, as a ratio, to smooth scalar
    /// reparameterizations of `a`.
    pub fn submatrix_a(&self) -> Result<(f64, f64)> {
        let ia = self
            .spec
            .index_of_a()
            .ok_or_else(|| Error::domain("model has no mixing coefficient"))?;
        submatrix_a_from(&self.ginv, &self.h, ia).map(|(g, h, _)| (g, h))
    }
}

/// Extract (G_aa, H_aa) = ((G⁻¹)_aa, (H⁻¹)_aa) given G⁻¹ and H directly.
/// Returns the pinv-fallback flag as the third element.
pub fn submatrix_a_from(ginv: &DMatrix<f64>, h: &DMatrix<f64>, index_of_a: usize) -> Result<(f64, f64, bool)> {
    if index_of_a >= ginv.nrows() {
        return Err(Error::domain("index of a out of range"));
    }
    let (hinv, fallback) = inverse_with_fallback(h)?;
    Ok((ginv[(index_of_a, index_of_a)], hinv[(index_of_a, index_of_a)], fallback))
}

/// Inverse with SVD pseudo-inverse fallback when the condition number
/// exceeds [`CONDITION_LIMIT`]; the flag reports which path was taken.
pub fn inverse_with_fallback(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, bool)> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    let ill = !(smin > 0.0) || smax / smin > CONDITION_LIMIT;
    if !ill {
        if let Some(inv) = m.clone().try_inverse() {
            return Ok((inv, false));
        }
    }
    let pinv = svd
        .pseudo_inverse(smax.max(1e-300) * 1e-12)
        .map_err(|e| Error::numeric(format!("pseudo-inverse failed: {e}")))?;
    Ok((pinv, true))
}

/// Composite likelihood information criterion
/// CLIC = −2[pℓ(ϑ̂) − tr{Ĵ Ĥ⁻¹}]; lower is better.
pub fn clic(logpl: f64, h: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<f64> {
    let (hinv, _) = inverse_with_fallback(h)?;
    let penalty = (j * hinv).trace();
    Ok(-2.0 * (logpl - penalty))
}

/// Estimate Ĥ, Ĵ and Ĝ⁻¹ by simulating `m` datasets of the fitted model's
/// shape from the fitted parameters. Refuses m < 50.
pub fn estimate_godambe_mc(
    fit: &FitResult,
    sites: &SiteSet,
    censoring: &CensoringConfig,
    m: usize,
    seed: u64,
    accuracy: Option<usize>,
) -> Result<GodambeEstimate> {
    estimate_godambe_mc_with(fit, sites, censoring, m, seed, accuracy, SensitivityMethod::default())
}

/// One simulated dataset's sufficient statistics.
struct DatasetStat {
    /// Total score ∇pℓ on the transformed scale.
    total: DVector<f64>,
    /// Pair-major per-pair scores (P × d), PairScores method only.
    pair_scores: Option<Vec<f64>>,
    /// −∇²pℓ, FdHessian method only.
    neg_hessian: Option<DMatrix<f64>>,
}

/// [`estimate_godambe_mc`] with an explicit sensitivity estimator.
pub fn estimate_godambe_mc_with(
    fit: &FitResult,
    sites: &SiteSet,
    censoring: &CensoringConfig,
    m: usize,
    seed: u64,
    accuracy: Option<usize>,
    method: SensitivityMethod,
) -> Result<GodambeEstimate> {
    if m < 50 {
        return Err(Error::domain(format!(
            "Monte-Carlo Godambe estimation needs at least 50 replicates, got {m}"
        )));
    }
    let spec = fit.spec;
    let d = spec.dim();
    let settings = FdSettings::default();
    let t0 = spec.to_unconstrained(&fit.params);
    let steps: Vec<f64> = t0
        .iter()
        .map(|v| (settings.rel_step * v.abs()).max(settings.abs_floor))
        .collect();

    let per_dataset: Vec<Result<DatasetStat>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let data = simulate_mm(
                sites,
                spec,
                &fit.params,
                fit.n_replicates,
                mix_seed(seed, k as u64),
                accuracy,
            )?;
            let prepared = PreparedPairs::new(&data, sites, censoring)?;
            match method {
                SensitivityMethod::PairScores => {
                    let n_pairs = prepared.n_pairs();
                    let mut pair_scores = vec![0.0; n_pairs * d];
                    let mut total = DVector::zeros(d);
                    let mut t = t0.clone();
                    for i in 0..d {
                        t[i] = t0[i] + steps[i];
                        let (plus, _) =
                            pairwise_loglik_by_pair(&prepared, spec, &spec.from_unconstrained(&t))?;
                        t[i] = t0[i] - steps[i];
                        let (minus, _) =
                            pairwise_loglik_by_pair(&prepared, spec, &spec.from_unconstrained(&t))?;
                        t[i] = t0[i];
                        for p in 0..n_pairs {
                            let s = (plus[p] - minus[p]) / (2.0 * steps[i]);
                            if !s.is_finite() {
                                return Err(Error::numeric(format!(
                                    "non-finite pair score at coordinate {i}"
                                )));
                            }
                            pair_scores[p * d + i] = s;
                            total[i] += s;
                        }
                    }
                    Ok(DatasetStat { total, pair_scores: Some(pair_scores), neg_hessian: None })
                }
                SensitivityMethod::FdHessian => {
                    let (g, h) = loglik_score_and_hessian(&prepared, spec, &fit.params, &settings)?;
                    Ok(DatasetStat { total: g, pair_scores: None, neg_hessian: Some(-h) })
                }
            }
        })
        .collect();

    let mut stats = Vec::with_capacity(m);
    for r in per_dataset {
        stats.push(r?);
    }
    let mf = m as f64;

    let mut mean_score = DVector::zeros(d);
    for s in &stats {
        mean_score += &s.total;
    }
    mean_score /= mf;
    let mut j_hat = DMatrix::zeros(d, d);
    for s in &stats {
        let c = &s.total - &mean_score;
        j_hat += &c * c.transpose();
    }
    j_hat /= mf;

    let h_hat = match method {
        SensitivityMethod::PairScores => {
            let n_pairs = stats[0].pair_scores.as_ref().map(|v| v.len() / d).unwrap_or(0);
            // per-pair mean scores over the M datasets
            let mut pair_means = vec![0.0; n_pairs * d];
            for s in &stats {
                for (pm, v) in pair_means.iter_mut().zip(s.pair_scores.as_ref().unwrap()) {
                    *pm += v;
                }
            }
            for v in pair_means.iter_mut() {
                *v /= mf;
            }
            let mut h = DMatrix::zeros(d, d);
            for s in &stats {
                let ps = s.pair_scores.as_ref().unwrap();
                for p in 0..n_pairs {
                    for i in 0..d {
                        let ci = ps[p * d + i] - pair_means[p * d + i];
                        for jj in i..d {
                            let cj = ps[p * d + jj] - pair_means[p * d + jj];
                            h[(i, jj)] += ci * cj;
                        }
                    }
                }
            }
            for i in 0..d {
                for jj in 0..i {
                    h[(i, jj)] = h[(jj, i)];
                }
            }
            h / mf
        }
        SensitivityMethod::FdHessian => {
            let mut h = DMatrix::zeros(d, d);
            for s in &stats {
                h += s.neg_hessian.as_ref().unwrap();
            }
            h /= mf;
            (&h + h.transpose()) * 0.5
        }
    };

    // MC spread of per-dataset (H_k − J_k) entries, for the
    // information-identity diagnostic under a full likelihood
    let mut hj_var = DMatrix::zeros(d, d);
    for s in &stats {
        let c = &s.total - &mean_score;
        let jk = &c * c.transpose();
        let hk = match method {
            SensitivityMethod::FdHessian => s.neg_hessian.as_ref().unwrap().clone(),
            SensitivityMethod::PairScores => {
                let ps = s.pair_scores.as_ref().unwrap();
                let n_pairs = ps.len() / d;
                let mut hk = DMatrix::zeros(d, d);
                for p in 0..n_pairs {
                    let row = DVector::from_iterator(d, ps[p * d..(p + 1) * d].iter().copied());
                    hk += &row * row.transpose();
                }
                hk
            }
        };
        let diff = hk - jk - (&h_hat - &j_hat);
        for i in 0..d {
            for jj in 0..d {
                hj_var[(i, jj)] += diff[(i, jj)] * diff[(i, jj)];
            }
        }
    }
    let hj_diff_se = hj_var.map(|v: f64| (v / (mf * mf)).sqrt());

    let (h_inv, fb1) = inverse_with_fallback(&h_hat)?;
    let ginv = &h_inv * &j_hat * &h_inv;
    let se_transformed: Vec<f64> = (0..d).map(|i| ginv[(i, i)].max(0.0).sqrt()).collect();
    let transforms = spec.transforms();
    let se_natural: Vec<f64> = se_transformed
        .iter()
        .enumerate()
        .map(|(i, se)| se * transforms[i].jacobian(fit.params[i]).abs())
        .collect();

    Ok(GodambeEstimate {
        h: h_hat,
        j: j_hat,
        ginv,
        m,
        mean_score_norm: mean_score.norm(),
        pinv_fallback: fb1,
        hj_diff_se,
        se_transformed,
        se_natural,
        spec,
        params: fit.params.clone(),
        transforms,
        seed,
        method,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_hessian_is_exact() {
        // f(x) = −½ xᵀA x + bᵀx has gradient b − Ax and Hessian −A
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = DVector::from_row_slice(&[1.0, -2.0, 0.3]);
        let x = [0.7, -0.4, 1.1];
        let f = |v: &[f64]| -> Result<f64> {
            let xv = DVector::from_row_slice(v);
            Ok(-0.5 * (xv.transpose() * &a * &xv)[(0, 0)] + b.dot(&xv))
        };
        let (grad, hess) = numerical_score_and_hessian(f, &x, &FdSettings::default()).unwrap();
        let xv = DVector::from_row_slice(&x);
        let want_grad = &b - &a * &xv;
        for i in 0..3 {
            assert!((grad[i] - want_grad[i]).abs() < 1e-5, "grad {i}");
            for j in 0..3 {
                let rel = (hess[(i, j)] + a[(i, j)]).abs() / a[(i, j)].abs().max(1.0);
                assert!(rel < 1e-5, "hess ({i},{j}): {} vs {}", hess[(i, j)], -a[(i, j)]);
                assert!((hess[(i, j)] - hess[(j, i)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn fd_reports_offending_coordinate() {
        let f = |v: &[f64]| -> Result<f64> {
            if v[1] > 0.5 {
                Ok(f64::NAN)
            } else {
                Ok(v[0] + v[1])
            }
        };
        let err = numerical_score_and_hessian(f, &[0.0, 0.5], &FdSettings::default());
        assert!(err.is_err());
    }

    #[test]
    fn clic_reduces_to_aic_like_form_when_j_equals_h() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]);
        let c = clic(-100.0, &h, &h).unwrap();
        assert!((c - (200.0 + 2.0 * 2.0)).abs() < 1e-10);
    }

    #[test]
    fn clic_trace_hand_case() {
        // J·H⁻¹ for H = diag(2, 4), J = [[1, 0], [0, 8]] has trace 1/2 + 2
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let j = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 8.0]);
        let c = clic(-10.0, &h, &j).unwrap();
        assert!((c - (20.0 + 2.0 * 2.5)).abs() < 1e-12);
    }

    #[test]
    fn submatrix_extraction_and_permutation_invariance() {
        let g = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let h = DMatrix::from_row_slice(2, 2, &[5.0, 0.5, 0.5, 4.0]);
        let (ginv, _) = inverse_with_fallback(&g).unwrap();
        let (gaa, haa, _) = submatrix_a_from(&ginv, &h, 0).unwrap();
        // explicit 2×2 inverse: (G⁻¹)_00 = d/(ad − bc)
        assert!((gaa - 2.0 / 5.0).abs() < 1e-12);
        assert!((haa - 4.0 / 19.75).abs() < 1e-12);

        // permute both coordinates: the extracted scalars follow the index
        let perm = |m: &DMatrix<f64>| {
            DMatrix::from_row_slice(
                2,
                2,
                &[m[(1, 1)], m[(1, 0)], m[(0, 1)], m[(0, 0)]],
            )
        };
        let (ginv_p, _) = inverse_with_fallback(&perm(&g)).unwrap();
        let (gaa_p, haa_p, _) = submatrix_a_from(&ginv_p, &perm(&h), 1).unwrap();
        assert!((gaa - gaa_p).abs() < 1e-12);
        assert!((haa - haa_p).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_submatrix_is_the_inverse_itself() {
        let h = DMatrix::from_row_slice(1, 1, &[4.0]);
        let ginv = DMatrix::from_row_slice(1, 1, &[0.7]);
        let (gaa, haa, _) = submatrix_a_from(&ginv, &h, 0).unwrap();
        assert!((gaa - 0.7).abs() < 1e-14);
        assert!((haa - 0.25).abs() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_fallback_on_singular_matrix() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (_, fallback) = inverse_with_fallback(&h).unwrap();
        assert!(fallback);
    }

    #[test]
    fn refuses_small_m() {
        use crate::inference::{fit_model, FitOptions};
        use crate::sim::{sample_sites_uniform, simulate_mm};
        let sites = sample_sites_uniform(5, 1.0, 1).unwrap();
        let data = simulate_mm(&sites, ModelSpec::MsSmith, &[0.2], 50, 2, None).unwrap();
        let censoring = CensoringConfig::default();
        let fit =
            fit_model(&data, &sites, ModelSpec::MsSmith, &censoring, &FitOptions::default())
                .unwrap();
        let err = estimate_godambe_mc(&fit, &sites, &censoring, 10, 1, None);
        assert!(err.is_err());
    }
}
