//! Maximum censored pairwise likelihood fitting, unrestricted and with the
//! mixing coefficient frozen.

use super::censor::{CensoringConfig, PreparedPairs};
use super::likelihood::pairwise_loglik;
use super::optimize::{nelder_mead, NelderMeadOptions};
use crate::error::{Error, Result};
use crate::model::spec::{ModelSpec, Transform};
use crate::sim::{DataMatrix, SiteSet};

/// Fitting options: optimizer settings plus an optional explicit start on
/// the natural scale.
#[derive(Clone, Debug, Default)]
pub struct FitOptions {
    pub optimizer: NelderMeadOptions,
    pub start: Option<Vec<f64>>,
}

/// A fitted model: parameters on the natural scale, the pairwise
/// log-likelihood at the optimum, and optimizer diagnostics.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub params: Vec<f64>,
    pub logpl: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evals: usize,
    /// Mixing coefficient frozen at this value during fitting, if any.
    pub constrained_a: Option<f64>,
    /// Contributions skipped as non-finite at the optimum.
    pub skipped: usize,
    /// Per-parameter transform record (optimization ran on this scale).
    pub transforms: Vec<Transform>,
    /// Replicate count of the fitted data, used by the Godambe simulation.
    pub n_replicates: usize,
    /// Censoring configuration used, carried for provenance.
    pub censoring: CensoringConfig,
}

impl FitResult {
    /// Estimated mixing coefficient, when the model class has one.
    pub fn a_hat(&self) -> Option<f64> {
        self.spec.index_of_a().map(|i| self.params[i])
    }
}

/// Moment-flavoured default start: a = 0.5, ranges at a third of the median
/// pairwise distance, radii at the median distance.
pub fn default_start(spec: ModelSpec, sites: &SiteSet) -> Vec<f64> {
    spec.default_start(sites.median_pairwise_distance())
}

/// Maximize the censored pairwise log-likelihood over all parameters.
pub fn fit_model(
    data: &DataMatrix,
    sites: &SiteSet,
    spec: ModelSpec,
    censoring: &CensoringConfig,
    opts: &FitOptions,
) -> Result<FitResult> {
    let prepared = PreparedPairs::new(data, sites, censoring)?;
    let start = match &opts.start {
        Some(s) => {
            spec.validate(s)?;
            s.clone()
        }
        None => default_start(spec, sites),
    };
    fit_prepared(&prepared, spec, censoring, &start, None, &opts.optimizer)
}

/// Maximize over the nuisance parameters with `a` frozen at `a0`.
pub fn fit_constrained(
    data: &DataMatrix,
    sites: &SiteSet,
    spec: ModelSpec,
    censoring: &CensoringConfig,
    a0: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    let prepared = PreparedPairs::new(data, sites, censoring)?;
    fit_constrained_prepared(&prepared, spec, censoring, a0, opts)
}

/// Constrained fit on an already prepared dataset.
pub fn fit_constrained_prepared(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    censoring: &CensoringConfig,
    a0: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    let ia = spec
        .index_of_a()
        .ok_or_else(|| Error::domain(format!("{} has no mixing coefficient", spec.name())))?;
    if !(0.0..=1.0).contains(&a0) {
        return Err(Error::domain(format!("a0 must lie in [0, 1], got {a0}")));
    }
    let mut start = match &opts.start {
        Some(s) => {
            spec.validate(s)?;
            s.clone()
        }
        None => {
            // nuisance start needs a site geometry we no longer have; derive
            // from the prepared pair distances instead
            let mut ds: Vec<f64> = prepared.pairs.iter().map(|p| p.h).collect();
            ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
            spec.default_start(ds[ds.len() / 2])
        }
    };
    start[ia] = a0;
    fit_prepared(prepared, spec, censoring, &start, Some(ia), &opts.optimizer)
}

/// Unrestricted fit on an already prepared dataset.
pub fn fit_model_prepared(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    censoring: &CensoringConfig,
    start: &[f64],
    optimizer: &NelderMeadOptions,
) -> Result<FitResult> {
    fit_prepared(prepared, spec, censoring, start, None, optimizer)
}

fn fit_prepared(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    censoring: &CensoringConfig,
    start: &[f64],
    frozen: Option<usize>,
    optimizer: &NelderMeadOptions,
) -> Result<FitResult> {
    let transforms = spec.transforms();
    let mut t_start = spec.to_unconstrained(start);
    let free: Vec<usize> = (0..spec.dim()).filter(|i| Some(*i) != frozen).collect();

    // box bounds on the transformed scale: ranges/radii within a factor of
    // 1000 of the median pair distance, the logit of `a` within ±34.
    // Weakly identified fits otherwise wander to numerically absurd corners
    // where the likelihood is flat but simulation breaks down.
    let mut hs: Vec<f64> = prepared.pairs.iter().map(|p| p.h).collect();
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let log_med_h = hs[hs.len() / 2].max(1e-300).ln();
    const LOG_SPAN: f64 = 6.907_755_278_982_137; // ln(1000)
    let bounds: Vec<(f64, f64)> = transforms
        .iter()
        .map(|t| match t {
            Transform::Logit => (-34.0, 34.0),
            Transform::Log => (log_med_h - LOG_SPAN, log_med_h + LOG_SPAN),
        })
        .collect();
    for (i, t) in t_start.iter_mut().enumerate() {
        *t = t.clamp(bounds[i].0, bounds[i].1);
    }
    let t_start = t_start;
    let t_free: Vec<f64> = free.iter().map(|&i| t_start[i]).collect();

    let assemble = |t_sub: &[f64]| -> Vec<f64> {
        let mut t_full = t_start.clone();
        for (pos, &i) in free.iter().enumerate() {
            t_full[i] = t_sub[pos];
        }
        spec.from_unconstrained(&t_full)
    };

    let objective = |t_sub: &[f64]| -> f64 {
        for (pos, &i) in free.iter().enumerate() {
            let (lo, hi) = bounds[i];
            if !(t_sub[pos] >= lo && t_sub[pos] <= hi) {
                return f64::INFINITY;
            }
        }
        let params = assemble(t_sub);
        match pairwise_loglik(prepared, spec, &params) {
            Ok(ll) => -ll.value,
            Err(_) => f64::INFINITY,
        }
    };

    let f0 = objective(&t_free);
    if !f0.is_finite() {
        let p0 = assemble(&t_free);
        let detail = pairwise_loglik(prepared, spec, &p0)
            .err()
            .map(|e| e.to_string())
            .unwrap_or_else(|| "objective is not finite".to_string());
        return Err(Error::optim(format!(
            "pairwise log-likelihood is unusable at the start {p0:?}: {detail}"
        )));
    }

    let out = nelder_mead(objective, &t_free, optimizer);
    let params = assemble(&out.x);
    let ll = pairwise_loglik(prepared, spec, &params)?;
    Ok(FitResult {
        spec,
        params,
        logpl: ll.value,
        converged: out.converged,
        iterations: out.iterations,
        evals: out.evals,
        constrained_a: frozen.map(|i| start[i]),
        skipped: ll.skipped,
        transforms,
        n_replicates: prepared.n_replicates,
        censoring: *censoring,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_mm, sample_sites_uniform};

    #[test]
    fn ms_teg_recovery_and_ascent() {
        let sites = sample_sites_uniform(15, 2.0, 31).unwrap();
        let truth = [0.20, 0.35];
        let data = simulate_mm(&sites, ModelSpec::MsTeg, &truth, 800, 17, None).unwrap();
        let censoring = CensoringConfig::default();
        let opts = FitOptions::default();
        let fit = fit_model(&data, &sites, ModelSpec::MsTeg, &censoring, &opts).unwrap();

        // ascent property
        let prepared = PreparedPairs::new(&data, &sites, &censoring).unwrap();
        let start = default_start(ModelSpec::MsTeg, &sites);
        let ll0 = pairwise_loglik(&prepared, ModelSpec::MsTeg, &start).unwrap();
        assert!(fit.logpl >= ll0.value);

        // parameters recovered within ±50%
        for (est, tru) in fit.params.iter().zip(&truth) {
            assert!((est - tru).abs() / tru < 0.5, "{:?} vs {truth:?}", fit.params);
        }
    }

    #[test]
    fn constrained_nesting_and_boundary() {
        let sites = sample_sites_uniform(8, 2.0, 5).unwrap();
        let data = simulate_mm(
            &sites,
            ModelSpec::MmTegISmith,
            &[0.5, 0.1, 0.25, 0.75],
            150,
            3,
            None,
        )
        .unwrap();
        let censoring = CensoringConfig::default();
        let opts = FitOptions::default();
        let full = fit_model(&data, &sites, ModelSpec::MmTegISmith, &censoring, &opts).unwrap();

        // freezing a at the unconstrained optimum changes nothing material
        let warm = FitOptions { start: Some(full.params.clone()), ..Default::default() };
        let at_hat = fit_constrained(
            &data,
            &sites,
            ModelSpec::MmTegISmith,
            &censoring,
            full.a_hat().unwrap(),
            &warm,
        )
        .unwrap();
        assert!(
            (at_hat.logpl - full.logpl).abs() < 1e-4 * full.logpl.abs().max(1.0),
            "{} vs {}",
            at_hat.logpl,
            full.logpl
        );

        // nesting: constrained ≤ unconstrained (+ tolerance)
        for a0 in [0.2, 0.8, 0.01] {
            let c = fit_constrained(&data, &sites, ModelSpec::MmTegISmith, &censoring, a0, &warm)
                .unwrap();
            assert!(c.logpl <= full.logpl + 1e-6, "a0={a0}: {} vs {}", c.logpl, full.logpl);
            assert_eq!(c.constrained_a, Some(a0));
            assert!((c.params[0] - a0).abs() < 1e-12);
        }
    }

    #[test]
    fn constrained_requires_mixture_model() {
        let sites = sample_sites_uniform(5, 1.0, 2).unwrap();
        let data = simulate_mm(&sites, ModelSpec::MsTeg, &[0.2, 0.3], 40, 1, None).unwrap();
        let err = fit_constrained(
            &data,
            &sites,
            ModelSpec::MsTeg,
            &CensoringConfig::default(),
            0.5,
            &FitOptions::default(),
        );
        assert!(err.is_err());
    }
}
