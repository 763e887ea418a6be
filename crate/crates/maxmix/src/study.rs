//! The simulate → fit → Godambe → test pipeline for one power-study
//! replicate, shared by the command-line driver and the verification suite.
//!
//! Seeds are derived from the master seed and the replicate index, so a
//! study can be resumed or re-aggregated replicate by replicate with
//! identical results.

use crate::error::Result;
use crate::hypothesis::{self, TestKind, TestReport};
use crate::inference::censor::{CensoringConfig, PreparedPairs};
use crate::inference::fit::{fit_constrained_prepared, fit_model_prepared, FitOptions, FitResult};
use crate::model::spec::ModelSpec;
use crate::sim::{sample_sites_uniform, simulate_mm, SiteSet};
use crate::uncertainty::{estimate_godambe_mc, GodambeEstimate};
use crate::util::mix_seed;

const SALT_SITES: u64 = 0xA1;
const SALT_DATA: u64 = 0xB2;
const SALT_GODAMBE: u64 = 0xC3;

/// Configuration of one power-study run.
#[derive(Clone, Debug)]
pub struct StudyConfig {
    /// Model the data is simulated from.
    pub true_spec: ModelSpec,
    pub true_params: Vec<f64>,
    /// Model fitted to each replicate (usually a mixture class).
    pub fit_spec: ModelSpec,
    pub k_sites: usize,
    pub n_copies: usize,
    pub square_side: f64,
    pub censoring: CensoringConfig,
    /// Monte-Carlo draws for the Godambe estimate.
    pub m_godambe: usize,
    /// Null values to test.
    pub a0_grid: Vec<f64>,
    /// Also run the LR test (needs one constrained fit per a₀).
    pub run_lr: bool,
    pub seed: u64,
    /// Storm cap forwarded to the simulators.
    pub accuracy: Option<usize>,
    /// Reuse one site sample for every replicate instead of resampling.
    pub fixed_sites: bool,
}

/// Everything produced for one replicate.
#[derive(Clone, Debug)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub fit: FitResult,
    pub godambe: GodambeEstimate,
    /// Variance of â on the natural scale.
    pub var_a: f64,
    /// (G⁻¹)_aa and (H⁻¹)_aa on the transformed scale.
    pub g_aa: f64,
    pub h_aa: f64,
    pub tests: Vec<TestReport>,
}

/// Run one replicate end to end; results depend only on (config, replicate).
pub fn run_replicate(cfg: &StudyConfig, replicate: usize) -> Result<ReplicateOutcome> {
    let site_seed = if cfg.fixed_sites {
        mix_seed(cfg.seed, SALT_SITES)
    } else {
        mix_seed(mix_seed(cfg.seed, SALT_SITES), replicate as u64)
    };
    let sites = sample_sites_uniform(cfg.k_sites, cfg.square_side, site_seed)?;
    run_replicate_on_sites(cfg, replicate, &sites)
}

/// Same pipeline with externally supplied sites.
pub fn run_replicate_on_sites(
    cfg: &StudyConfig,
    replicate: usize,
    sites: &SiteSet,
) -> Result<ReplicateOutcome> {
    let data_seed = mix_seed(mix_seed(cfg.seed, SALT_DATA), replicate as u64);
    let data = simulate_mm(
        sites,
        cfg.true_spec,
        &cfg.true_params,
        cfg.n_copies,
        data_seed,
        cfg.accuracy,
    )?;
    let prepared = PreparedPairs::new(&data, sites, &cfg.censoring)?;
    let start = cfg.fit_spec.default_start(sites.median_pairwise_distance());
    let fit = fit_model_prepared(
        &prepared,
        cfg.fit_spec,
        &cfg.censoring,
        &start,
        &FitOptions::default().optimizer,
    )?;
    let godambe_seed = mix_seed(mix_seed(cfg.seed, SALT_GODAMBE), replicate as u64);
    let godambe =
        estimate_godambe_mc(&fit, sites, &cfg.censoring, cfg.m_godambe, godambe_seed, cfg.accuracy)?;
    let var_a = godambe
        .var_a_natural()
        .ok_or_else(|| crate::error::Error::domain("fit model has no mixing coefficient"))?;
    let (g_aa, h_aa) = godambe.submatrix_a()?;
    let a_hat = fit.a_hat().expect("mixture fit has a");

    let mut tests = Vec::new();
    for &raw_a0 in &cfg.a0_grid {
        let (a0, warned) = hypothesis::boundary_adjust(raw_a0);
        let provenance = format!(
            "replicate={replicate} m={} seed={} scaling=total{}",
            cfg.m_godambe,
            cfg.seed,
            if warned { " boundary-adjusted" } else { "" }
        );
        let mut z = hypothesis::z_test(a_hat, a0, var_a)?;
        z.provenance = provenance.clone();
        tests.push(z);
        if cfg.run_lr {
            let constrained = fit_constrained_prepared(
                &prepared,
                cfg.fit_spec,
                &cfg.censoring,
                a0,
                &FitOptions { start: Some(fit.params.clone()), ..Default::default() },
            )?;
            // nesting can be violated by a hair when the unconstrained
            // optimizer stopped early; clamp rather than fail
            let full_logpl = fit.logpl.max(constrained.logpl);
            let mut lr = hypothesis::lr_test(full_logpl, constrained.logpl, h_aa, g_aa)?;
            lr.a0 = Some(a0);
            lr.provenance = provenance;
            tests.push(lr);
        }
    }

    Ok(ReplicateOutcome { replicate, fit, godambe, var_a, g_aa, h_aa, tests })
}

/// Empirical rejection rates per (a₀, α, statistic) over replicates.
pub fn aggregate_rejections(
    outcomes: &[ReplicateOutcome],
) -> Vec<(f64, f64, TestKind, usize, usize)> {
    let mut rows: Vec<(f64, f64, TestKind, usize, usize)> = Vec::new();
    for o in outcomes {
        for t in &o.tests {
            let a0 = t.a0.unwrap_or(f64::NAN);
            for &(alpha, reject) in &t.decisions {
                match rows.iter_mut().find(|(a, al, k, _, _)| {
                    *a == a0 && *al == alpha && *k == t.kind
                }) {
                    Some(row) => {
                        row.3 += reject as usize;
                        row.4 += 1;
                    }
                    None => rows.push((a0, alpha, t.kind, reject as usize, 1)),
                }
            }
        }
    }
    rows.sort_by(|a, b| {
        (a.0, a.1, a.2.name()).partial_cmp(&(b.0, b.1, b.2.name())).unwrap()
    });
    rows
}
