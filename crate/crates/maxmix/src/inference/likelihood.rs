//! Evaluation of the censored pairwise log-likelihood.

use super::censor::{CensorScheme, PreparedPair, PreparedPairs};
use crate::error::{Error, Result};
use crate::model::spec::ModelSpec;
use rayon::prelude::*;

/// Value of the pairwise log-likelihood plus bookkeeping about skipped
/// contributions (non-finite terms are counted, never silently summed).
#[derive(Clone, Copy, Debug)]
pub struct Loglik {
    pub value: f64,
    pub contributions: usize,
    pub skipped: usize,
}

/// Censored pairwise log-likelihood of `params` under `spec`.
///
/// Pairs are evaluated independently (possibly in parallel) and reduced in
/// fixed pair order, so the value does not depend on the worker count.
/// Fails if the parameters are outside their domain or every contribution
/// was skipped.
pub fn pairwise_loglik(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    params: &[f64],
) -> Result<Loglik> {
    let (_, total) = pairwise_loglik_by_pair(prepared, spec, params)?;
    Ok(total)
}

/// Per-pair contributions in fixed pair order, plus their total.
///
/// The breakdown feeds the score-based sensitivity estimate: every pair term
/// is a valid likelihood of its own, so per-pair score outer products
/// estimate H without second derivatives.
pub fn pairwise_loglik_by_pair(
    prepared: &PreparedPairs,
    spec: ModelSpec,
    params: &[f64],
) -> Result<(Vec<f64>, Loglik)> {
    spec.validate(params)?;
    let per_pair: Vec<Result<(f64, usize, usize)>> = prepared
        .pairs
        .par_iter()
        .map(|pair| pair_contribution(pair, prepared.scheme, spec, params))
        .collect();
    let mut values = Vec::with_capacity(per_pair.len());
    let mut value = 0.0;
    let mut contributions = 0usize;
    let mut skipped = 0usize;
    for r in per_pair {
        let (v, c, s) = r?;
        values.push(v);
        value += v;
        contributions += c;
        skipped += s;
    }
    if contributions == 0 {
        return Err(Error::numeric(
            "all pairwise contributions were skipped as non-finite",
        ));
    }
    Ok((values, Loglik { value, contributions, skipped }))
}

fn pair_contribution(
    pair: &PreparedPair,
    scheme: CensorScheme,
    spec: ModelSpec,
    params: &[f64],
) -> Result<(f64, usize, usize)> {
    let model = spec.pair_model(params, pair.h)?;
    let mut value = 0.0;
    let mut contributions = 0usize;
    let mut skipped = 0usize;

    if pair.n_both_below > 0 {
        let lc = model.cdf(pair.u1, pair.u2)?.ln();
        if lc.is_finite() {
            value += pair.n_both_below as f64 * lc;
            contributions += pair.n_both_below;
        } else {
            skipped += pair.n_both_below;
        }
    }
    for &(z1, z2) in &pair.full {
        match model.log_density(z1, z2) {
            Ok(ld) => {
                value += ld;
                contributions += 1;
            }
            Err(Error::Domain(e)) => return Err(Error::Domain(e)),
            Err(_) => skipped += 1,
        }
    }
    if scheme == CensorScheme::FourCase {
        for &z1 in &pair.exceed_1 {
            match model.parts(z1, pair.u2) {
                Ok(p) if p.d1 > 0.0 && p.d1.ln().is_finite() => {
                    value += p.d1.ln();
                    contributions += 1;
                }
                Err(Error::Domain(e)) => return Err(Error::Domain(e)),
                _ => skipped += 1,
            }
        }
        for &z2 in &pair.exceed_2 {
            match model.parts(pair.u1, z2) {
                Ok(p) if p.d2 > 0.0 && p.d2.ln().is_finite() => {
                    value += p.d2.ln();
                    contributions += 1;
                }
                Err(Error::Domain(e)) => return Err(Error::Domain(e)),
                _ => skipped += 1,
            }
        }
    }
    Ok((value, contributions, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::censor::{CensoringConfig, ThresholdMode};
    use crate::sim::{DataMatrix, Scale, SiteSet};

    fn config_fixed(u: f64, scheme: CensorScheme) -> CensoringConfig {
        CensoringConfig {
            threshold: ThresholdMode::FixedFrechet(u),
            scheme,
            delta: f64::INFINITY,
        }
    }

    #[test]
    fn single_pair_single_replicate_matches_contribution() {
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.3, 0.0]]).unwrap();
        let params = [0.4, 0.2, 0.3, 0.6, 0.8];
        let spec = ModelSpec::MmTegITeg;

        // both below the threshold: contribution is log G(u, u)
        let below = DataMatrix::new(vec![0.5, 0.9], 1, 2, Scale::Frechet).unwrap();
        let prep =
            PreparedPairs::new(&below, &sites, &config_fixed(5.0, CensorScheme::TwoCase)).unwrap();
        let ll = pairwise_loglik(&prep, spec, &params).unwrap();
        let model = spec.pair_model(&params, sites.distance(0, 1)).unwrap();
        let want = model.cdf(5.0, 5.0).unwrap().ln();
        assert!((ll.value - want).abs() < 1e-14);

        // one above: contribution is the log density at the observation
        let above = DataMatrix::new(vec![7.0, 0.9], 1, 2, Scale::Frechet).unwrap();
        let prep =
            PreparedPairs::new(&above, &sites, &config_fixed(5.0, CensorScheme::TwoCase)).unwrap();
        let ll = pairwise_loglik(&prep, spec, &params).unwrap();
        let want = model.log_density(7.0, 0.9).unwrap();
        assert!((ll.value - want).abs() < 1e-14);
    }

    #[test]
    fn branch_selection_not_continuity() {
        // the two branches generally disagree at the boundary; assert only
        // that the rule picks the censored branch at equality
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.3, 0.0]]).unwrap();
        let u = 5.0;
        let data = DataMatrix::new(vec![u, u], 1, 2, Scale::Frechet).unwrap();
        let prep =
            PreparedPairs::new(&data, &sites, &config_fixed(u, CensorScheme::TwoCase)).unwrap();
        assert_eq!(prep.pairs[0].n_both_below, 1);
        assert!(prep.pairs[0].full.is_empty());
    }

    #[test]
    fn four_case_single_exceedance_matches_cdf_derivative() {
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.25, 0.0]]).unwrap();
        let spec = ModelSpec::MmTegITeg;
        let params = [0.5, 0.15, 0.3, 0.7, 1.0];
        let u = 2.0;
        let z1 = 6.0;
        let data = DataMatrix::new(vec![z1, 1.0], 1, 2, Scale::Frechet).unwrap();
        let prep =
            PreparedPairs::new(&data, &sites, &config_fixed(u, CensorScheme::FourCase)).unwrap();
        let ll = pairwise_loglik(&prep, spec, &params).unwrap();
        // finite-difference derivative of G in the uncensored coordinate
        let model = spec.pair_model(&params, sites.distance(0, 1)).unwrap();
        let h = 1e-5 * z1;
        let fd = (model.cdf(z1 + h, u).unwrap() - model.cdf(z1 - h, u).unwrap()) / (2.0 * h);
        assert!(
            (ll.value - fd.ln()).abs() < 1e-4 * fd.ln().abs(),
            "{} vs {}",
            ll.value,
            fd.ln()
        );
    }

    #[test]
    fn toy_dataset_matches_brute_force() {
        // 3 sites, 2 replicates, hand-summed oracle over all branches
        let sites =
            SiteSet::from_planar(vec![[0.0, 0.0], [0.4, 0.0], [0.0, 0.7]]).unwrap();
        let data = DataMatrix::new(
            vec![0.8, 6.0, 1.2, 2.5, 0.3, 9.0],
            2,
            3,
            Scale::Frechet,
        )
        .unwrap();
        let spec = ModelSpec::MmTegISmith;
        let params = [0.3, 0.2, 0.35, 0.9];
        let u = 2.0;
        let prep =
            PreparedPairs::new(&data, &sites, &config_fixed(u, CensorScheme::TwoCase)).unwrap();
        let ll = pairwise_loglik(&prep, spec, &params).unwrap();

        let mut oracle = 0.0;
        for rep in 0..2 {
            for (i, j, h) in sites.pairs() {
                let model = spec.pair_model(&params, h).unwrap();
                let (z1, z2) = (data.get(rep, i), data.get(rep, j));
                oracle += if z1 <= u && z2 <= u {
                    model.cdf(u, u).unwrap().ln()
                } else {
                    model.log_density(z1, z2).unwrap()
                };
            }
        }
        assert!((ll.value - oracle).abs() < 1e-10, "{} vs {oracle}", ll.value);
        assert_eq!(ll.contributions, 6);
        assert_eq!(ll.skipped, 0);
    }

    #[test]
    fn rejects_invalid_parameters() {
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.3, 0.0]]).unwrap();
        let data = DataMatrix::new(vec![1.0, 1.0], 1, 2, Scale::Frechet).unwrap();
        let prep =
            PreparedPairs::new(&data, &sites, &config_fixed(5.0, CensorScheme::TwoCase)).unwrap();
        assert!(pairwise_loglik(&prep, ModelSpec::MsTeg, &[-0.1, 0.2]).is_err());
    }
}
