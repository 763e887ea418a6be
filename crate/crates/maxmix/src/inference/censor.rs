//! Censoring configuration and the prepared per-pair data layout.
//!
//! Preparation classifies every (pair, replicate) once: likelihood
//! evaluations then loop over exceedance lists and multiply the shared
//! below-threshold CDF term by its count, which is where almost all of the
//! optimizer's time would otherwise go.

use crate::error::{Error, Result};
use crate::sim::{DataMatrix, Scale, SiteSet};
use crate::util::quantile;

/// How the per-site censoring thresholds are chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdMode {
    /// Per-site empirical quantile at probability p ∈ (0, 1).
    EmpiricalQuantile(f64),
    /// One fixed Fréchet-scale threshold u > 0 for every site.
    FixedFrechet(f64),
}

/// Censored-contribution scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CensorScheme {
    /// Both-below → G(u1, u2); otherwise the full density.
    #[default]
    TwoCase,
    /// Additionally uses ∂G/∂z1 and ∂G/∂z2 for single exceedances.
    FourCase,
}

/// Threshold mode, scheme and distance cutoff δ for the pair weights
/// ω_{jj′} = 1{h ≤ δ}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CensoringConfig {
    pub threshold: ThresholdMode,
    pub scheme: CensorScheme,
    pub delta: f64,
}

impl Default for CensoringConfig {
    fn default() -> Self {
        CensoringConfig {
            threshold: ThresholdMode::EmpiricalQuantile(0.9),
            scheme: CensorScheme::TwoCase,
            delta: f64::INFINITY,
        }
    }
}

impl CensoringConfig {
    pub fn validate(&self) -> Result<()> {
        match self.threshold {
            ThresholdMode::EmpiricalQuantile(p) => {
                if !(0.0 < p && p < 1.0) {
                    return Err(Error::domain(format!("quantile must lie in (0,1), got {p}")));
                }
            }
            ThresholdMode::FixedFrechet(u) => {
                if !(u > 0.0) {
                    return Err(Error::domain(format!("threshold must be > 0, got {u}")));
                }
            }
        }
        if !(self.delta > 0.0) {
            return Err(Error::domain(format!("delta must be > 0, got {}", self.delta)));
        }
        Ok(())
    }
}

/// One contributing pair with its replicates classified against the
/// thresholds. Replicates with a missing value in either column are dropped
/// from the pair (never the whole replicate row).
#[derive(Clone, Debug)]
pub struct PreparedPair {
    pub site_i: usize,
    pub site_j: usize,
    pub h: f64,
    pub u1: f64,
    pub u2: f64,
    /// count of replicates with z1 ≤ u1 and z2 ≤ u2
    pub n_both_below: usize,
    /// replicates entering through the full density
    pub full: Vec<(f64, f64)>,
    /// four-case only: z1 values with z1 > u1, z2 ≤ u2
    pub exceed_1: Vec<f64>,
    /// four-case only: z2 values with z1 ≤ u1, z2 > u2
    pub exceed_2: Vec<f64>,
}

/// All contributing pairs of a dataset under one censoring configuration.
#[derive(Clone, Debug)]
pub struct PreparedPairs {
    pub pairs: Vec<PreparedPair>,
    pub scheme: CensorScheme,
    pub n_replicates: usize,
    pub n_missing_dropped: usize,
}

impl PreparedPairs {
    pub fn new(data: &DataMatrix, sites: &SiteSet, config: &CensoringConfig) -> Result<Self> {
        config.validate()?;
        if data.scale() != Scale::Frechet {
            return Err(Error::data(
                "pairwise likelihood requires Fréchet-scale data (run the GEV transform first)",
            ));
        }
        if data.n_sites() != sites.len() {
            return Err(Error::data(format!(
                "data has {} sites but the site set has {}",
                data.n_sites(),
                sites.len()
            )));
        }
        let thresholds: Vec<f64> = match config.threshold {
            ThresholdMode::FixedFrechet(u) => vec![u; sites.len()],
            ThresholdMode::EmpiricalQuantile(p) => (0..sites.len())
                .map(|s| {
                    quantile(&data.column(s), p).ok_or_else(|| {
                        Error::data(format!("site {s} has no finite values for the threshold"))
                    })
                })
                .collect::<Result<_>>()?,
        };
        let mut pairs = Vec::new();
        let mut dropped = 0usize;
        for (i, j, h) in sites.pairs() {
            if h > config.delta {
                continue;
            }
            let (u1, u2) = (thresholds[i], thresholds[j]);
            let mut pair = PreparedPair {
                site_i: i,
                site_j: j,
                h,
                u1,
                u2,
                n_both_below: 0,
                full: Vec::new(),
                exceed_1: Vec::new(),
                exceed_2: Vec::new(),
            };
            for rep in 0..data.n_replicates() {
                let z1 = data.get(rep, i);
                let z2 = data.get(rep, j);
                if !z1.is_finite() || !z2.is_finite() {
                    dropped += 1;
                    continue;
                }
                let b1 = z1 <= u1;
                let b2 = z2 <= u2;
                match (config.scheme, b1, b2) {
                    (_, true, true) => pair.n_both_below += 1,
                    (CensorScheme::TwoCase, _, _) => pair.full.push((z1, z2)),
                    (CensorScheme::FourCase, false, true) => pair.exceed_1.push(z1),
                    (CensorScheme::FourCase, true, false) => pair.exceed_2.push(z2),
                    (CensorScheme::FourCase, false, false) => pair.full.push((z1, z2)),
                }
            }
            pairs.push(pair);
        }
        if pairs.is_empty() {
            return Err(Error::data(format!(
                "no pairs within distance cutoff delta = {}",
                config.delta
            )));
        }
        Ok(PreparedPairs {
            pairs,
            scheme: config.scheme,
            n_replicates: data.n_replicates(),
            n_missing_dropped: dropped,
        })
    }

    /// Number of contributing site pairs.
    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::sites::SiteSet;

    fn toy() -> (DataMatrix, SiteSet) {
        let sites =
            SiteSet::from_planar(vec![[0.0, 0.0], [0.5, 0.0], [0.0, 2.0]]).unwrap();
        let data = DataMatrix::new(
            vec![1.0, 2.0, 3.0, 10.0, 0.5, f64::NAN],
            2,
            3,
            Scale::Frechet,
        )
        .unwrap();
        (data, sites)
    }

    #[test]
    fn classification_two_case() {
        let (data, sites) = toy();
        let config = CensoringConfig {
            threshold: ThresholdMode::FixedFrechet(5.0),
            ..CensoringConfig::default()
        };
        let prep = PreparedPairs::new(&data, &sites, &config).unwrap();
        assert_eq!(prep.n_pairs(), 3);
        // pair (0,1): replicate 0 both below, replicate 1 has z1 = 10 > u
        assert_eq!(prep.pairs[0].n_both_below, 1);
        assert_eq!(prep.pairs[0].full, vec![(10.0, 0.5)]);
        // pairs with site 2 lose replicate 1 to the missing value
        assert_eq!(prep.n_missing_dropped, 2);
    }

    #[test]
    fn classification_four_case() {
        let (data, sites) = toy();
        let config = CensoringConfig {
            threshold: ThresholdMode::FixedFrechet(5.0),
            scheme: CensorScheme::FourCase,
            delta: f64::INFINITY,
        };
        let prep = PreparedPairs::new(&data, &sites, &config).unwrap();
        assert_eq!(prep.pairs[0].exceed_1, vec![10.0]);
        assert!(prep.pairs[0].full.is_empty());
    }

    #[test]
    fn delta_cutoff_reduces_pairs_monotonically() {
        let (data, sites) = toy();
        let mut last = usize::MAX;
        for delta in [10.0, 2.0, 1.0] {
            let config = CensoringConfig {
                threshold: ThresholdMode::FixedFrechet(5.0),
                scheme: CensorScheme::TwoCase,
                delta,
            };
            let n = PreparedPairs::new(&data, &sites, &config).unwrap().n_pairs();
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn no_pairs_is_an_error() {
        let (data, sites) = toy();
        let config = CensoringConfig {
            threshold: ThresholdMode::FixedFrechet(5.0),
            scheme: CensorScheme::TwoCase,
            delta: 0.1,
        };
        assert!(PreparedPairs::new(&data, &sites, &config).is_err());
    }

    #[test]
    fn requires_frechet_scale() {
        let (_, sites) = toy();
        let raw = DataMatrix::new(vec![0.0; 6], 2, 3, Scale::Raw).unwrap();
        let config = CensoringConfig::default();
        assert!(PreparedPairs::new(&raw, &sites, &config).is_err());
    }
}
