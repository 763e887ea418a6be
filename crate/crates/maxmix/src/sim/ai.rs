//! Asymptotically independent processes with unit Fréchet margins.

use super::data::{DataMatrix, Scale};
use super::gaussian::simulate_gaussian_field;
use super::sites::SiteSet;
use crate::error::{Error, Result};
use crate::model::inverted::omega;

/// Invert a max-stable sample elementwise: `Y = −1/log{1 − exp(−1/X)}`.
///
/// The transform is a decreasing involution of (0, ∞), so applying it twice
/// recovers the input; margins stay unit Fréchet.
pub fn invert_ms(data: &DataMatrix) -> Result<DataMatrix> {
    if data.scale() != Scale::Frechet {
        return Err(Error::data("invert_ms expects Fréchet-scale data"));
    }
    data.map(Scale::Frechet, |v| omega(v).unwrap_or(f64::NAN))
}

/// Gaussian-copula AI process: `Y = −1/log Φ(Y′)` with `Y′` a stationary
/// Gaussian field of exponential correlation range `phi`.
pub fn simulate_gaussian_copula_ai(
    sites: &SiteSet,
    phi: f64,
    n: usize,
    seed: u64,
) -> Result<DataMatrix> {
    let field = simulate_gaussian_field(sites, phi, n, seed)?;
    field.map(Scale::Frechet, |g| {
        // log Φ(g) through the survival complement keeps the upper tail exact
        let q = crate::util::norm_sf(g);
        let logphi = (-q).ln_1p();
        if logphi == 0.0 {
            // Φ(g) rounded to 1; push just inside the support
            f64::MAX
        } else {
            (-1.0 / logphi).max(1e-300)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{empirical_chi, ks_unit_frechet};
    use crate::sim::maxstable::simulate_teg;
    use crate::sim::sites::{sample_sites_uniform, SiteSet};

    #[test]
    fn inversion_is_involution_and_keeps_margins() {
        let sites = sample_sites_uniform(4, 2.0, 8).unwrap();
        let x = simulate_teg(&sites, 0.3, 0.4, 3000, 41, None).unwrap();
        let y = invert_ms(&x).unwrap();
        let back = invert_ms(&y).unwrap();
        for (a, b) in x.values().iter().zip(back.values()) {
            assert!((a - b).abs() / a.abs().max(1e-12) < 1e-8, "{a} vs {b}");
        }
        for s in 0..4 {
            assert!(ks_unit_frechet(&y.column(s)) < 0.02);
        }
    }

    #[test]
    fn fixed_point_preserved() {
        let z = 1.0 / std::f64::consts::LN_2;
        let d = DataMatrix::new(vec![z, z], 1, 2, Scale::Frechet).unwrap();
        let y = invert_ms(&d).unwrap();
        assert!((y.get(0, 0) - z).abs() < 1e-12);
    }

    #[test]
    fn copula_margins_and_tail_independence() {
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [0.2, 0.0]]).unwrap();
        let d = simulate_gaussian_copula_ai(&sites, 0.75, 6000, 17).unwrap();
        for s in 0..2 {
            assert!(ks_unit_frechet(&d.column(s)) < 0.02);
        }
        // asymptotic independence: χ̂(u) shrinks as u → 1
        let lo = empirical_chi(&d.column(0), &d.column(1), 0.90).unwrap();
        let hi = empirical_chi(&d.column(0), &d.column(1), 0.99).unwrap();
        assert!(hi < lo, "chi(0.99)={hi} vs chi(0.90)={lo}");
    }

    #[test]
    fn perfect_correlation_is_comonotone() {
        // distance 0 between duplicated sites would break Cholesky; use a
        // tiny separation with a huge range instead
        let sites = SiteSet::from_planar(vec![[0.0, 0.0], [1e-9, 0.0]]).unwrap();
        let d = simulate_gaussian_copula_ai(&sites, 1e6, 200, 3).unwrap();
        for i in 0..200 {
            let (a, b) = (d.get(i, 0), d.get(i, 1));
            assert!((a - b).abs() / a.max(1e-12) < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_non_frechet_input() {
        let d = DataMatrix::new(vec![0.1, 0.2], 1, 2, Scale::Raw).unwrap();
        assert!(invert_ms(&d).is_err());
    }
}
