//! Closed-form bivariate laws for spatial extremes.
//!
//! A simple max-stable (MS) pair has distribution `G(z1, z2) = exp{-V(z1, z2)}`
//! where the exponent measure `V` is homogeneous of order −1 and satisfies
//! `V(z, ∞) = 1/z`. Two MS families are implemented:
//!
//! - **Smith** (storm profile): `V` built from the standard normal CDF with
//!   lag parameter `γ(h) = h/φ`.
//! - **TEG** (truncated extremal Gaussian): `V` built from a Gaussian
//!   correlation `ρ(h)` and a disk-overlap fraction `α(h)`.
//!
//! From an MS parent, the inverted max-stable (IMS) construction
//! `Y = -1/log{1 - exp(-1/X)}` gives an asymptotically independent process
//! with unit Fréchet margins, and the max-mixture (MM) process
//! `Z = max{aX, (1-a)Y}` combines both regimes through the mixing
//! coefficient `a ∈ [0, 1]`.

pub mod dependence;
pub mod inverted;
pub mod mixture;
pub mod smith;
pub mod spec;
pub mod teg;

pub use dependence::{alpha_disk, chi_from_theta, exp_correlation, DependenceSummary};
pub use inverted::{ims_bivariate_cdf, ims_bivariate_density, ims_parts, omega};
pub use mixture::{mm_bivariate_cdf, mm_parts, BivariateParts, PairModel};
pub use spec::{MixtureParams, ModelSpec, Transform};

use crate::error::{Error, Result};

/// Exponent measure value and its first/second partial derivatives at a point.
#[derive(Clone, Copy, Debug)]
pub struct VPartials {
    pub v: f64,
    /// ∂V/∂z1 (nonpositive).
    pub v1: f64,
    /// ∂V/∂z2 (nonpositive).
    pub v2: f64,
    /// ∂²V/∂z1∂z2.
    pub v12: f64,
}

/// A bivariate max-stable law at one spatial lag, reduced to the quantities
/// the exponent measure needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MsFamily {
    /// Smith storm-profile law with `gamma = γ(h) ≥ 0`.
    Smith { gamma: f64 },
    /// TEG law with correlation `rho = ρ(h) ∈ (−1, 1]` and disk fraction
    /// `alpha = α(h) ∈ [0, 1]`.
    Teg { rho: f64, alpha: f64 },
}

impl MsFamily {
    /// Exponent measure V(z1, z2).
    pub fn v(&self, z1: f64, z2: f64) -> Result<f64> {
        match *self {
            MsFamily::Smith { gamma } => smith::smith_v(z1, z2, gamma),
            MsFamily::Teg { rho, alpha } => teg::teg_v(z1, z2, rho, alpha),
        }
    }

    /// V together with its analytic partial derivatives.
    pub fn v_partials(&self, z1: f64, z2: f64) -> Result<VPartials> {
        match *self {
            MsFamily::Smith { gamma } => smith::smith_v_partials(z1, z2, gamma),
            MsFamily::Teg { rho, alpha } => teg::teg_v_partials(z1, z2, rho, alpha),
        }
    }

    /// Pairwise extremal coefficient θ = V(1, 1) ∈ [1, 2].
    pub fn theta(&self) -> f64 {
        match *self {
            MsFamily::Smith { gamma } => smith::smith_theta(gamma),
            MsFamily::Teg { rho, alpha } => teg::teg_theta(rho, alpha),
        }
    }

    /// Bivariate MS distribution function exp{-V(z1, z2)}.
    pub fn cdf(&self, z1: f64, z2: f64) -> Result<f64> {
        Ok((-self.v(z1, z2)?).exp())
    }

    /// Bivariate MS density (V1·V2 − V12)·exp{−V}.
    pub fn density(&self, z1: f64, z2: f64) -> Result<f64> {
        let p = self.v_partials(z1, z2)?;
        let lead = p.v1 * p.v2 - p.v12;
        if lead < -1e-10 {
            return Err(Error::numeric(format!(
                "negative MS density factor {lead:.3e} at ({z1}, {z2})"
            )));
        }
        Ok(lead.max(0.0) * (-p.v).exp())
    }
}

pub(crate) fn check_frechet_args(z1: f64, z2: f64) -> Result<()> {
    if !(z1 > 0.0) || !(z2 > 0.0) {
        return Err(Error::domain(format!(
            "Fréchet-scale arguments must be > 0, got ({z1}, {z2})"
        )));
    }
    Ok(())
}
