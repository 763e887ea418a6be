//! Lag-dependent ingredients of the bivariate laws and dependence summaries.

use crate::error::{Error, Result};

/// Exponential correlation ρ(h) = exp(−h/φ).
pub fn exp_correlation(h: f64, phi: f64) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(Error::domain(format!("correlation range must be > 0, got {phi}")));
    }
    if !(h >= 0.0) {
        return Err(Error::domain(format!("distance must be >= 0, got {h}")));
    }
    Ok((-h / phi).exp())
}

/// Disk-overlap fraction α(h) = (1 − h/2r)·1\[0 ≤ h ≤ 2r\].
pub fn alpha_disk(h: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("disk radius must be > 0, got {r}")));
    }
    if !(h >= 0.0) {
        return Err(Error::domain(format!("distance must be >= 0, got {h}")));
    }
    Ok(if h <= 2.0 * r { 1.0 - h / (2.0 * r) } else { 0.0 })
}

/// χ = 2 − θ, the tail-dependence coefficient of an MS pair.
pub fn chi_from_theta(theta: f64) -> f64 {
    2.0 - theta
}

/// Pairwise dependence summary of an MS law at one lag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DependenceSummary {
    /// Extremal coefficient θ ∈ [1, 2].
    pub theta: f64,
    /// Tail dependence χ = 2 − θ ∈ [0, 1].
    pub chi: f64,
}

impl DependenceSummary {
    pub fn from_theta(theta: f64) -> Self {
        DependenceSummary { theta, chi: chi_from_theta(theta) }
    }
}
