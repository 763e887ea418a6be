//! Smith storm-profile model.
//!
//! With `w = γ/2 + log(z2/z1)/γ` and `v = γ − w`:
//!
//! ```text
//! V(z1, z2)  = Φ(w)/z1 + Φ(v)/z2
//! ∂V/∂z1     = −Φ(w)/z1² − φ(w)/(γ z1²) + φ(v)/(γ z1 z2)
//! ∂²V/∂z1∂z2 = −[v φ(w)/(γ² z1² z2) + w φ(v)/(γ² z1 z2²)]
//! θ(h)       = 2 Φ{γ(h)/2}
//! ```
//!
//! `γ = 0` is the complete-dependence limit and is handled explicitly:
//! `V = 1/min(z1, z2)`, a distribution singular along the diagonal with no
//! meaningful partial derivatives.

use super::{check_frechet_args, VPartials};
use crate::error::{Error, Result};
use crate::util::{norm_cdf, norm_pdf};

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(Error::domain(format!("Smith gamma must be >= 0, got {gamma}")));
    }
    Ok(())
}

/// Smith exponent measure V(z1, z2; γ).
pub fn smith_v(z1: f64, z2: f64, gamma: f64) -> Result<f64> {
    check_frechet_args(z1, z2)?;
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(1.0 / z1.min(z2));
    }
    let w = 0.5 * gamma + (z2 / z1).ln() / gamma;
    let v = gamma - w;
    Ok(norm_cdf(w) / z1 + norm_cdf(v) / z2)
}

/// V and its partial derivatives. Requires γ > 0.
pub fn smith_v_partials(z1: f64, z2: f64, gamma: f64) -> Result<VPartials> {
    check_frechet_args(z1, z2)?;
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Err(Error::domain(
            "Smith partial derivatives are undefined at gamma = 0 (complete dependence)",
        ));
    }
    let w = 0.5 * gamma + (z2 / z1).ln() / gamma;
    let v = gamma - w;
    let (pw, pv) = (norm_pdf(w), norm_pdf(v));
    let (cw, cv) = (norm_cdf(w), norm_cdf(v));
    let g2 = gamma * gamma;
    let value = cw / z1 + cv / z2;
    let v1 = -cw / (z1 * z1) - pw / (gamma * z1 * z1) + pv / (gamma * z1 * z2);
    let v2 = -cv / (z2 * z2) - pv / (gamma * z2 * z2) + pw / (gamma * z1 * z2);
    let v12 = -(v * pw / (g2 * z1 * z1 * z2) + w * pv / (g2 * z1 * z2 * z2));
    Ok(VPartials { v: value, v1, v2, v12 })
}

/// Extremal coefficient θ = 2Φ(γ/2).
pub fn smith_theta(gamma: f64) -> f64 {
    2.0 * norm_cdf(0.5 * gamma)
}
