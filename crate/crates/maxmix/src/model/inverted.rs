//! Inverted max-stable (IMS) processes.
//!
//! Given a simple MS process `X`, the transform `Y = -1/log{1 - exp(-1/X)}`
//! produces an asymptotically independent process with unit Fréchet margins.
//! Writing `ω(z) = -1/log{1 - exp(-1/z)}` for the same map on scalars, the
//! bivariate law of `Y` is
//!
//! ```text
//! G(z1, z2) = -1 + e^{-1/z1} + e^{-1/z2} + exp{-V[ω(z1), ω(z2)]}
//! ```
//!
//! where `V` is the exponent measure of the parent `X`. The map `ω` is a
//! *decreasing involution* of (0, ∞): ω(ω(z)) = z, with fixed point
//! `1/log 2`, `ω(z) → ∞` as `z → 0⁺` and `ω(z) → 0⁺` as `z → ∞`. In
//! particular ω(z2) → 0 as z2 → ∞, which makes the margins of G unit
//! Fréchet. The density follows by the chain rule,
//!
//! ```text
//! g(z1, z2) = {V1 V2 − V12}(ω1, ω2) · exp{−V(ω1, ω2)} · ω'(z1) ω'(z2)
//! ω'(z)     = −e^{-1/z} ω(z)² / [z² (1 − e^{-1/z})]
//! ```
//!
//! symmetric in (z1, z2); both ω' factors are negative so g ≥ 0. Deep-tail
//! evaluation goes through `expm1`/`log1p` so neither 1 − exp(−1/z) nor its
//! logarithm loses precision.

use super::{check_frechet_args, MsFamily};
use crate::error::{Error, Result};

/// 1/ω(z) = −log(1 − e^{−1/z}), evaluated with a stable complement on each
/// side of e^{−1/z} = 1/2.
#[inline]
fn omega_inv(z: f64) -> f64 {
    let x = 1.0 / z;
    if x > std::f64::consts::LN_2 {
        // e^{-x} < 1/2: log1p keeps the small complement exact
        -(-(-x).exp()).ln_1p()
    } else {
        // 1 - e^{-x} via expm1 avoids cancellation for small x
        -(-(-x).exp_m1()).ln()
    }
}

/// ω(z) = −1/log{1 − exp(−1/z)} for z > 0.
///
/// Capped at 1e300 when e^{−1/z} underflows (z below ~1/745); the cap keeps
/// downstream exponent-measure arithmetic finite with negligible error.
pub fn omega(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("omega argument must be > 0, got {z}")));
    }
    let t = omega_inv(z);
    Ok(if t > 0.0 { (1.0 / t).min(1e300) } else { 1e300 })
}

/// Per-argument pieces reused by the IMS CDF and density.
#[derive(Clone, Copy, Debug)]
struct OmegaParts {
    /// ω(z)
    om: f64,
    /// e^{−1/z}
    e: f64,
    /// ω'(z) < 0
    d: f64,
}

fn omega_parts(z: f64) -> OmegaParts {
    let x = 1.0 / z;
    let e = (-x).exp();
    let m = if x > std::f64::consts::LN_2 { 1.0 - e } else { -(-x).exp_m1() };
    let t = -m.ln();
    let om = if t > 0.0 { (1.0 / t).min(1e300) } else { 1e300 };
    let d = -e * om * om / (z * z * m);
    OmegaParts { om, e, d }
}

/// IMS bivariate distribution function with parent MS law `law_y`.
pub fn ims_bivariate_cdf(z1: f64, z2: f64, law_y: &MsFamily) -> Result<f64> {
    check_frechet_args(z1, z2)?;
    let p1 = omega_parts(z1);
    let p2 = omega_parts(z2);
    let v = law_y.v(p1.om, p2.om)?;
    let g = -1.0 + p1.e + p2.e + (-v).exp();
    Ok(g.clamp(0.0, 1.0))
}

/// CDF, both first partial derivatives, and density of the IMS pair.
#[derive(Clone, Copy, Debug)]
pub struct ImsParts {
    pub cdf: f64,
    pub d1: f64,
    pub d2: f64,
    pub density: f64,
}

/// All IMS quantities in one pass.
pub fn ims_parts(z1: f64, z2: f64, law_y: &MsFamily) -> Result<ImsParts> {
    check_frechet_args(z1, z2)?;
    let p1 = omega_parts(z1);
    let p2 = omega_parts(z2);
    let vp = law_y.v_partials(p1.om, p2.om)?;
    let ev = (-vp.v).exp();
    let cdf = (-1.0 + p1.e + p2.e + ev).clamp(0.0, 1.0);
    let d1 = p1.e / (z1 * z1) - vp.v1 * p1.d * ev;
    let d2 = p2.e / (z2 * z2) - vp.v2 * p2.d * ev;
    let lead = vp.v1 * vp.v2 - vp.v12;
    if lead < -1e-10 {
        return Err(Error::numeric(format!(
            "negative IMS density factor {lead:.3e} at ({z1}, {z2})"
        )));
    }
    let density = lead.max(0.0) * p1.d * p2.d * ev;
    Ok(ImsParts { cdf, d1, d2, density })
}

/// IMS bivariate density.
pub fn ims_bivariate_density(z1: f64, z2: f64, law_y: &MsFamily) -> Result<f64> {
    Ok(ims_parts(z1, z2, law_y)?.density)
}
