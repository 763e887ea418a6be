//! Truncated extremal Gaussian (TEG) model.
//!
//! With `S = z1 + z2`, `P = z1 z2`, `c = 2(ρ+1)` and radicand
//! `q = 1 − cP/S²`:
//!
//! ```text
//! V(z1, z2) = (1/z1 + 1/z2) · B,   B = 1 − (α/2)(1 − √q)
//! θ(h)      = 2 − α(h){1 − √((1 − ρ(h))/2)}
//! ```
//!
//! For valid inputs `q ≥ (1−ρ)/2 ≥ 0`; rounding can push it a hair below
//! zero, which is clamped (and rejected when the defect exceeds 1e−12).
//! The partial derivatives below are exact differentiations of `V`:
//!
//! ```text
//! ∂q/∂z1 = −c z2 (z2 − z1)/S³,   ∂²q/∂z1∂z2 = c (S² − 6P)/S⁴
//! ∂B/∂z1 = (α/4) q1/√q
//! ∂²B/∂z1∂z2 = (α/2){q12/(2√q) − q1 q2/(4 q^{3/2})}
//! ∂V/∂z1 = −B/z1² + (1/z1 + 1/z2) ∂B/∂z1
//! ∂²V/∂z1∂z2 = −B2/z1² − B1/z2² + (1/z1 + 1/z2) ∂²B/∂z1∂z2
//! ```

use super::{check_frechet_args, VPartials};
use crate::error::{Error, Result};

fn check_law(rho: f64, alpha: f64) -> Result<()> {
    if !(rho > -1.0 && rho <= 1.0) {
        return Err(Error::domain(format!("TEG rho must lie in (-1, 1], got {rho}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("TEG alpha must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn radicand(z1: f64, z2: f64, rho: f64) -> Result<f64> {
    let s = z1 + z2;
    let q = 1.0 - 2.0 * (rho + 1.0) * z1 * z2 / (s * s);
    if q < -1e-12 {
        return Err(Error::numeric(format!(
            "TEG radicand {q:.3e} below tolerance at ({z1}, {z2}), rho={rho}"
        )));
    }
    Ok(q.max(0.0))
}

/// TEG exponent measure V(z1, z2; ρ, α).
pub fn teg_v(z1: f64, z2: f64, rho: f64, alpha: f64) -> Result<f64> {
    check_frechet_args(z1, z2)?;
    check_law(rho, alpha)?;
    let q = radicand(z1, z2, rho)?;
    let b = 1.0 - 0.5 * alpha * (1.0 - q.sqrt());
    Ok((1.0 / z1 + 1.0 / z2) * b)
}

/// V and its partial derivatives. Requires a strictly positive radicand.
pub fn teg_v_partials(z1: f64, z2: f64, rho: f64, alpha: f64) -> Result<VPartials> {
    check_frechet_args(z1, z2)?;
    check_law(rho, alpha)?;
    let q = radicand(z1, z2, rho)?;
    if q < 1e-14 {
        // rho = 1 with z1 = z2: complete dependence, derivative blows up
        return Err(Error::domain(
            "TEG partial derivatives degenerate at radicand 0 (complete dependence)",
        ));
    }
    let s = z1 + z2;
    let p = z1 * z2;
    let c = 2.0 * (rho + 1.0);
    let sq = q.sqrt();
    let s3 = s * s * s;
    let q1 = -c * z2 * (z2 - z1) / s3;
    let q2 = -c * z1 * (z1 - z2) / s3;
    let q12 = c * (s * s - 6.0 * p) / (s3 * s);
    let b = 1.0 - 0.5 * alpha * (1.0 - sq);
    let b1 = 0.25 * alpha * q1 / sq;
    let b2 = 0.25 * alpha * q2 / sq;
    let b12 = 0.5 * alpha * (q12 / (2.0 * sq) - q1 * q2 / (4.0 * q * sq));
    let sum_inv = 1.0 / z1 + 1.0 / z2;
    let v = sum_inv * b;
    let v1 = -b / (z1 * z1) + sum_inv * b1;
    let v2 = -b / (z2 * z2) + sum_inv * b2;
    let v12 = -b2 / (z1 * z1) - b1 / (z2 * z2) + sum_inv * b12;
    Ok(VPartials { v, v1, v2, v12 })
}

/// Extremal coefficient θ = 2 − α{1 − √((1 − ρ)/2)}.
pub fn teg_theta(rho: f64, alpha: f64) -> f64 {
    2.0 - alpha * (1.0 - (0.5 * (1.0 - rho)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::{fd_partials, rel_err};

    #[test]
    fn independence_when_alpha_zero() {
        let v = teg_v(1.0, 1.0, 0.3, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn complete_dependence_at_rho_one_alpha_one() {
        // θ(0) = 1 when ρ = 1, α = 1
        let v = teg_v(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_value() {
        // V(1,1;ρ=0,α=1) = 2[1 − ½(1 − √½)] = 1 + √½
        let v = teg_v(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((v - 1.707_106_781_186_547_5).abs() < 1e-14);
        assert!((v - teg_theta(0.0, 1.0)).abs() < 1e-14);
    }

    #[test]
    fn partials_match_finite_differences() {
        let (rho, alpha) = (0.6, 0.8);
        let p = teg_v_partials(2.0, 0.5, rho, alpha).unwrap();
        let (d1, d2, d12) = fd_partials(|a, b| teg_v(a, b, rho, alpha).unwrap(), 2.0, 0.5);
        assert!(rel_err(p.v1, d1) < 1e-5, "{} vs {}", p.v1, d1);
        assert!(rel_err(p.v2, d2) < 1e-5, "{} vs {}", p.v2, d2);
        assert!(rel_err(p.v12, d12) < 1e-4, "{} vs {}", p.v12, d12);
    }

    #[test]
    fn partial_homogeneity_order_minus_two() {
        let t = 0.4;
        let p = teg_v_partials(1.0, 2.0, 0.3, 0.7).unwrap();
        let pt = teg_v_partials(t * 1.0, t * 2.0, 0.3, 0.7).unwrap();
        assert!(rel_err(pt.v1, p.v1 / (t * t)) < 1e-12);
        assert!(rel_err(pt.v12, p.v12 / (t * t * t)) < 1e-12);
    }

    #[test]
    fn rejects_bad_law() {
        assert!(teg_v(1.0, 1.0, -1.0, 0.5).is_err());
        assert!(teg_v(1.0, 1.0, 1.2, 0.5).is_err());
        assert!(teg_v(1.0, 1.0, 0.5, 1.3).is_err());
        assert!(teg_v_partials(1.0, 1.0, 1.0, 1.0).is_err());
    }
}
