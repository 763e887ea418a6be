//! Max-mixture (MM) bivariate law and the unified pair-model dispatch.
//!
//! For `Z = max{aX, (1−a)Y}` with independent MS `X` and IMS `Y`,
//!
//! ```text
//! G(z1, z2) = G_X(z1/a, z2/a) · G_Y(z1/(1−a), z2/(1−a))
//! ```
//!
//! and by homogeneity of the MS exponent measure the X factor reduces to
//! `exp{−a V_X(z1, z2)}`. Mixing boundaries switch to the pure component
//! below `a < 1e−10` (resp. `1 − a < 1e−10`) instead of dividing by a
//! vanishing scale.

use super::inverted::ims_parts;
use super::{check_frechet_args, MsFamily};
use crate::error::{Error, Result};

const A_BOUNDARY: f64 = 1e-10;

/// CDF, first partial derivatives and density of a bivariate pair law.
#[derive(Clone, Copy, Debug)]
pub struct BivariateParts {
    pub cdf: f64,
    /// ∂G/∂z1
    pub d1: f64,
    /// ∂G/∂z2
    pub d2: f64,
    /// g = ∂²G/∂z1∂z2
    pub density: f64,
    /// log g computed without the outer exp/log round trip
    pub log_density: f64,
}

/// One pair's bivariate model: pure max-stable, pure inverted max-stable,
/// or a max-mixture of the two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairModel {
    Ms(MsFamily),
    Ims(MsFamily),
    Mix { a: f64, x: MsFamily, y: MsFamily },
}

impl PairModel {
    /// Distribution function G(z1, z2).
    pub fn cdf(&self, z1: f64, z2: f64) -> Result<f64> {
        match self {
            PairModel::Ms(fam) => fam.cdf(z1, z2),
            PairModel::Ims(fam) => super::inverted::ims_bivariate_cdf(z1, z2, fam),
            PairModel::Mix { a, x, y } => mm_bivariate_cdf(z1, z2, *a, x, y),
        }
    }

    /// CDF, partials and density in one pass.
    pub fn parts(&self, z1: f64, z2: f64) -> Result<BivariateParts> {
        match self {
            PairModel::Ms(fam) => {
                let p = fam.v_partials(z1, z2)?;
                let lead = p.v1 * p.v2 - p.v12;
                if lead < -1e-10 {
                    return Err(Error::numeric(format!(
                        "negative MS density factor {lead:.3e} at ({z1}, {z2})"
                    )));
                }
                let lead = lead.max(0.0);
                let ev = (-p.v).exp();
                Ok(BivariateParts {
                    cdf: ev,
                    d1: -p.v1 * ev,
                    d2: -p.v2 * ev,
                    density: lead * ev,
                    log_density: lead.ln() - p.v,
                })
            }
            PairModel::Ims(fam) => {
                let p = ims_parts(z1, z2, fam)?;
                Ok(BivariateParts {
                    cdf: p.cdf,
                    d1: p.d1,
                    d2: p.d2,
                    density: p.density,
                    log_density: p.density.ln(),
                })
            }
            PairModel::Mix { a, x, y } => mm_parts(z1, z2, *a, x, y),
        }
    }

    /// log g(z1, z2), flagged non-finite values surface as `Err`.
    pub fn log_density(&self, z1: f64, z2: f64) -> Result<f64> {
        let ld = self.parts(z1, z2)?.log_density;
        if ld.is_finite() {
            Ok(ld)
        } else {
            Err(Error::numeric(format!("non-finite log density at ({z1}, {z2})")))
        }
    }
}

/// Max-mixture bivariate CDF; `a` may sit on either boundary.
pub fn mm_bivariate_cdf(z1: f64, z2: f64, a: f64, x: &MsFamily, y: &MsFamily) -> Result<f64> {
    check_frechet_args(z1, z2)?;
    check_mixing(a)?;
    if a < A_BOUNDARY {
        return super::inverted::ims_bivariate_cdf(z1, z2, y);
    }
    if 1.0 - a < A_BOUNDARY {
        return x.cdf(z1, z2);
    }
    let b = 1.0 - a;
    let vx = x.v(z1, z2)?;
    let gy = super::inverted::ims_bivariate_cdf(z1 / b, z2 / b, y)?;
    Ok((-a * vx).exp() * gy)
}

/// Max-mixture CDF, partials and density via the product rule.
pub fn mm_parts(z1: f64, z2: f64, a: f64, x: &MsFamily, y: &MsFamily) -> Result<BivariateParts> {
    check_frechet_args(z1, z2)?;
    check_mixing(a)?;
    if a < A_BOUNDARY {
        return PairModel::Ims(*y).parts(z1, z2);
    }
    if 1.0 - a < A_BOUNDARY {
        return PairModel::Ms(*x).parts(z1, z2);
    }
    let b = 1.0 - a;
    let xp = x.v_partials(z1, z2)?;
    // X factor and its derivatives, all divided by exp(−a V_X)
    let a1 = -a * xp.v1;
    let a2 = -a * xp.v2;
    let a12 = a * a * xp.v1 * xp.v2 - a * xp.v12;
    let yp = ims_parts(z1 / b, z2 / b, y)?;
    let (bc, b1, b2, b12) = (yp.cdf, yp.d1 / b, yp.d2 / b, yp.density / (b * b));
    let ex = (-a * xp.v).exp();
    let bracket = a12 * bc + a1 * b2 + a2 * b1 + b12;
    let density = ex * bracket;
    if density < -1e-10 {
        return Err(Error::numeric(format!(
            "negative MM density {density:.3e} at ({z1}, {z2})"
        )));
    }
    Ok(BivariateParts {
        cdf: ex * bc,
        d1: ex * (a1 * bc + b1),
        d2: ex * (a2 * bc + b2),
        density: density.max(0.0),
        log_density: bracket.max(0.0).ln() - a * xp.v,
    })
}

fn check_mixing(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::domain(format!("mixing coefficient must lie in [0, 1], got {a}")));
    }
    Ok(())
}
