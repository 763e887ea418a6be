//! Model classes, parameter vectors and the transforms used for
//! unconstrained optimization.

use super::dependence::{alpha_disk, exp_correlation};
use super::mixture::PairModel;
use super::MsFamily;
use crate::error::{Error, Result};

/// The five fitted dependence-model classes.
///
/// `MmTegITeg` is a max-mixture with TEG AD part and inverted-TEG AI part;
/// `MmTegISmith` swaps the AI part for an inverted isotropic Smith process;
/// the remaining three are the pure sub-models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelSpec {
    MmTegITeg,
    MmTegISmith,
    MsTeg,
    MsSmith,
    ImsSmith,
}

/// Per-coordinate bijection between the natural and unconstrained scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// (0, 1) ↔ ℝ via the logit map; used for the mixing coefficient.
    Logit,
    /// (0, ∞) ↔ ℝ via the logarithm; used for ranges and radii.
    Log,
}

impl Transform {
    pub fn to_unconstrained(&self, v: f64) -> f64 {
        match self {
            Transform::Logit => {
                let c = v.clamp(1e-12, 1.0 - 1e-12);
                (c / (1.0 - c)).ln()
            }
            Transform::Log => v.ln(),
        }
    }

    pub fn from_unconstrained(&self, t: f64) -> f64 {
        match self {
            Transform::Logit => 1.0 / (1.0 + (-t).exp()),
            Transform::Log => t.exp(),
        }
    }

    /// Jacobian d(natural)/d(unconstrained) evaluated at a natural value,
    /// for delta-method mapping of standard errors.
    pub fn jacobian(&self, natural: f64) -> f64 {
        match self {
            Transform::Logit => natural * (1.0 - natural),
            Transform::Log => natural,
        }
    }
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 5] = [
        ModelSpec::MmTegITeg,
        ModelSpec::MmTegISmith,
        ModelSpec::MsTeg,
        ModelSpec::MsSmith,
        ModelSpec::ImsSmith,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::MmTegITeg => "mm-teg-iteg",
            ModelSpec::MmTegISmith => "mm-teg-ismith",
            ModelSpec::MsTeg => "ms-teg",
            ModelSpec::MsSmith => "ms-smith",
            ModelSpec::ImsSmith => "ims-smith",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "mm-teg-iteg" | "m1" => Ok(ModelSpec::MmTegITeg),
            "mm-teg-ismith" | "m2" => Ok(ModelSpec::MmTegISmith),
            "ms-teg" | "m3" => Ok(ModelSpec::MsTeg),
            "ms-smith" | "m4" => Ok(ModelSpec::MsSmith),
            "ims-smith" | "m5" => Ok(ModelSpec::ImsSmith),
            other => Err(Error::parse(format!("unknown model '{other}'"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.param_names().len()
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::MmTegITeg => &["a", "phi_x", "r_x", "phi_y", "r_y"],
            ModelSpec::MmTegISmith => &["a", "phi_x", "r_x", "phi_y"],
            ModelSpec::MsTeg => &["phi_x", "r_x"],
            ModelSpec::MsSmith => &["phi_x"],
            ModelSpec::ImsSmith => &["phi_y"],
        }
    }

    /// Position of the mixing coefficient in the parameter vector, when present.
    pub fn index_of_a(&self) -> Option<usize> {
        match self {
            ModelSpec::MmTegITeg | ModelSpec::MmTegISmith => Some(0),
            _ => None,
        }
    }

    pub fn transforms(&self) -> Vec<Transform> {
        self.param_names()
            .iter()
            .map(|n| if *n == "a" { Transform::Logit } else { Transform::Log })
            .collect()
    }

    pub fn validate(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.dim() {
            return Err(Error::domain(format!(
                "{} expects {} parameters, got {}",
                self.name(),
                self.dim(),
                params.len()
            )));
        }
        for (name, &v) in self.param_names().iter().zip(params) {
            if !v.is_finite() {
                return Err(Error::domain(format!("parameter {name} is not finite")));
            }
            if *name == "a" {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::domain(format!("a must lie in [0, 1], got {v}")));
                }
            } else if v <= 0.0 {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Bivariate pair model at spatial lag `h` for a validated parameter vector.
    pub fn pair_model(&self, params: &[f64], h: f64) -> Result<PairModel> {
        match self {
            ModelSpec::MmTegITeg => Ok(PairModel::Mix {
                a: params[0],
                x: teg_law(h, params[1], params[2])?,
                y: teg_law(h, params[3], params[4])?,
            }),
            ModelSpec::MmTegISmith => Ok(PairModel::Mix {
                a: params[0],
                x: teg_law(h, params[1], params[2])?,
                y: smith_law(h, params[3])?,
            }),
            ModelSpec::MsTeg => Ok(PairModel::Ms(teg_law(h, params[0], params[1])?)),
            ModelSpec::MsSmith => Ok(PairModel::Ms(smith_law(h, params[0])?)),
            ModelSpec::ImsSmith => Ok(PairModel::Ims(smith_law(h, params[0])?)),
        }
    }

    /// Moment-flavoured default starting values given a median pairwise distance.
    pub fn default_start(&self, median_distance: f64) -> Vec<f64> {
        let phi = (median_distance / 3.0).max(1e-6);
        let r = median_distance.max(1e-6);
        self.param_names()
            .iter()
            .map(|n| match *n {
                "a" => 0.5,
                "phi_x" | "phi_y" => phi,
                _ => r,
            })
            .collect()
    }

    pub fn to_unconstrained(&self, params: &[f64]) -> Vec<f64> {
        self.transforms()
            .iter()
            .zip(params)
            .map(|(t, &v)| t.to_unconstrained(v))
            .collect()
    }

    pub fn from_unconstrained(&self, t: &[f64]) -> Vec<f64> {
        self.transforms()
            .iter()
            .zip(t)
            .map(|(tr, &v)| tr.from_unconstrained(v))
            .collect()
    }
}

fn teg_law(h: f64, phi: f64, r: f64) -> Result<MsFamily> {
    Ok(MsFamily::Teg { rho: exp_correlation(h, phi)?, alpha: alpha_disk(h, r)? })
}

fn smith_law(h: f64, phi: f64) -> Result<MsFamily> {
    if !(phi > 0.0) {
        return Err(Error::domain(format!("phi must be > 0, got {phi}")));
    }
    if !(h >= 0.0) {
        return Err(Error::domain(format!("distance must be >= 0, got {h}")));
    }
    Ok(MsFamily::Smith { gamma: h / phi })
}

/// Named view of a model-class parameter vector; fields irrelevant to the
/// class stay `None` rather than being defaulted.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MixtureParams {
    pub a: Option<f64>,
    pub phi_x: Option<f64>,
    pub r_x: Option<f64>,
    pub phi_y: Option<f64>,
    pub r_y: Option<f64>,
}

impl MixtureParams {
    pub fn from_vec(spec: ModelSpec, params: &[f64]) -> Result<Self> {
        spec.validate(params)?;
        let mut out = MixtureParams::default();
        for (name, &v) in spec.param_names().iter().zip(params) {
            match *name {
                "a" => out.a = Some(v),
                "phi_x" => out.phi_x = Some(v),
                "r_x" => out.r_x = Some(v),
                "phi_y" => out.phi_y = Some(v),
                "r_y" => out.r_y = Some(v),
                _ => unreachable!(),
            }
        }
        Ok(out)
    }

    pub fn to_vec(&self, spec: ModelSpec) -> Result<Vec<f64>> {
        spec.param_names()
            .iter()
            .map(|name| {
                let v = match *name {
                    "a" => self.a,
                    "phi_x" => self.phi_x,
                    "r_x" => self.r_x,
                    "phi_y" => self.phi_y,
                    "r_y" => self.r_y,
                    _ => unreachable!(),
                };
                v.ok_or_else(|| {
                    Error::domain(format!("{} requires parameter {name}", spec.name()))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_round_trip() {
        for spec in ModelSpec::ALL {
            let params = spec.default_start(0.9);
            let t = spec.to_unconstrained(&params);
            let back = spec.from_unconstrained(&t);
            for (a, b) in params.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "{spec:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn validate_catches_bad_vectors() {
        assert!(ModelSpec::MsTeg.validate(&[0.1]).is_err());
        assert!(ModelSpec::MsTeg.validate(&[0.1, -0.2]).is_err());
        assert!(ModelSpec::MmTegITeg.validate(&[1.5, 0.1, 0.25, 0.75, 1.2]).is_err());
        assert!(ModelSpec::MmTegITeg.validate(&[0.5, 0.1, 0.25, 0.75, 1.2]).is_ok());
    }

    #[test]
    fn mixture_params_round_trip_and_absence() {
        let v = [0.5, 0.1, 0.25, 0.75, 1.2];
        let mp = MixtureParams::from_vec(ModelSpec::MmTegITeg, &v).unwrap();
        assert_eq!(mp.to_vec(ModelSpec::MmTegITeg).unwrap(), v);
        let ms = MixtureParams::from_vec(ModelSpec::MsSmith, &[0.13]).unwrap();
        assert_eq!(ms.a, None);
        assert_eq!(ms.r_y, None);
        // absent fields are an error, never silently defaulted
        assert!(ms.to_vec(ModelSpec::MmTegITeg).is_err());
    }

    #[test]
    fn names_round_trip() {
        for spec in ModelSpec::ALL {
            assert_eq!(ModelSpec::from_name(spec.name()).unwrap(), spec);
        }
        assert_eq!(ModelSpec::from_name("M2").unwrap(), ModelSpec::MmTegISmith);
        assert!(ModelSpec::from_name("nope").is_err());
    }
}
