//! Pairwise-likelihood test statistics for H₀: a = a₀ versus H₁: a ≠ a₀.
//!
//! - `Z = (â − a₀)/√Var(â)` referred to the standard normal (two-sided);
//!   the variance comes from the Godambe estimate and carries its "total
//!   likelihood" scaling.
//! - `LR = 2{pℓ(ϑ̂) − pℓ(ϑ̂*)}` referred to λ·χ²₁ with
//!   `λ = G^{aa}/H^{aa}`, the ratio of the (a, a) entries of the *inverses*
//!   of G and H (this block-of-inverse reading reproduces the reference
//!   p-values).
//! - `Z_C = (â_A − â_B)/√(se_A² + se_B²)` for two independent groups.
//!
//! Testing exactly at the boundaries a₀ ∈ {0, 1} is nonstandard (nuisance
//! parameters only exist under the alternative), so such requests are moved
//! to 0.01/0.99 with a recorded warning.

use crate::error::{Error, Result};
use crate::util::{norm_cdf, norm_sf};

/// Significance levels reported with every test.
pub const ALPHA_LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

/// Which statistic a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestKind {
    Z,
    Lr,
    TwoSampleZ,
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::Z => "Z",
            TestKind::Lr => "LR",
            TestKind::TwoSampleZ => "two-sample-Z",
        }
    }
}

/// Statistic value, reference-distribution parameters, p-value and the
/// decision at each significance level.
#[derive(Clone, Debug)]
pub struct TestReport {
    pub kind: TestKind,
    pub statistic: f64,
    /// LR only: the χ²₁ scale factor.
    pub lambda: Option<f64>,
    pub p_value: f64,
    pub a0: Option<f64>,
    /// (α, reject) rows; reject ⟺ p < α.
    pub decisions: Vec<(f64, bool)>,
    /// Free-form provenance (fit ids, M, seed) recorded by the caller.
    pub provenance: String,
}

fn decisions(p: f64) -> Vec<(f64, bool)> {
    ALPHA_LEVELS.iter().map(|&a| (a, p < a)).collect()
}

/// Two-sided standard normal p-value.
pub fn normal_two_sided_p(z: f64) -> f64 {
    (2.0 * norm_sf(z.abs())).min(1.0)
}

/// Upper tail of χ²₁ through the normal identity P(χ²₁ > x) = 2(1 − Φ(√x)).
pub fn chi2_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        2.0 * (1.0 - norm_cdf(x.sqrt()))
    }
}

/// Z test of H₀: a = a₀ given the estimator variance of â.
pub fn z_test(a_hat: f64, a0: f64, var_a: f64) -> Result<TestReport> {
    if !(var_a > 0.0) {
        return Err(Error::domain(format!("variance of a-hat must be > 0, got {var_a}")));
    }
    let z = (a_hat - a0) / var_a.sqrt();
    let p = normal_two_sided_p(z);
    Ok(TestReport {
        kind: TestKind::Z,
        statistic: z,
        lambda: None,
        p_value: p,
        a0: Some(a0),
        decisions: decisions(p),
        provenance: String::new(),
    })
}

/// λ-scaled pairwise likelihood-ratio test.
///
/// `h_aa` and `g_aa` are the (a, a) entries of H⁻¹ and G⁻¹ respectively;
/// p = P(χ²₁ > LR/λ) with λ = g_aa/h_aa.
pub fn lr_test(logpl_full: f64, logpl_constrained: f64, h_aa: f64, g_aa: f64) -> Result<TestReport> {
    if logpl_full < logpl_constrained - 1e-6 {
        return Err(Error::domain(format!(
            "constrained log-likelihood {logpl_constrained} exceeds the full one {logpl_full}"
        )));
    }
    let lambda = g_aa / h_aa;
    if !(lambda > 0.0) {
        return Err(Error::numeric(format!(
            "inverse-block ratio lambda = {lambda} is not positive"
        )));
    }
    let lr = (2.0 * (logpl_full - logpl_constrained)).max(0.0);
    let p = chi2_1_sf(lr / lambda);
    Ok(TestReport {
        kind: TestKind::Lr,
        statistic: lr,
        lambda: Some(lambda),
        p_value: p,
        a0: None,
        decisions: decisions(p),
        provenance: String::new(),
    })
}

/// Two-sample Z test of H₀: a_A = a_B with pooled standard error.
pub fn two_sample_z(a_hat_a: f64, se_a: f64, a_hat_b: f64, se_b: f64) -> Result<TestReport> {
    let pooled = (se_a * se_a + se_b * se_b).sqrt();
    if !(pooled > 0.0) {
        return Err(Error::domain("pooled standard error must be > 0"));
    }
    let z = (a_hat_a - a_hat_b) / pooled;
    let p = normal_two_sided_p(z);
    Ok(TestReport {
        kind: TestKind::TwoSampleZ,
        statistic: z,
        lambda: None,
        p_value: p,
        a0: None,
        decisions: decisions(p),
        provenance: String::new(),
    })
}

/// Move boundary requests a₀ ∈ {0, 1} to 0.01/0.99; the flag reports
/// whether an adjustment happened.
pub fn boundary_adjust(a0: f64) -> (f64, bool) {
    if a0 == 0.0 {
        (0.01, true)
    } else if a0 == 1.0 {
        (0.99, true)
    } else {
        (a0, false)
    }
}
